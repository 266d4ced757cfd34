//! Token- and entity-level metrics, confusion matrices, retrieval judgments
//! and annotated diffs.
//!
//! Gold and predicted corpora are paired by sentence id. Every ratio with a
//! zero denominator is reported as 0.

mod diff;
mod entity;
mod report;
mod retrieval;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::corpus::{AnnotatedSentence, Corpus, Label};

pub use diff::{diff_report, DiffCounts, DiffReport};
pub use entity::{entity_counts, entity_metrics, EntityCounts, Regime};
pub use report::{evaluate, render_ablation_table, AblationRow, EvalReport, LanguageReport};
pub use retrieval::{evaluate_retrieval, Judgments, RetrievalReport, RetrievalRow};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("corpora are not aligned: {0}")]
    Alignment(String),
    #[error("judgments line {line}: {reason}")]
    Judgments { line: usize, reason: String },
    #[error("duplicate judgment for entity `{entity}` at {doc}:{start}..{end}")]
    DuplicateJudgment { entity: String, doc: String, start: usize, end: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl EvalError {
    pub fn name(&self) -> &'static str {
        match self {
            EvalError::Alignment(_) => "AlignmentError",
            EvalError::Judgments { .. } => "JudgmentsParseError",
            EvalError::DuplicateJudgment { .. } => "DuplicateJudgment",
            EvalError::Io(_) => "IoError",
        }
    }
}

/// Default β: precision weighted well above recall.
pub const DEFAULT_BETA: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub beta: f64,
    pub per_language: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { beta: DEFAULT_BETA, per_language: true }
    }
}

impl EvalConfig {
    pub fn new(beta: f64, per_language: bool) -> Result<Self, String> {
        if beta > 0.0 && beta.is_finite() {
            Ok(Self { beta, per_language })
        } else {
            Err(format!("beta must be positive, got {beta}"))
        }
    }
}

/// `(1+β²)·p·r / (β²·p + r)`, or 0 when both are 0.
pub fn fbeta(p: f64, r: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * p + r;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * p * r / denom
    }
}

pub(crate) fn ratio(num: usize, denom: usize) -> f64 {
    if denom == 0 {
        0.0
    } else {
        num as f64 / denom as f64
    }
}

/// Micro counts over the non-O labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TokenCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl TokenCounts {
    pub fn add(&mut self, other: TokenCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn fbeta(&self, beta: f64) -> f64 {
        fbeta(self.precision(), self.recall(), beta)
    }
}

pub fn token_counts(gold: &[Label], pred: &[Label]) -> TokenCounts {
    let mut c = TokenCounts::default();
    for (&g, &p) in gold.iter().zip(pred) {
        if g == p {
            if g != Label::O {
                c.tp += 1;
            }
            continue;
        }
        if p != Label::O {
            c.fp += 1;
        }
        if g != Label::O {
            c.fn_ += 1;
        }
    }
    c
}

/// Pair each gold sentence with the predicted sentence of the same id.
pub fn align<'a>(
    gold: &'a Corpus,
    pred: &'a Corpus,
) -> Result<Vec<(&'a AnnotatedSentence, &'a AnnotatedSentence)>, EvalError> {
    align_sentences(&gold.sentences, &pred.sentences)
}

pub fn align_sentences<'a>(
    gold: &'a [AnnotatedSentence],
    pred: &'a [AnnotatedSentence],
) -> Result<Vec<(&'a AnnotatedSentence, &'a AnnotatedSentence)>, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::Alignment(format!("{} gold sentences vs {} predicted", gold.len(), pred.len())));
    }
    let by_id: HashMap<&str, &AnnotatedSentence> = pred.iter().map(|s| (s.sentence_id.as_str(), s)).collect();
    gold.iter()
        .map(|g| {
            let p = by_id
                .get(g.sentence_id.as_str())
                .ok_or_else(|| EvalError::Alignment(format!("no prediction for sentence `{}`", g.sentence_id)))?;
            if p.tokens.len() != g.tokens.len() {
                return Err(EvalError::Alignment(format!(
                    "sentence `{}` has {} gold tokens and {} predicted",
                    g.sentence_id,
                    g.tokens.len(),
                    p.tokens.len()
                )));
            }
            Ok((g, *p))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenMetrics {
    pub counts: TokenCounts,
    pub precision: f64,
    pub recall: f64,
    pub fbeta: f64,
}

impl TokenMetrics {
    pub fn from_counts(counts: TokenCounts, beta: f64) -> Self {
        Self { counts, precision: counts.precision(), recall: counts.recall(), fbeta: counts.fbeta(beta) }
    }
}

pub fn token_metrics(gold: &Corpus, pred: &Corpus, beta: f64) -> Result<TokenMetrics, EvalError> {
    let mut c = TokenCounts::default();
    for (g, p) in align(gold, pred)? {
        c.add(token_counts(&g.tags, &p.tags));
    }
    Ok(TokenMetrics::from_counts(c, beta))
}

/// Gold label × predicted label counts, with row-normalized rates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    pub counts: [[usize; Label::COUNT]; Label::COUNT],
}

impl ConfusionMatrix {
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a [Label], &'a [Label])>) -> Self {
        let mut counts = [[0; Label::COUNT]; Label::COUNT];
        for (gold, pred) in pairs {
            for (g, p) in gold.iter().zip(pred) {
                counts[g.id()][p.id()] += 1;
            }
        }
        Self { counts }
    }

    pub fn support(&self, gold: Label) -> usize {
        self.counts[gold.id()].iter().sum()
    }

    /// Row-normalized rates; rows without support are all zero.
    pub fn rates(&self) -> [[f64; Label::COUNT]; Label::COUNT] {
        let mut out = [[0.0; Label::COUNT]; Label::COUNT];
        for (row, counts) in out.iter_mut().zip(&self.counts) {
            let total: usize = counts.iter().sum();
            if total > 0 {
                for (r, &c) in row.iter_mut().zip(counts) {
                    *r = c as f64 / total as f64;
                }
            }
        }
        out
    }

    /// Tab-separated grid of rates with a header row and a label column.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("gold\\pred");
        for l in Label::ALL {
            out.push('\t');
            out.push_str(l.as_str());
        }
        out.push('\n');
        for (l, row) in Label::ALL.iter().zip(self.rates()) {
            out.push_str(l.as_str());
            for r in row {
                out.push_str(&format!("\t{r:.6}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn confusion(gold: &Corpus, pred: &Corpus) -> Result<ConfusionMatrix, EvalError> {
    let pairs = align(gold, pred)?;
    Ok(ConfusionMatrix::from_pairs(pairs.iter().map(|(g, p)| (g.tags.as_slice(), p.tags.as_slice()))))
}

/// Group aligned pairs by the gold sentence's language.
pub(crate) fn by_language<'a>(
    pairs: &[(&'a AnnotatedSentence, &'a AnnotatedSentence)],
) -> BTreeMap<&'a str, Vec<(&'a AnnotatedSentence, &'a AnnotatedSentence)>> {
    let mut out: BTreeMap<&str, Vec<_>> = BTreeMap::new();
    for &(g, p) in pairs {
        out.entry(g.language.as_str()).or_default().push((g, p));
    }
    out
}
