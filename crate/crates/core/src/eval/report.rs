use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use super::entity::{entity_counts, EntityCounts, Regime};
use super::{align, by_language, token_counts, ConfusionMatrix, EvalConfig, EvalError, TokenCounts, TokenMetrics};
use crate::corpus::{AnnotatedSentence, Corpus, Label};

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageReport {
    pub sentences: usize,
    pub token: TokenMetrics,
    pub strict: EntityCounts,
    pub fuzzy: EntityCounts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub beta: f64,
    pub overall: LanguageReport,
    pub per_language: BTreeMap<String, LanguageReport>,
    pub confusion: ConfusionMatrix,
}

fn summarize(pairs: &[(&AnnotatedSentence, &AnnotatedSentence)], beta: f64) -> LanguageReport {
    let mut tokens = TokenCounts::default();
    let mut strict = EntityCounts::default();
    let mut fuzzy = EntityCounts::default();
    for (g, p) in pairs {
        tokens.add(token_counts(&g.tags, &p.tags));
        strict.add(entity_counts(g, p, Regime::Strict));
        fuzzy.add(entity_counts(g, p, Regime::Fuzzy));
    }
    LanguageReport { sentences: pairs.len(), token: TokenMetrics::from_counts(tokens, beta), strict, fuzzy }
}

pub fn evaluate(gold: &Corpus, pred: &Corpus, config: EvalConfig) -> Result<EvalReport, EvalError> {
    let pairs = align(gold, pred)?;
    let per_language = if config.per_language {
        by_language(&pairs)
            .into_iter()
            .map(|(lang, group)| (lang.to_string(), summarize(&group, config.beta)))
            .collect()
    } else {
        BTreeMap::new()
    };
    Ok(EvalReport {
        beta: config.beta,
        overall: summarize(&pairs, config.beta),
        per_language,
        confusion: ConfusionMatrix::from_pairs(pairs.iter().map(|(g, p)| (g.tags.as_slice(), p.tags.as_slice()))),
    })
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

fn write_section(f: &mut fmt::Formatter<'_>, name: &str, r: &LanguageReport, beta: f64) -> fmt::Result {
    writeln!(f, "{name} ({} sentences)", r.sentences)?;
    writeln!(
        f,
        "  token    P {:>8}  R {:>8}  F_{beta} {:>8}",
        pct(r.token.precision),
        pct(r.token.recall),
        pct(r.token.fbeta)
    )?;
    for (label, c) in [("strict", &r.strict), ("fuzzy", &r.fuzzy)] {
        writeln!(
            f,
            "  {label:<6}   P {:>8}  R {:>8}  F_{beta} {:>8}",
            pct(c.precision()),
            pct(c.recall()),
            pct(super::fbeta(c.precision(), c.recall(), beta))
        )?;
    }
    Ok(())
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_section(f, "overall", &self.overall, self.beta)?;
        for (lang, r) in &self.per_language {
            write_section(f, &format!("language {lang}"), r, self.beta)?;
        }
        writeln!(f, "confusion (rows gold, columns predicted)")?;
        write!(f, "  {:<6}", "")?;
        for l in Label::ALL {
            write!(f, " {:>6}", l.as_str())?;
        }
        writeln!(f)?;
        for (l, row) in Label::ALL.iter().zip(self.confusion.rates()) {
            write!(f, "  {:<6}", l.as_str())?;
            for r in row {
                write!(f, " {r:>6.3}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl EvalReport {
    /// One `key=value` line per number, in a fixed order.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        writeln!(out, "beta={}", self.beta).unwrap();
        let mut section = |prefix: &str, r: &LanguageReport| {
            let t = &r.token;
            writeln!(out, "{prefix}sentences={}", r.sentences).unwrap();
            writeln!(out, "{prefix}token.tp={}", t.counts.tp).unwrap();
            writeln!(out, "{prefix}token.fp={}", t.counts.fp).unwrap();
            writeln!(out, "{prefix}token.fn={}", t.counts.fn_).unwrap();
            writeln!(out, "{prefix}token.precision={:.6}", t.precision).unwrap();
            writeln!(out, "{prefix}token.recall={:.6}", t.recall).unwrap();
            writeln!(out, "{prefix}token.fbeta={:.6}", t.fbeta).unwrap();
            for (name, c) in [("strict", &r.strict), ("fuzzy", &r.fuzzy)] {
                writeln!(out, "{prefix}{name}.tp={}", c.tp).unwrap();
                writeln!(out, "{prefix}{name}.predicted={}", c.predicted).unwrap();
                writeln!(out, "{prefix}{name}.top_matched={}", c.top_matched).unwrap();
                writeln!(out, "{prefix}{name}.top_gold={}", c.top_gold).unwrap();
                writeln!(out, "{prefix}{name}.precision={:.6}", c.precision()).unwrap();
                writeln!(out, "{prefix}{name}.recall={:.6}", c.recall()).unwrap();
            }
        };
        section("", &self.overall);
        for (lang, r) in &self.per_language {
            section(&format!("lang.{lang}."), r);
        }
        for (g, row) in Label::ALL.iter().zip(self.confusion.counts) {
            for (p, n) in Label::ALL.iter().zip(row) {
                writeln!(out, "confusion.{g}.{p}={n}").unwrap();
            }
        }
        out
    }
}

/// One trained model in a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub model_id: String,
    pub training_data: String,
    /// Number of nonzero parameters.
    pub model_size: usize,
    pub loss: String,
    /// Token F_β per benchmark, in the table's benchmark order.
    pub scores: Vec<f64>,
}

/// Model id, training data, size, loss and one F_β column per benchmark;
/// the best score in each column is marked with `*`.
pub fn render_ablation_table(benchmarks: &[String], rows: &[AblationRow], beta: f64) -> String {
    let best: Vec<f64> =
        (0..benchmarks.len()).map(|i| rows.iter().map(|r| r.scores[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let mut header =
        vec!["Model Id".to_string(), "Training Data".to_string(), "Model Size".to_string(), "TC Loss".to_string()];
    header.extend(benchmarks.iter().map(|b| format!("F_{beta} {b}")));
    let mut table: Vec<Vec<String>> = vec![header];
    for r in rows {
        let mut line = vec![r.model_id.clone(), r.training_data.clone(), r.model_size.to_string(), r.loss.clone()];
        for (s, b) in r.scores.iter().zip(&best) {
            let mark = if s == b { "*" } else { "" };
            line.push(format!("{}{mark}", pct(*s)));
        }
        table.push(line);
    }
    let widths: Vec<usize> =
        (0..table[0].len()).map(|c| table.iter().map(|row| row[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (i, row) in table.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, w))| if c < 2 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
            .collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
        if i == 0 {
            writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1))).unwrap();
        }
    }
    out
}
