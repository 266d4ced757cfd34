use super::{align, ratio, EvalError};
use crate::corpus::{AnnotatedSentence, Corpus, EntityMention};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// Same type and identical span.
    Strict,
    /// Same type and overlapping span.
    Fuzzy,
}

impl Regime {
    pub const ALL: [Regime; 2] = [Regime::Strict, Regime::Fuzzy];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Strict => "strict",
            Regime::Fuzzy => "fuzzy",
        }
    }
}

/// Micro counts: precision is `tp / predicted`, recall is
/// `top_matched / top_gold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EntityCounts {
    /// Predicted mentions matched to some gold mention (top-level or nested).
    pub tp: usize,
    pub predicted: usize,
    /// Top-level gold mentions matched directly or through a nested mention.
    pub top_matched: usize,
    pub top_gold: usize,
}

impl EntityCounts {
    pub fn add(&mut self, o: EntityCounts) {
        self.tp += o.tp;
        self.predicted += o.predicted;
        self.top_matched += o.top_matched;
        self.top_gold += o.top_gold;
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.predicted)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.top_matched, self.top_gold)
    }

    pub fn false_positives(&self) -> usize {
        self.predicted - self.tp
    }

    pub fn false_negatives(&self) -> usize {
        self.top_gold - self.top_matched
    }
}

/// A gold mention eligible for matching, with the top-level mention it
/// belongs to.
#[derive(Debug, Clone)]
pub(crate) struct GoldCandidate {
    pub mention: EntityMention,
    pub top: usize,
}

pub(crate) struct SentenceMatch {
    pub top_level: Vec<EntityMention>,
    pub candidates: Vec<GoldCandidate>,
    pub predicted: Vec<EntityMention>,
    /// Candidate index matched by each prediction.
    pub pred_match: Vec<Option<usize>>,
}

impl SentenceMatch {
    pub fn top_matched(&self) -> Vec<bool> {
        let mut out = vec![false; self.top_level.len()];
        for c in self.pred_match.iter().flatten() {
            out[self.candidates[*c].top] = true;
        }
        out
    }

    pub fn counts(&self) -> EntityCounts {
        EntityCounts {
            tp: self.pred_match.iter().filter(|m| m.is_some()).count(),
            predicted: self.predicted.len(),
            top_matched: self.top_matched().into_iter().filter(|&m| m).count(),
            top_gold: self.top_level.len(),
        }
    }
}

fn flatten(m: &EntityMention, top: usize, out: &mut Vec<GoldCandidate>) {
    out.push(GoldCandidate { mention: EntityMention::new(m.entity_type, m.char_start, m.char_end), top });
    for n in &m.nested {
        flatten(n, top, out);
    }
}

/// Gold mentions come from `gold_entities` when present, else from the tags.
pub(crate) fn match_sentence(gold: &AnnotatedSentence, pred: &AnnotatedSentence, regime: Regime) -> SentenceMatch {
    let mut top_level = gold.gold_entities.clone().unwrap_or_else(|| gold.mentions());
    top_level.sort_by_key(|m| (m.char_start, m.char_end));
    let mut candidates = Vec::new();
    for (i, m) in top_level.iter().enumerate() {
        flatten(m, i, &mut candidates);
    }
    candidates.sort_by_key(|c| (c.mention.char_start, c.mention.char_end));
    let predicted = pred.mentions();
    let mut used = vec![false; candidates.len()];
    let mut pred_match = vec![None; predicted.len()];
    let mut pass = |accept: &dyn Fn(&EntityMention, &EntityMention) -> bool| {
        for (p, slot) in predicted.iter().zip(pred_match.iter_mut()) {
            if slot.is_some() {
                continue;
            }
            let hit = candidates
                .iter()
                .enumerate()
                .position(|(i, c)| !used[i] && c.mention.entity_type == p.entity_type && accept(&c.mention, p));
            if let Some(i) = hit {
                used[i] = true;
                *slot = Some(i);
            }
        }
    };
    pass(&|g, p| g.same_span(p));
    if regime == Regime::Fuzzy {
        pass(&|g, p| g.overlaps(p));
    }
    SentenceMatch { top_level, candidates, predicted, pred_match }
}

pub fn entity_counts(gold: &AnnotatedSentence, pred: &AnnotatedSentence, regime: Regime) -> EntityCounts {
    match_sentence(gold, pred, regime).counts()
}

pub fn entity_metrics(gold: &Corpus, pred: &Corpus, regime: Regime) -> Result<EntityCounts, EvalError> {
    let mut total = EntityCounts::default();
    for (g, p) in align(gold, pred)? {
        total.add(entity_counts(g, p, regime));
    }
    Ok(total)
}
