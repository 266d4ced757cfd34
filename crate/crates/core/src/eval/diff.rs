use std::fmt::Write as _;

use super::entity::{match_sentence, Regime};
use super::{align, EvalError};
use crate::corpus::{bracket_mentions, Corpus, EntityMention};
use crate::text::slice_chars;

/// Strict-regime discrepancies. Unmatched predictions split into boundary
/// errors (overlapping gold of the same type), type errors (overlapping gold
/// of another type only) and spurious mentions; unmatched top-level gold
/// splits into misses (nothing predicted over it) and gold overlapped by a
/// wrong prediction, which is already flagged on the prediction side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DiffCounts {
    pub boundary: usize,
    pub type_errors: usize,
    pub spurious: usize,
    pub missed: usize,
    pub overlapped_gold: usize,
}

impl DiffCounts {
    pub fn flagged(&self) -> usize {
        self.boundary + self.type_errors + self.spurious + self.missed
    }

    pub fn false_positives(&self) -> usize {
        self.boundary + self.type_errors + self.spurious
    }

    pub fn false_negatives(&self) -> usize {
        self.missed + self.overlapped_gold
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffReport {
    pub text: String,
    pub counts: DiffCounts,
}

fn describe(text: &str, m: &EntityMention) -> String {
    format!("\"{}\" {}", slice_chars(text, m.char_start, m.char_end), m.entity_type)
}

/// Gold and predicted annotations of every sentence, one above the other,
/// followed by one line per flagged discrepancy and a summary.
pub fn diff_report(gold: &Corpus, pred: &Corpus) -> Result<DiffReport, EvalError> {
    let mut counts = DiffCounts::default();
    let mut text = String::new();
    for (g, p) in align(gold, pred)? {
        let m = match_sentence(g, p, Regime::Strict);
        let mut flags = Vec::new();
        for (pm, hit) in m.predicted.iter().zip(&m.pred_match) {
            if hit.is_some() {
                continue;
            }
            let overlapping: Vec<&EntityMention> =
                m.candidates.iter().map(|c| &c.mention).filter(|c| c.overlaps(pm)).collect();
            if let Some(same) = overlapping.iter().find(|c| c.entity_type == pm.entity_type) {
                counts.boundary += 1;
                flags.push(format!("  BOUNDARY pred {} vs gold {}", describe(&p.text, pm), describe(&g.text, same)));
            } else if let Some(other) = overlapping.first() {
                counts.type_errors += 1;
                flags.push(format!("  TYPE     pred {} vs gold {}", describe(&p.text, pm), describe(&g.text, other)));
            } else {
                counts.spurious += 1;
                flags.push(format!("  SPURIOUS pred {}", describe(&p.text, pm)));
            }
        }
        for (gm, matched) in m.top_level.iter().zip(m.top_matched()) {
            if matched {
                continue;
            }
            if m.predicted.iter().any(|pm| pm.overlaps(gm)) {
                counts.overlapped_gold += 1;
            } else {
                counts.missed += 1;
                flags.push(format!("  MISSED   gold {}", describe(&g.text, gm)));
            }
        }
        writeln!(text, "# {}", g.sentence_id).unwrap();
        writeln!(text, "gold: {}", bracket_mentions(&g.text, &m.top_level)).unwrap();
        writeln!(text, "pred: {}", bracket_mentions(&p.text, &m.predicted)).unwrap();
        for f in flags {
            writeln!(text, "{f}").unwrap();
        }
        text.push('\n');
    }
    writeln!(
        text,
        "boundary={} type={} spurious={} missed={}",
        counts.boundary, counts.type_errors, counts.spurious, counts.missed
    )
    .unwrap();
    Ok(DiffReport { text, counts })
}
