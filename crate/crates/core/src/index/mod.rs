//! Search structures over a document collection.
//!
//! - [`PositionalIndex`]: lemma → (doc, token position) postings for
//!   contiguous phrase queries.
//! - [`PhraseIndex`]: token n-grams as BM25 retrieval units.
//! - [`LengthWindow`] / [`enumerate_windows`]: token-aligned substrings whose
//!   character length is close to a target length.
//!
//! Documents are numbered by ascending doc id, so every posting list is in
//! the global `(doc_id, position)` order.

mod persist;
mod phrase;
mod positional;

use std::sync::Arc;

use crate::ingest::Document;
use crate::text::CharText;

pub use persist::{read_index_set, write_index_set, IndexSet};
pub use phrase::{bm25_score, Bm25Params, PhraseIndex, PhraseUnit, TokenRange};
pub use positional::{PositionalIndex, Posting};

/// Text and token spans of one indexed document.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedDoc {
    pub doc_id: String,
    text: CharText,
    pub token_spans: Vec<(usize, usize)>,
}

impl IndexedDoc {
    pub fn from_document(doc: &Document) -> Self {
        Self {
            doc_id: doc.doc_id.clone(),
            text: CharText::new(doc.text()),
            token_spans: doc.tokens.iter().map(|t| (t.char_start, t.char_end)).collect(),
        }
    }

    pub fn text(&self) -> &str {
        self.text.as_str()
    }

    pub fn slice(&self, start: usize, end: usize) -> &str {
        self.text.slice(start, end)
    }

    /// Character span covering tokens `first..=last`.
    pub fn token_range_span(&self, first: usize, last: usize) -> (usize, usize) {
        (self.token_spans[first].0, self.token_spans[last].1)
    }
}

/// Documents shared between the indexes built over the same collection.
pub type DocTable = Arc<Vec<IndexedDoc>>;

pub fn doc_table(docs: &[&Document]) -> DocTable {
    Arc::new(docs.iter().map(|d| IndexedDoc::from_document(d)).collect())
}

/// Accepted character lengths around a target length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthWindow {
    pub target_length: usize,
    pub tolerance_ratio: f64,
}

impl LengthWindow {
    pub const DEFAULT_TOLERANCE: f64 = 0.3;

    pub fn new(target_length: usize, tolerance_ratio: f64) -> Result<Self, String> {
        if !(0.0..1.0).contains(&tolerance_ratio) {
            return Err(format!("tolerance ratio {tolerance_ratio} outside [0, 1)"));
        }
        Ok(Self { target_length, tolerance_ratio })
    }

    /// Inclusive bounds `[ceil(t(1-r)), floor(t(1+r))]`.
    pub fn bounds(&self) -> (usize, usize) {
        // nudge by an epsilon so e.g. 10 * 0.7 = 7.000000000000001 rounds to 7
        let t = self.target_length as f64;
        let lo = (t * (1.0 - self.tolerance_ratio) - 1e-9).ceil().max(0.0) as usize;
        let hi = (t * (1.0 + self.tolerance_ratio) + 1e-9).floor() as usize;
        (lo, hi)
    }

    pub fn accepts(&self, len: usize) -> bool {
        let (lo, hi) = self.bounds();
        len >= lo.max(1) && len <= hi
    }
}

/// Token-aligned substrings of `doc` with character length inside `window`.
///
/// Spans start at every `stride`-th token of a sentence and end at a token
/// end in the same sentence. Output is in document order (start, then end).
pub fn enumerate_windows(doc: &Document, window: LengthWindow, stride: usize) -> Vec<(usize, usize)> {
    assert!(stride >= 1, "stride must be at least 1");
    let (_, hi) = window.bounds();
    let mut spans = Vec::new();
    for sent in &doc.sentences {
        for i in (sent.token_start..sent.token_end).step_by(stride) {
            let start = doc.tokens[i].char_start;
            for tok in &doc.tokens[i..sent.token_end] {
                let len = tok.char_end - start;
                if len > hi {
                    break;
                }
                if window.accepts(len) {
                    spans.push((start, tok.char_end));
                }
            }
        }
    }
    spans
}
