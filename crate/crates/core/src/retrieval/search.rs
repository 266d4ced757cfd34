use std::collections::BTreeSet;

use super::distance::{edit_distance, jaccard_similarity};
use super::{sort_by_score, Candidate, Method, Query, TextMode};
use crate::index::{enumerate_windows, LengthWindow, PhraseIndex, PositionalIndex};
use crate::ingest::DocumentCollection;
use crate::text::fold_case;

/// Windows around the query's character length, scored by the mean of
/// character-bigram and word Jaccard similarity (both case-folded).
/// Windows with no overlap at all (score 0) are not returned.
pub fn search_jaccard(
    query: &Query,
    collection: &DocumentCollection,
    tolerance: f64,
    stride: usize,
    limit: usize,
) -> Vec<Candidate> {
    let surface = query.folded_surface();
    let window = LengthWindow::new(surface.chars().count(), tolerance).expect("tolerance validated by caller");
    let mut out = Vec::new();
    for doc in collection.sorted_docs() {
        for (start, end) in enumerate_windows(doc, window, stride) {
            let text = doc.slice(start, end);
            let folded = fold_case(text);
            let score = (jaccard_similarity(&folded, &surface, TextMode::Char)
                + jaccard_similarity(&folded, &surface, TextMode::Word))
                / 2.0;
            if score > 0.0 {
                out.push(Candidate {
                    doc_id: doc.doc_id.clone(),
                    char_start: start,
                    char_end: end,
                    matched_text: text.to_string(),
                    score,
                    method: Method::Jaccard,
                });
            }
        }
    }
    sort_by_score(&mut out);
    out.truncate(limit);
    out
}

/// Rank phrase units by BM25 against the query's distinct lemmas. Only units
/// sharing at least one term are returned.
pub fn search_bm25(query: &Query, index: &PhraseIndex, limit: usize) -> Vec<Candidate> {
    let mut terms: Vec<String> = Vec::new();
    for l in &query.lemmas {
        if !terms.contains(l) {
            terms.push(l.clone());
        }
    }
    let units: BTreeSet<u32> = terms.iter().flat_map(|t| index.postings(t).iter().map(|&(u, _)| u)).collect();
    let mut out: Vec<Candidate> = units
        .into_iter()
        .map(|u| {
            let unit = &index.units()[u as usize];
            let doc = index.doc(unit.doc);
            Candidate {
                doc_id: doc.doc_id.clone(),
                char_start: unit.char_start,
                char_end: unit.char_end,
                matched_text: doc.slice(unit.char_start, unit.char_end).to_string(),
                score: index.score_unit(&terms, u as usize),
                method: Method::Bm25,
            }
        })
        .collect();
    sort_by_score(&mut out);
    out.truncate(limit);
    out
}

/// Every contiguous occurrence of the query's lemma sequence, ranked by
/// ascending case-folded character edit distance to the surface
/// (score = -distance).
pub fn search_boolean_phrase(query: &Query, index: &PositionalIndex, limit: usize) -> Vec<Candidate> {
    if query.lemmas.is_empty() {
        return Vec::new();
    }
    let surface = query.folded_surface();
    let n = query.lemmas.len();
    let mut out: Vec<Candidate> = index
        .phrase_matches(&query.lemmas)
        .into_iter()
        .map(|p| {
            let doc = index.doc(p.doc);
            let first = p.position as usize;
            let (start, end) = doc.token_range_span(first, first + n - 1);
            let text = doc.slice(start, end);
            let dist = edit_distance(&fold_case(text), &surface, TextMode::Char);
            Candidate {
                doc_id: doc.doc_id.clone(),
                char_start: start,
                char_end: end,
                matched_text: text.to_string(),
                score: 0.0 - dist as f64,
                method: Method::BooleanPhrase,
            }
        })
        .collect();
    sort_by_score(&mut out);
    out.truncate(limit);
    out
}
