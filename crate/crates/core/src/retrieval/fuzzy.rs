//! Approximate substring search with an edit-distance threshold.
//!
//! A *match* is a substring `T[s..e)` of a document, neither starting nor
//! ending on whitespace, whose case-folded character edit distance to the
//! query surface is at most `max_edits`. Matches that overlap are reduced to
//! one per occurrence: candidates are visited in order of (distance,
//! |length - query length|, start, end) and each is kept only if it does not
//! overlap an already kept match.
//!
//! Candidate end positions come from a Sellers-style forward DP (pattern
//! prefix vs. any text suffix); for each such end a reverse DP over the
//! bounded window recovers every start whose substring is within the
//! threshold.

use super::{Candidate, Method, Query};
use crate::ingest::DocumentCollection;
use crate::text::fold_char;

/// One error allowed per five characters of the surface.
pub fn default_max_edits(surface: &str) -> usize {
    surface.chars().count().div_ceil(5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Hit {
    start: usize,
    end: usize,
    dist: usize,
}

pub fn search_fuzzy_regex(
    query: &Query,
    collection: &DocumentCollection,
    max_edits: usize,
    limit: usize,
) -> Vec<Candidate> {
    let pattern: Vec<char> = query.surface.chars().map(fold_char).collect();
    if pattern.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for doc in collection.sorted_docs() {
        let text: Vec<char> = doc.text().chars().map(fold_char).collect();
        for hit in select_non_overlapping(find_matches(&text, &pattern, max_edits), pattern.len()) {
            out.push(Candidate {
                doc_id: doc.doc_id.clone(),
                char_start: hit.start,
                char_end: hit.end,
                matched_text: doc.slice(hit.start, hit.end).to_string(),
                score: 0.0 - hit.dist as f64,
                method: Method::FuzzyRegex,
            });
        }
    }
    // ascending distance, then position
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.position_cmp(b)));
    out.truncate(limit);
    out
}

fn find_matches(text: &[char], pattern: &[char], k: usize) -> Vec<Hit> {
    let m = pattern.len();
    let n = text.len();
    let mut hits = Vec::new();
    if n == 0 {
        return hits;
    }
    // col[i] = min distance between pattern[..i] and a suffix of text[..e]
    let mut col: Vec<usize> = (0..=m).collect();
    let mut next = vec![0; m + 1];
    let mut rev = vec![vec![0usize; m + k + 1]; m + 1];
    for e in 1..=n {
        let c = text[e - 1];
        next[0] = 0;
        for i in 1..=m {
            let sub = col[i - 1] + usize::from(pattern[i - 1] != c);
            next[i] = sub.min(col[i] + 1).min(next[i - 1] + 1);
        }
        std::mem::swap(&mut col, &mut next);
        if col[m] > k || c.is_whitespace() {
            continue;
        }
        // reverse DP: rev[i][l] = ed(pattern[m-i..], text[e-l..e])
        let max_len = (m + k).min(e);
        for (i, row) in rev.iter_mut().enumerate() {
            row[0] = i;
        }
        for l in 1..=max_len {
            rev[0][l] = l;
            let tc = text[e - l];
            for i in 1..=m {
                let sub = rev[i - 1][l - 1] + usize::from(pattern[m - i] != tc);
                rev[i][l] = sub.min(rev[i - 1][l] + 1).min(rev[i][l - 1] + 1);
            }
        }
        for l in 1..=max_len {
            let d = rev[m][l];
            if d <= k && !text[e - l].is_whitespace() {
                hits.push(Hit { start: e - l, end: e, dist: d });
            }
        }
    }
    hits
}

fn select_non_overlapping(mut hits: Vec<Hit>, pattern_len: usize) -> Vec<Hit> {
    hits.sort_by_key(|h| (h.dist, (h.end - h.start).abs_diff(pattern_len), h.start, h.end));
    let mut kept: Vec<Hit> = Vec::new();
    for h in hits {
        if kept.iter().all(|k| h.end <= k.start || k.end <= h.start) {
            kept.push(h);
        }
    }
    kept
}
