//! Candidate generation for gazetteer entities.
//!
//! Four techniques each return a ranked [`Candidate`] list capped at a limit:
//! Jaccard-scored length windows, BM25 over phrase units, boolean phrase
//! queries over lemmas, and approximate (edit-distance bounded) substring
//! search. Ties are always broken by `(doc_id, char_start, char_end)`.

mod distance;
mod fuzzy;
mod search;

use std::cmp::Ordering;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::corpus::EntityType;
use crate::ingest::{tokenize, Normalizer};
use crate::text::fold_case;

pub use distance::{edit_distance, jaccard_similarity, levenshtein, TextMode};
pub use fuzzy::{default_max_edits, search_fuzzy_regex};
pub use search::{search_bm25, search_boolean_phrase, search_jaccard};

/// Default cap on candidates per entity and method.
pub const DEFAULT_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Jaccard,
    Bm25,
    BooleanPhrase,
    FuzzyRegex,
    EditRerank,
    EmbeddingRerank,
    Rrf,
    Concat,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Jaccard,
        Method::Bm25,
        Method::BooleanPhrase,
        Method::FuzzyRegex,
        Method::EditRerank,
        Method::EmbeddingRerank,
        Method::Rrf,
        Method::Concat,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Jaccard => "jaccard",
            Method::Bm25 => "bm25",
            Method::BooleanPhrase => "boolean_phrase",
            Method::FuzzyRegex => "fuzzy_regex",
            Method::EditRerank => "edit_rerank",
            Method::EmbeddingRerank => "embedding_rerank",
            Method::Rrf => "rrf",
            Method::Concat => "concat",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL.iter().copied().find(|m| m.as_str() == s).ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// Identity of a hit: the same occurrence found by different methods.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpanKey {
    pub doc_id: String,
    pub char_start: usize,
    pub char_end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub doc_id: String,
    /// Document-level character offsets.
    pub char_start: usize,
    pub char_end: usize,
    pub matched_text: String,
    /// Higher is better.
    pub score: f64,
    pub method: Method,
}

impl Candidate {
    pub fn key(&self) -> SpanKey {
        SpanKey { doc_id: self.doc_id.clone(), char_start: self.char_start, char_end: self.char_end }
    }

    pub fn overlaps(&self, other: &Candidate) -> bool {
        self.doc_id == other.doc_id && self.char_start < other.char_end && other.char_start < self.char_end
    }

    /// The global tie-break: doc id, then start, then end.
    pub fn position_cmp(&self, other: &Candidate) -> Ordering {
        self.doc_id
            .cmp(&other.doc_id)
            .then(self.char_start.cmp(&other.char_start))
            .then(self.char_end.cmp(&other.char_end))
    }
}

/// Sort by descending score, then by position.
pub fn sort_by_score(candidates: &mut [Candidate]) {
    candidates.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.position_cmp(b)));
}

/// A gazetteer entity prepared for retrieval.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub entity_id: String,
    pub surface: String,
    pub entity_type: EntityType,
    pub tokens: Vec<String>,
    pub lemmas: Vec<String>,
}

impl Query {
    /// Panics if `surface` is empty.
    pub fn new(
        entity_id: impl Into<String>,
        surface: impl Into<String>,
        entity_type: EntityType,
        normalizer: &Normalizer,
    ) -> Self {
        let surface = surface.into();
        assert!(!surface.trim().is_empty(), "query surface must be non-empty");
        let tokens: Vec<String> = tokenize(&surface).into_iter().map(|t| t.text).collect();
        let lemmas = tokens.iter().map(|t| normalizer.normalize(t)).collect();
        Self { entity_id: entity_id.into(), surface, entity_type, tokens, lemmas }
    }

    pub fn folded_surface(&self) -> String {
        fold_case(&self.surface)
    }
}

/// Write candidates as `entity_id\tmethod\tdoc_id\tchar_start\tchar_end\tscore\tmatched_text`.
pub fn write_candidates<W: Write>(mut w: W, entity_id: &str, candidates: &[Candidate]) -> std::io::Result<()> {
    for c in candidates {
        writeln!(
            w,
            "{entity_id}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.method,
            c.doc_id,
            c.char_start,
            c.char_end,
            c.score,
            c.matched_text.replace(['\t', '\n', '\r'], " ")
        )?;
    }
    Ok(())
}

/// Read a candidate TSV back as `(entity_id, candidate)` records.
pub fn read_candidates<R: BufRead>(r: R) -> Result<Vec<(String, Candidate)>, String> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.splitn(7, '\t').collect();
        let err = |what: &str| format!("line {}: {what}", i + 1);
        if f.len() != 7 {
            return Err(err("expected 7 tab-separated fields"));
        }
        out.push((
            f[0].to_string(),
            Candidate {
                method: f[1].parse().map_err(|e: String| err(&e))?,
                doc_id: f[2].to_string(),
                char_start: f[3].parse().map_err(|_| err("bad char_start"))?,
                char_end: f[4].parse().map_err(|_| err("bad char_end"))?,
                score: f[5].parse().map_err(|_| err("bad score"))?,
                matched_text: f[6].to_string(),
            },
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(doc: &str, a: usize, b: usize, score: f64) -> Candidate {
        Candidate {
            doc_id: doc.into(),
            char_start: a,
            char_end: b,
            matched_text: "x".into(),
            score,
            method: Method::Bm25,
        }
    }

    #[test]
    fn tie_break_order() {
        let mut v = vec![
            cand("b", 0, 1, 1.0),
            cand("a", 5, 6, 1.0),
            cand("a", 2, 4, 1.0),
            cand("a", 2, 3, 1.0),
            cand("z", 0, 1, 2.0),
        ];
        sort_by_score(&mut v);
        let keys: Vec<(&str, usize, usize)> = v.iter().map(|c| (c.doc_id.as_str(), c.char_start, c.char_end)).collect();
        assert_eq!(keys, [("z", 0, 1), ("a", 2, 3), ("a", 2, 4), ("a", 5, 6), ("b", 0, 1)]);
    }

    #[test]
    fn tsv_round_trip() {
        let mut c = cand("p1", 3, 9, -1.0);
        c.method = Method::BooleanPhrase;
        c.matched_text = "Kralup y".into();
        let mut buf = Vec::new();
        write_candidates(&mut buf, "e7", &[c.clone()]).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "e7\tboolean_phrase\tp1\t3\t9\t-1\tKralup y\n");
        assert_eq!(read_candidates(buf.as_slice()).unwrap(), vec![("e7".to_string(), c)]);
    }

    #[test]
    fn query_lemmas() {
        let q = Query::new("e1", "Jan z Kralup", EntityType::Per, &Normalizer::with_default_rules());
        assert_eq!(q.tokens, ["Jan", "z", "Kralup"]);
        assert_eq!(q.lemmas, ["jan", "z", "kralup"]);
        assert_eq!(Method::from_str("rrf"), Ok(Method::Rrf));
    }
}
