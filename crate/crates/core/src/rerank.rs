//! Rerankers and rank fusion over candidate lists.
//!
//! Rerankers are permutations: they never add or drop candidates. Fusion
//! merges lists that may share occurrences, identified by
//! `(doc_id, char_start, char_end)`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::BufRead;

use thiserror::Error;

use crate::retrieval::{edit_distance, Candidate, Method, Query, SpanKey, TextMode};
use crate::text::fold_case;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RerankError {
    #[error("no embedding for query `{0}`")]
    MissingQueryEmbedding(String),
    #[error("embedding file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("embedding file line {line}: dimension {found}, expected {expected}")]
    DimensionMismatch { line: usize, found: usize, expected: usize },
}

impl RerankError {
    pub fn name(&self) -> &'static str {
        match self {
            RerankError::MissingQueryEmbedding(_) => "MissingQueryEmbedding",
            RerankError::Parse { .. } => "EmbeddingParseError",
            RerankError::DimensionMismatch { .. } => "DimensionMismatch",
        }
    }
}

/// Precomputed text embeddings, keyed by the exact text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    pub fn new(dim: usize) -> Self {
        Self { dim, vectors: HashMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Panics on a dimension mismatch or a non-finite component.
    pub fn insert(&mut self, key: impl Into<String>, vector: Vec<f64>) {
        assert_eq!(vector.len(), self.dim, "embedding dimension");
        assert!(vector.iter().all(|v| v.is_finite()), "embedding must be finite");
        self.vectors.insert(key.into(), vector);
    }

    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.vectors.get(key).map(Vec::as_slice)
    }

    /// Parse `key\tv1 v2 ... vd` lines; the first record fixes the dimension.
    pub fn read<R: BufRead>(r: R) -> Result<Self, RerankError> {
        let mut store: Option<EmbeddingStore> = None;
        for (i, line) in r.lines().enumerate() {
            let line_no = i + 1;
            let parse = |reason: String| RerankError::Parse { line: line_no, reason };
            let line = line.map_err(|e| parse(e.to_string()))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (key, values) = line.rsplit_once('\t').ok_or_else(|| parse("expected `key\\tvector`".into()))?;
            let vector = values
                .split_whitespace()
                .map(|v| v.parse::<f64>().map_err(|_| parse(format!("bad number `{v}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            if vector.is_empty() {
                return Err(parse("empty vector".into()));
            }
            if vector.iter().any(|v| !v.is_finite()) {
                return Err(parse("non-finite component".into()));
            }
            let s = store.get_or_insert_with(|| EmbeddingStore::new(vector.len()));
            if vector.len() != s.dim {
                return Err(RerankError::DimensionMismatch { line: line_no, found: vector.len(), expected: s.dim });
            }
            s.vectors.insert(key.to_string(), vector);
        }
        Ok(store.unwrap_or_default())
    }
}

/// Cosine similarity; zero vectors have similarity 0.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Stable sort by (word edit distance, char edit distance) to the surface,
/// both case-folded. The score encodes the same order: `-(w + c/(c+1))`.
pub fn rerank_edit_distance(query: &Query, candidates: &[Candidate]) -> Vec<Candidate> {
    let surface = query.folded_surface();
    let mut keyed: Vec<((usize, usize), Candidate)> = candidates
        .iter()
        .map(|c| {
            let text = fold_case(&c.matched_text);
            let w = edit_distance(&text, &surface, TextMode::Word);
            let ch = edit_distance(&text, &surface, TextMode::Char);
            let mut c = c.clone();
            c.score = -(w as f64 + ch as f64 / (ch as f64 + 1.0));
            c.method = Method::EditRerank;
            ((w, ch), c)
        })
        .collect();
    keyed.sort_by_key(|(k, _)| *k);
    keyed.into_iter().map(|(_, c)| c).collect()
}

/// Stable sort by descending cosine similarity between the query surface's
/// vector and each candidate text's vector. Candidates without a vector keep
/// their relative order after all embedded ones (score -2, below any cosine).
pub fn rerank_embedding(
    query: &Query,
    candidates: &[Candidate],
    store: &EmbeddingStore,
) -> Result<Vec<Candidate>, RerankError> {
    let qv = store.get(&query.surface).ok_or_else(|| RerankError::MissingQueryEmbedding(query.surface.clone()))?;
    let mut scored: Vec<Candidate> = candidates
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.score = store.get(&c.matched_text).map(|v| cosine(qv, v)).unwrap_or(-2.0);
            c.method = Method::EmbeddingRerank;
            c
        })
        .collect();
    scored.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(scored)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionConfig {
    pub rrf_k: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self { rrf_k: 60.0 }
    }
}

impl FusionConfig {
    pub fn new(rrf_k: f64) -> Result<Self, String> {
        if rrf_k > 0.0 && rrf_k.is_finite() {
            Ok(Self { rrf_k })
        } else {
            Err(format!("rrf_k must be positive, got {rrf_k}"))
        }
    }
}

/// Reciprocal rank fusion: each occurrence scores Σ 1/(k + rank) over the
/// lists containing it (ranks from 1, lists summed in input order).
pub fn fuse_rrf(lists: &[Vec<Candidate>], config: FusionConfig) -> Vec<Candidate> {
    let mut fused: BTreeMap<SpanKey, Candidate> = BTreeMap::new();
    for list in lists {
        for (i, c) in list.iter().enumerate() {
            let contribution = 1.0 / (config.rrf_k + (i + 1) as f64);
            fused.entry(c.key()).and_modify(|f| f.score += contribution).or_insert_with(|| Candidate {
                score: contribution,
                method: Method::Rrf,
                ..c.clone()
            });
        }
    }
    // BTreeMap iteration is in key order, so a stable score sort leaves ties by key
    let mut out: Vec<Candidate> = fused.into_values().collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score));
    out
}

/// Fuzzy-regex results first, then RRF results that neither repeat a fuzzy
/// occurrence nor overlap one in the same document. Scores are replaced by
/// `len - position` so they follow the output order.
pub fn fuse_concat(fuzzy: &[Candidate], rrf: &[Candidate]) -> Vec<Candidate> {
    let mut seen: HashSet<SpanKey> = HashSet::new();
    let mut out: Vec<Candidate> = Vec::new();
    for c in fuzzy {
        if seen.insert(c.key()) {
            out.push(c.clone());
        }
    }
    let n_fuzzy = out.len();
    for c in rrf {
        if out[..n_fuzzy].iter().any(|f| f.overlaps(c)) {
            continue;
        }
        if seen.insert(c.key()) {
            out.push(c.clone());
        }
    }
    let n = out.len();
    for (i, c) in out.iter_mut().enumerate() {
        c.score = (n - i) as f64;
        c.method = Method::Concat;
    }
    out
}
