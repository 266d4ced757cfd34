//! From gazetteer entities to a BIO-tagged, split sentence corpus.
//!
//! Each entity is looked up with the configured retrieval method; every hit
//! is mapped to the sentence containing its start, hits landing in the same
//! sentence are merged, and the surviving mentions are projected to tags.

mod merge;
mod methods;
mod split;

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{bracket_mentions, Corpus, EntityType, Split};
use crate::index::TokenRange;
use crate::ingest::Normalizer;
use crate::rerank::RerankError;
use crate::retrieval::{Query, DEFAULT_LIMIT};

pub use merge::{extract_occurrence, merge_occurrences, Extraction};
pub use methods::{RetrievalParams, Retriever, RrfWiring, Selector};
pub use split::{split_corpus, SplitRatios};

#[derive(Debug, Error)]
pub enum BootstrapError {
    #[error("gazetteer line {line}: {reason}")]
    Gazetteer { line: usize, reason: String },
    #[error("duplicate entity id `{0}`")]
    DuplicateEntityId(String),
    #[error("span {start}..{end} is outside document `{doc}`")]
    SpanOutOfRange { doc: String, start: usize, end: usize },
    #[error("unknown document `{0}`")]
    UnknownDocument(String),
    #[error("no phrase index for token range {}..={}", .0.min, .0.max)]
    MissingPhraseIndex(TokenRange),
    #[error("no embedding store named `{0}`")]
    UnknownEmbeddingStore(String),
    #[error(transparent)]
    Rerank(#[from] RerankError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl BootstrapError {
    pub fn name(&self) -> &'static str {
        match self {
            BootstrapError::Gazetteer { .. } => "GazetteerParseError",
            BootstrapError::DuplicateEntityId(_) => "DuplicateEntityId",
            BootstrapError::SpanOutOfRange { .. } => "SpanOutOfRange",
            BootstrapError::UnknownDocument(_) => "UnknownDocument",
            BootstrapError::MissingPhraseIndex(_) => "MissingPhraseIndex",
            BootstrapError::UnknownEmbeddingStore(_) => "UnknownEmbeddingStore",
            BootstrapError::Rerank(e) => e.name(),
            BootstrapError::Config(_) => "ConfigError",
            BootstrapError::Io(_) => "IoError",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GazetteerEntry {
    pub entity_id: String,
    pub surface: String,
    pub entity_type: EntityType,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
}

impl Gazetteer {
    pub fn new(entries: Vec<GazetteerEntry>) -> Result<Self, BootstrapError> {
        let mut seen = HashSet::new();
        for (i, e) in entries.iter().enumerate() {
            if e.surface.trim().is_empty() {
                return Err(BootstrapError::Gazetteer {
                    line: i + 1,
                    reason: format!("entity `{}` has an empty surface", e.entity_id),
                });
            }
            if !seen.insert(e.entity_id.as_str()) {
                return Err(BootstrapError::DuplicateEntityId(e.entity_id.clone()));
            }
        }
        Ok(Self { entries })
    }

    /// Parse `entity_id\tentity_type\tsurface` lines. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn read<R: BufRead>(r: R) -> Result<Self, BootstrapError> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| BootstrapError::Gazetteer { line: line_no, reason };
            let fields: Vec<&str> = line.split('\t').collect();
            let [id, ty, surface] = fields[..] else {
                return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
            };
            let entity_type: EntityType = ty.parse().map_err(err)?;
            if surface.trim().is_empty() {
                return Err(err("empty surface".into()));
            }
            if id.is_empty() {
                return Err(err("empty entity id".into()));
            }
            if !seen.insert(id.to_string()) {
                return Err(BootstrapError::DuplicateEntityId(id.to_string()));
            }
            entries.push(GazetteerEntry { entity_id: id.to_string(), surface: surface.to_string(), entity_type });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by entity id.
    pub fn sorted(&self) -> Vec<&GazetteerEntry> {
        let mut out: Vec<&GazetteerEntry> = self.entries.iter().collect();
        out.sort_by(|a, b| a.entity_id.cmp(&b.entity_id));
        out
    }

    pub fn queries(&self, normalizer: &Normalizer) -> Vec<Query> {
        self.sorted()
            .into_iter()
            .map(|e| Query::new(e.entity_id.clone(), e.surface.clone(), e.entity_type, normalizer))
            .collect()
    }

    /// Phrase-index token ranges needed to serve BM25 for every entry.
    pub fn phrase_ranges(&self, slack: usize) -> Vec<TokenRange> {
        let mut ranges: Vec<TokenRange> =
            self.entries.iter().map(|e| TokenRange::around(crate::ingest::tokenize(&e.surface).len(), slack)).collect();
        ranges.sort();
        ranges.dedup();
        ranges
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    pub selector: Selector,
    pub candidate_limit: usize,
    pub split_ratios: SplitRatios,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            selector: Selector::BooleanPhrase,
            candidate_limit: DEFAULT_LIMIT,
            split_ratios: SplitRatios::default(),
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<(), BootstrapError> {
        if self.candidate_limit == 0 {
            return Err(BootstrapError::Config("candidate_limit must be at least 1".into()));
        }
        Ok(())
    }
}

/// Retrieve, extract, merge and split. Retrieval runs in parallel per entity;
/// the reduce is sequential in entity-id order, so the result only depends
/// on the inputs and the seed.
pub fn bootstrap_corpus(
    name: &str,
    gazetteer: &Gazetteer,
    retriever: &Retriever<'_>,
    config: &BootstrapConfig,
) -> Result<Corpus, BootstrapError> {
    config.validate()?;
    let queries = gazetteer.queries(retriever.normalizer());
    let per_entity: Vec<Result<Vec<Extraction>, BootstrapError>> = queries
        .par_iter()
        .map(|q| {
            let mut hits = retriever.run(q, &config.selector)?;
            hits.truncate(config.candidate_limit);
            hits.iter()
                .map(|c| {
                    let doc = retriever
                        .collection()
                        .get(&c.doc_id)
                        .ok_or_else(|| BootstrapError::UnknownDocument(c.doc_id.clone()))?;
                    extract_occurrence(doc, c.char_start, c.char_end, q.entity_type)
                })
                .collect()
        })
        .collect();
    let mut extractions = Vec::new();
    for r in per_entity {
        extractions.extend(r?);
    }
    let mut corpus = Corpus::new(name);
    for s in merge_occurrences(retriever.collection(), &extractions) {
        corpus.push(s, Split::Unassigned);
    }
    Ok(split_corpus(corpus, config.split_ratios, config.seed))
}

/// One block per test-split sentence: `# <sentence_id>`, then the text with
/// each mention shown as `[span]TYPE`, then a blank line.
pub fn write_review<W: Write>(mut w: W, corpus: &Corpus) -> std::io::Result<()> {
    for s in corpus.split(Split::Test) {
        writeln!(w, "# {}", s.sentence_id)?;
        writeln!(w, "{}", bracket_mentions(&s.text, &s.mentions()))?;
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gazetteer_parsing() {
        let g = Gazetteer::read("# comment\nE2\tLOC\tKralupy\n\nE1\tPER\tJan z Kralup\n".as_bytes()).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.sorted()[0].entity_id, "E1");
        assert_eq!(g.entries()[0].entity_type, EntityType::Loc);
        assert_eq!(g.phrase_ranges(1), vec![TokenRange::new(1, 2), TokenRange::new(2, 4)]);

        let dup = Gazetteer::read("E1\tLOC\tA\nE1\tPER\tB\n".as_bytes()).unwrap_err();
        assert_eq!(dup.name(), "DuplicateEntityId");
        let bad = Gazetteer::read("E1\tORG\tA\n".as_bytes()).unwrap_err();
        assert!(matches!(bad, BootstrapError::Gazetteer { line: 1, .. }));
        assert!(Gazetteer::read("E1\tPER\t \n".as_bytes()).is_err());
        assert!(Gazetteer::read("E1\tPER\n".as_bytes()).is_err());
    }

    #[test]
    fn config_rejects_zero_limit() {
        let c = BootstrapConfig { candidate_limit: 0, ..BootstrapConfig::default() };
        assert!(c.validate().is_err());
        assert_eq!(BootstrapConfig::default().selector, Selector::BooleanPhrase);
    }
}
