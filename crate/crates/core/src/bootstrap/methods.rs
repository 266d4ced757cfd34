use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::BootstrapError;
use crate::index::{Bm25Params, IndexSet, LengthWindow, TokenRange};
use crate::ingest::{DocumentCollection, Normalizer};
use crate::rerank::{fuse_concat, fuse_rrf, rerank_edit_distance, rerank_embedding, EmbeddingStore, FusionConfig};
use crate::retrieval::{
    default_max_edits, search_bm25, search_boolean_phrase, search_fuzzy_regex, search_jaccard, Candidate, Query,
    DEFAULT_LIMIT,
};

/// A retrieval technique, reranker or fusion to run per entity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Selector {
    Jaccard,
    Bm25,
    BooleanPhrase,
    FuzzyRegex,
    EditRerank,
    /// Rerank with the named embedding store.
    Embedding(String),
    Rrf,
    Concat,
}

impl Selector {
    pub const FAST: [Selector; 4] = [Selector::Jaccard, Selector::Bm25, Selector::BooleanPhrase, Selector::FuzzyRegex];
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Jaccard => f.write_str("jaccard"),
            Selector::Bm25 => f.write_str("bm25"),
            Selector::BooleanPhrase => f.write_str("boolean_phrase"),
            Selector::FuzzyRegex => f.write_str("fuzzy_regex"),
            Selector::EditRerank => f.write_str("edit_rerank"),
            Selector::Embedding(name) => write!(f, "embedding_rerank:{name}"),
            Selector::Rrf => f.write_str("rrf"),
            Selector::Concat => f.write_str("concat"),
        }
    }
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(name) = s.strip_prefix("embedding_rerank:") {
            if name.is_empty() {
                return Err("embedding_rerank needs a store name".into());
            }
            return Ok(Selector::Embedding(name.to_string()));
        }
        Ok(match s {
            "jaccard" => Selector::Jaccard,
            "bm25" => Selector::Bm25,
            "boolean_phrase" => Selector::BooleanPhrase,
            "fuzzy_regex" => Selector::FuzzyRegex,
            "edit_rerank" => Selector::EditRerank,
            "rrf" => Selector::Rrf,
            "concat" => Selector::Concat,
            other => return Err(format!("unknown method `{other}`")),
        })
    }
}

/// Which lists reciprocal rank fusion combines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RrfWiring {
    /// The four retrieval lists plus every reranked list.
    #[default]
    All,
    /// The four retrieval lists only.
    Fast,
}

impl FromStr for RrfWiring {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(RrfWiring::All),
            "fast" => Ok(RrfWiring::Fast),
            other => Err(format!("unknown rrf wiring `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrievalParams {
    pub limit: usize,
    pub jaccard_tolerance: f64,
    pub jaccard_stride: usize,
    /// BM25 phrase units span the query length ± this many tokens.
    pub phrase_slack: usize,
    /// Fuzzy search threshold; `None` uses one edit per five characters.
    pub max_edits: Option<usize>,
    pub bm25: Bm25Params,
    pub fusion: FusionConfig,
    pub rrf_wiring: RrfWiring,
}

impl Default for RetrievalParams {
    fn default() -> Self {
        Self {
            limit: DEFAULT_LIMIT,
            jaccard_tolerance: LengthWindow::DEFAULT_TOLERANCE,
            jaccard_stride: 1,
            phrase_slack: 1,
            max_edits: None,
            bm25: Bm25Params::default(),
            fusion: FusionConfig::default(),
            rrf_wiring: RrfWiring::All,
        }
    }
}

impl RetrievalParams {
    pub fn validate(&self) -> Result<(), BootstrapError> {
        let err = |m: &str| Err(BootstrapError::Config(m.to_string()));
        if self.limit == 0 {
            return err("limit must be at least 1");
        }
        if self.jaccard_stride == 0 {
            return err("jaccard_stride must be at least 1");
        }
        LengthWindow::new(1, self.jaccard_tolerance).map_err(BootstrapError::Config)?;
        Ok(())
    }
}

/// Everything needed to run any selector for a query.
pub struct Retriever<'a> {
    collection: &'a DocumentCollection,
    indexes: &'a IndexSet,
    normalizer: &'a Normalizer,
    embeddings: &'a [(String, EmbeddingStore)],
    params: RetrievalParams,
}

impl<'a> Retriever<'a> {
    pub fn new(
        collection: &'a DocumentCollection,
        indexes: &'a IndexSet,
        normalizer: &'a Normalizer,
        embeddings: &'a [(String, EmbeddingStore)],
        params: RetrievalParams,
    ) -> Result<Self, BootstrapError> {
        params.validate()?;
        Ok(Self { collection, indexes, normalizer, embeddings, params })
    }

    pub fn collection(&self) -> &DocumentCollection {
        self.collection
    }

    pub fn normalizer(&self) -> &Normalizer {
        self.normalizer
    }

    pub fn params(&self) -> &RetrievalParams {
        &self.params
    }

    /// Every selector this retriever can serve, in report order.
    pub fn roster(&self) -> Vec<Selector> {
        let mut out = Selector::FAST.to_vec();
        out.push(Selector::EditRerank);
        out.extend(self.embeddings.iter().map(|(n, _)| Selector::Embedding(n.clone())));
        out.push(Selector::Rrf);
        out.push(Selector::Concat);
        out
    }

    pub fn run(&self, query: &Query, selector: &Selector) -> Result<Vec<Candidate>, BootstrapError> {
        let limit = self.params.limit;
        let mut out = match selector {
            Selector::Jaccard => {
                search_jaccard(query, self.collection, self.params.jaccard_tolerance, self.params.jaccard_stride, limit)
            }
            Selector::Bm25 => {
                let range = TokenRange::around(query.tokens.len(), self.params.phrase_slack);
                let index = self.indexes.phrase_index(range).ok_or(BootstrapError::MissingPhraseIndex(range))?;
                search_bm25(query, index, limit)
            }
            Selector::BooleanPhrase => search_boolean_phrase(query, &self.indexes.positional, limit),
            Selector::FuzzyRegex => {
                let k = self.params.max_edits.unwrap_or_else(|| default_max_edits(&query.surface));
                search_fuzzy_regex(query, self.collection, k, limit)
            }
            Selector::EditRerank => rerank_edit_distance(query, &self.pool(query)?),
            Selector::Embedding(name) => {
                let store = self.store(name)?;
                rerank_embedding(query, &self.pool(query)?, store)?
            }
            Selector::Rrf => self.rrf(query)?,
            Selector::Concat => {
                let fuzzy = self.run(query, &Selector::FuzzyRegex)?;
                fuse_concat(&fuzzy, &self.rrf(query)?)
            }
        };
        out.truncate(limit);
        Ok(out)
    }

    /// Run the whole roster, sharing the retrieval lists between the
    /// rerankers and fusions.
    pub fn run_all(&self, query: &Query) -> Result<Vec<(Selector, Vec<Candidate>)>, BootstrapError> {
        let limit = self.params.limit;
        let fast: Vec<Vec<Candidate>> = Selector::FAST.iter().map(|s| self.run(query, s)).collect::<Result<_, _>>()?;
        let pool = union(&fast);
        let mut reranked = vec![truncated(rerank_edit_distance(query, &pool), limit)];
        for (_, store) in self.embeddings {
            reranked.push(truncated(rerank_embedding(query, &pool, store)?, limit));
        }
        let rrf = truncated(self.fuse(&fast, &reranked), limit);
        let concat = truncated(fuse_concat(&fast[3], &rrf), limit);
        let lists = fast.into_iter().chain(reranked).chain([rrf, concat]);
        Ok(self.roster().into_iter().zip(lists).collect())
    }

    fn store(&self, name: &str) -> Result<&EmbeddingStore, BootstrapError> {
        self.embeddings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| BootstrapError::UnknownEmbeddingStore(name.to_string()))
    }

    /// Union of the four retrieval lists, first occurrence kept, in list order.
    fn pool(&self, query: &Query) -> Result<Vec<Candidate>, BootstrapError> {
        let fast: Vec<Vec<Candidate>> = Selector::FAST.iter().map(|s| self.run(query, s)).collect::<Result<_, _>>()?;
        Ok(union(&fast))
    }

    fn rrf(&self, query: &Query) -> Result<Vec<Candidate>, BootstrapError> {
        let fast: Vec<Vec<Candidate>> = Selector::FAST.iter().map(|s| self.run(query, s)).collect::<Result<_, _>>()?;
        let mut reranked = Vec::new();
        if self.params.rrf_wiring == RrfWiring::All {
            let pool = union(&fast);
            reranked.push(truncated(rerank_edit_distance(query, &pool), self.params.limit));
            for (_, store) in self.embeddings {
                reranked.push(truncated(rerank_embedding(query, &pool, store)?, self.params.limit));
            }
        }
        Ok(self.fuse(&fast, &reranked))
    }

    fn fuse(&self, fast: &[Vec<Candidate>], reranked: &[Vec<Candidate>]) -> Vec<Candidate> {
        let mut lists: Vec<Vec<Candidate>> = fast.to_vec();
        if self.params.rrf_wiring == RrfWiring::All {
            lists.extend(reranked.iter().cloned());
        }
        fuse_rrf(&lists, self.params.fusion)
    }
}

fn union(lists: &[Vec<Candidate>]) -> Vec<Candidate> {
    let mut seen = HashSet::new();
    lists.iter().flatten().filter(|c| seen.insert(c.key())).cloned().collect()
}

fn truncated(mut v: Vec<Candidate>, limit: usize) -> Vec<Candidate> {
    v.truncate(limit);
    v
}
