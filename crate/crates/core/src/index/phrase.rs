use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{doc_table, DocTable, IndexedDoc};
use crate::ingest::{Document, DocumentCollection, Normalizer};

/// `(doc, token_start, char_start, char_end, lemmas)` before vocabulary ids exist.
type RawUnit = (u32, u32, usize, usize, Vec<String>);

/// Inclusive range of phrase lengths in tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenRange {
    pub min: usize,
    pub max: usize,
}

impl TokenRange {
    pub fn new(min: usize, max: usize) -> Self {
        Self { min, max }
    }

    /// `n ± slack`, never below one token.
    pub fn around(n: usize, slack: usize) -> Self {
        Self { min: n.saturating_sub(slack).max(1), max: n + slack }
    }

    pub fn is_empty(&self) -> bool {
        self.min == 0 || self.min > self.max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn new(k1: f64, b: f64) -> Result<Self, String> {
        if k1.is_nan() || k1 <= 0.0 || !(0.0..=1.0).contains(&b) {
            return Err(format!("BM25 parameters out of range: k1={k1}, b={b}"));
        }
        Ok(Self { k1, b })
    }
}

/// Okapi BM25 for one unit. `matches` holds `(tf, df)` for each query term
/// (terms absent from the unit contribute nothing).
pub fn bm25_score(matches: &[(u32, u32)], unit_len: f64, avgdl: f64, n_units: usize, params: Bm25Params) -> f64 {
    let n = n_units as f64;
    let norm = params.k1 * (1.0 - params.b + params.b * unit_len / avgdl);
    matches
        .iter()
        .filter(|(tf, _)| *tf > 0)
        .map(|&(tf, df)| {
            let tf = tf as f64;
            let df = df as f64;
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            idf * tf * (params.k1 + 1.0) / (tf + norm)
        })
        .sum()
}

/// One retrieval unit: a token n-gram inside a sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseUnit {
    pub doc: u32,
    pub token_start: u32,
    pub len: u32,
    pub char_start: usize,
    pub char_end: usize,
    /// Term id → term frequency, sorted by term id.
    pub bag: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhraseIndex {
    pub(crate) docs: DocTable,
    pub(crate) range: TokenRange,
    pub(crate) params: Bm25Params,
    pub(crate) vocab: BTreeMap<String, u32>,
    pub(crate) units: Vec<PhraseUnit>,
    /// Per term id: `(unit, tf)` postings sorted by unit.
    pub(crate) postings: Vec<Vec<(u32, u32)>>,
    pub(crate) avgdl: f64,
}

impl PhraseIndex {
    /// Every n-gram with `n` in `range` that stays inside one sentence
    /// becomes a unit; terms are token lemmas.
    pub fn build(
        collection: &DocumentCollection,
        range: TokenRange,
        params: Bm25Params,
        normalizer: &Normalizer,
    ) -> Self {
        let sorted = collection.sorted_docs();
        let docs = doc_table(&sorted);
        Self::build_with_docs(&sorted, docs, range, params, normalizer)
    }

    pub(crate) fn build_with_docs(
        sorted: &[&Document],
        docs: DocTable,
        range: TokenRange,
        params: Bm25Params,
        normalizer: &Normalizer,
    ) -> Self {
        let per_doc: Vec<Vec<RawUnit>> = if range.is_empty() {
            Vec::new()
        } else {
            sorted.par_iter().enumerate().map(|(dn, d)| doc_units(dn as u32, d, range, normalizer)).collect()
        };

        let mut vocab: BTreeMap<String, u32> = BTreeMap::new();
        for units in &per_doc {
            for (.., terms) in units {
                for t in terms {
                    vocab.entry(t.clone()).or_insert(0);
                }
            }
        }
        for (i, id) in vocab.values_mut().enumerate() {
            *id = i as u32;
        }

        let mut units = Vec::new();
        let mut postings: Vec<Vec<(u32, u32)>> = vec![Vec::new(); vocab.len()];
        for (doc, token_start, char_start, char_end, terms) in per_doc.into_iter().flatten() {
            let mut counts: HashMap<u32, u32> = HashMap::new();
            for t in &terms {
                *counts.entry(vocab[t]).or_default() += 1;
            }
            let mut bag: Vec<(u32, u32)> = counts.into_iter().collect();
            bag.sort_unstable();
            let uid = units.len() as u32;
            for &(term, tf) in &bag {
                postings[term as usize].push((uid, tf));
            }
            units.push(PhraseUnit { doc, token_start, len: terms.len() as u32, char_start, char_end, bag });
        }
        let avgdl =
            if units.is_empty() { 0.0 } else { units.iter().map(|u| u.len as f64).sum::<f64>() / units.len() as f64 };
        Self { docs, range, params, vocab, units, postings, avgdl }
    }

    pub fn docs(&self) -> &DocTable {
        &self.docs
    }

    pub fn doc(&self, n: u32) -> &IndexedDoc {
        &self.docs[n as usize]
    }

    pub fn range(&self) -> TokenRange {
        self.range
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn units(&self) -> &[PhraseUnit] {
        &self.units
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }

    pub fn term_id(&self, term: &str) -> Option<u32> {
        self.vocab.get(term).copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, u32)> {
        self.vocab.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn df(&self, term: &str) -> u32 {
        self.term_id(term).map(|id| self.postings[id as usize].len() as u32).unwrap_or(0)
    }

    pub fn postings(&self, term: &str) -> &[(u32, u32)] {
        self.term_id(term).map(|id| self.postings[id as usize].as_slice()).unwrap_or(&[])
    }

    /// BM25 of one unit against a set of (distinct) query terms.
    pub fn score_unit(&self, terms: &[String], unit: usize) -> f64 {
        let u = &self.units[unit];
        let matches: Vec<(u32, u32)> = terms
            .iter()
            .filter_map(|t| {
                let id = self.term_id(t)?;
                let tf = u.bag.binary_search_by_key(&id, |&(term, _)| term).map(|i| u.bag[i].1).ok()?;
                Some((tf, self.postings[id as usize].len() as u32))
            })
            .collect();
        bm25_score(&matches, u.len as f64, self.avgdl, self.units.len(), self.params)
    }
}

fn doc_units(dn: u32, d: &Document, range: TokenRange, normalizer: &Normalizer) -> Vec<RawUnit> {
    let lemmas: Vec<String> = d.tokens.iter().map(|t| normalizer.normalize(&t.text)).collect();
    let mut out = Vec::new();
    for s in &d.sentences {
        for start in s.token_start..s.token_end {
            for n in range.min..=range.max {
                let end = start + n;
                if end > s.token_end {
                    break;
                }
                out.push((
                    dn,
                    start as u32,
                    d.tokens[start].char_start,
                    d.tokens[end - 1].char_end,
                    lemmas[start..end].to_vec(),
                ));
            }
        }
    }
    out
}
