use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{doc_table, DocTable, IndexedDoc};
use crate::ingest::{DocumentCollection, Normalizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Posting {
    /// Document number (position in doc-id order).
    pub doc: u32,
    pub position: u32,
}

/// Lemma → sorted `(doc, position)` postings.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionalIndex {
    docs: DocTable,
    postings: BTreeMap<String, Vec<Posting>>,
}

impl PositionalIndex {
    /// Index every token of every document under its normalized form.
    pub fn build(collection: &DocumentCollection, normalizer: &Normalizer) -> Self {
        let sorted = collection.sorted_docs();
        let docs = doc_table(&sorted);
        Self::build_with_docs(&sorted, docs, normalizer)
    }

    pub(crate) fn build_with_docs(
        sorted: &[&crate::ingest::Document],
        docs: DocTable,
        normalizer: &Normalizer,
    ) -> Self {
        let per_doc: Vec<Vec<String>> =
            sorted.par_iter().map(|d| d.tokens.iter().map(|t| normalizer.normalize(&t.text)).collect()).collect();
        let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        // documents visited in doc-id order, positions ascending: lists come out sorted
        for (doc, lemmas) in per_doc.into_iter().enumerate() {
            for (position, lemma) in lemmas.into_iter().enumerate() {
                postings.entry(lemma).or_default().push(Posting { doc: doc as u32, position: position as u32 });
            }
        }
        Self { docs, postings }
    }

    pub(crate) fn from_parts(docs: DocTable, postings: BTreeMap<String, Vec<Posting>>) -> Self {
        Self { docs, postings }
    }

    pub fn docs(&self) -> &DocTable {
        &self.docs
    }

    pub fn doc(&self, n: u32) -> &IndexedDoc {
        &self.docs[n as usize]
    }

    pub fn postings(&self, lemma: &str) -> &[Posting] {
        self.postings.get(lemma).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn lemmas(&self) -> impl Iterator<Item = (&str, &[Posting])> {
        self.postings.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn is_empty(&self) -> bool {
        self.postings.is_empty()
    }

    /// Start postings of every contiguous occurrence of `lemmas`.
    pub fn phrase_matches(&self, lemmas: &[String]) -> Vec<Posting> {
        let Some((first, rest)) = lemmas.split_first() else {
            return Vec::new();
        };
        let lists: Vec<&[Posting]> = rest.iter().map(|l| self.postings(l)).collect();
        if lists.iter().any(|l| l.is_empty()) {
            return Vec::new();
        }
        self.postings(first)
            .iter()
            .copied()
            .filter(|start| {
                lists.iter().enumerate().all(|(i, list)| {
                    let want = Posting { doc: start.doc, position: start.position + 1 + i as u32 };
                    list.binary_search(&want).is_ok()
                })
            })
            .collect()
    }
}
