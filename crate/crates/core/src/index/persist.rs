use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::Arc;

use super::phrase::{Bm25Params, PhraseIndex, PhraseUnit, TokenRange};
use super::positional::{PositionalIndex, Posting};
use super::{doc_table, IndexedDoc};
use crate::codec::{BinReader, BinWriter, CodecError};
use crate::ingest::{DocumentCollection, Normalizer};
use crate::text::CharText;

const MAGIC: &[u8; 8] = b"SNERIDX\0";
const VERSION: u32 = 1;

/// The positional index plus one phrase index per token-length range, all
/// sharing one document table.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    pub positional: PositionalIndex,
    pub phrase: BTreeMap<TokenRange, PhraseIndex>,
}

impl IndexSet {
    pub fn build(
        collection: &DocumentCollection,
        normalizer: &Normalizer,
        ranges: impl IntoIterator<Item = TokenRange>,
        params: Bm25Params,
    ) -> Self {
        let sorted = collection.sorted_docs();
        let docs = doc_table(&sorted);
        let positional = PositionalIndex::build_with_docs(&sorted, docs.clone(), normalizer);
        let phrase = ranges
            .into_iter()
            .map(|r| (r, PhraseIndex::build_with_docs(&sorted, docs.clone(), r, params, normalizer)))
            .collect();
        Self { positional, phrase }
    }

    pub fn phrase_index(&self, range: TokenRange) -> Option<&PhraseIndex> {
        self.phrase.get(&range)
    }
}

pub fn write_index_set<W: Write>(w: W, set: &IndexSet) -> std::io::Result<()> {
    let mut w = BinWriter::new(w);
    w.header(MAGIC, VERSION)?;
    let docs = set.positional.docs();
    w.len(docs.len())?;
    for d in docs.iter() {
        w.str(&d.doc_id)?;
        w.str(d.text())?;
        w.len(d.token_spans.len())?;
        for &(a, b) in &d.token_spans {
            w.len(a)?;
            w.len(b)?;
        }
    }
    let lemmas: Vec<(&str, &[Posting])> = set.positional.lemmas().collect();
    w.len(lemmas.len())?;
    for (lemma, postings) in lemmas {
        w.str(lemma)?;
        w.len(postings.len())?;
        for p in postings {
            w.u32(p.doc)?;
            w.u32(p.position)?;
        }
    }
    w.len(set.phrase.len())?;
    for (range, idx) in &set.phrase {
        w.len(range.min)?;
        w.len(range.max)?;
        w.f64(idx.params.k1)?;
        w.f64(idx.params.b)?;
        w.len(idx.vocab.len())?;
        // vocab ids are assigned in key order, so the keys alone suffice
        for term in idx.vocab.keys() {
            w.str(term)?;
        }
        w.len(idx.units.len())?;
        for u in &idx.units {
            w.u32(u.doc)?;
            w.u32(u.token_start)?;
            w.u32(u.len)?;
            w.len(u.char_start)?;
            w.len(u.char_end)?;
            w.len(u.bag.len())?;
            for &(t, tf) in &u.bag {
                w.u32(t)?;
                w.u32(tf)?;
            }
        }
        w.f64(idx.avgdl)?;
    }
    Ok(())
}

pub fn read_index_set<R: Read>(r: R) -> Result<IndexSet, CodecError> {
    let mut r = BinReader::new(r);
    r.header(MAGIC, VERSION, "index")?;
    let bad = |what: &str| CodecError::InvalidValue(what.to_string());

    let n_docs = r.len()?;
    let mut docs = Vec::with_capacity(n_docs.min(1 << 16));
    for _ in 0..n_docs {
        let doc_id = r.str()?;
        let text = CharText::new(r.str()?);
        let n = r.len()?;
        let mut token_spans = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            let (a, b) = (r.len()?, r.len()?);
            if a >= b || b > text.len() {
                return Err(bad("token span"));
            }
            token_spans.push((a, b));
        }
        docs.push(IndexedDoc { doc_id, text, token_spans });
    }
    let docs = Arc::new(docs);

    let n_lemmas = r.len()?;
    let mut postings = BTreeMap::new();
    for _ in 0..n_lemmas {
        let lemma = r.str()?;
        let n = r.len()?;
        let mut list = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            let p = Posting { doc: r.u32()?, position: r.u32()? };
            let doc = docs.get(p.doc as usize).ok_or_else(|| bad("posting doc"))?;
            if p.position as usize >= doc.token_spans.len() {
                return Err(bad("posting position"));
            }
            list.push(p);
        }
        postings.insert(lemma, list);
    }
    let positional = PositionalIndex::from_parts(docs.clone(), postings);

    let n_phrase = r.len()?;
    let mut phrase = BTreeMap::new();
    for _ in 0..n_phrase {
        let range = TokenRange::new(r.len()?, r.len()?);
        let params = Bm25Params::new(r.f64()?, r.f64()?).map_err(CodecError::InvalidValue)?;
        let n_terms = r.len()?;
        let mut vocab = BTreeMap::new();
        for i in 0..n_terms {
            vocab.insert(r.str()?, i as u32);
        }
        let n_units = r.len()?;
        let mut units = Vec::with_capacity(n_units.min(1 << 20));
        let mut post: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n_terms];
        for uid in 0..n_units {
            let doc = r.u32()?;
            let token_start = r.u32()?;
            let len = r.u32()?;
            let char_start = r.len()?;
            let char_end = r.len()?;
            let n_bag = r.len()?;
            let mut bag = Vec::with_capacity(n_bag.min(1 << 16));
            for _ in 0..n_bag {
                let (t, tf) = (r.u32()?, r.u32()?);
                post.get_mut(t as usize).ok_or_else(|| bad("term id"))?.push((uid as u32, tf));
                bag.push((t, tf));
            }
            if doc as usize >= docs.len() {
                return Err(bad("unit doc"));
            }
            units.push(PhraseUnit { doc, token_start, len, char_start, char_end, bag });
        }
        let avgdl = r.f64()?;
        phrase.insert(range, PhraseIndex { docs: docs.clone(), range, params, vocab, units, postings: post, avgdl });
    }
    r.finish()?;
    Ok(IndexSet { positional, phrase })
}
