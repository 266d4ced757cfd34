//! Silver-standard NER corpus bootstrapping.
//!
//! Given OCR page texts and a gazetteer of person/place names, the crate finds
//! gazetteer occurrences with several retrieval techniques, turns the hits into
//! a BIO-tagged sentence corpus, grows it with a class-weighted token
//! classifier, and evaluates taggers with token- and entity-level metrics.

pub mod bootstrap;
pub mod codec;
pub mod corpus;
pub mod eval;
pub mod index;
pub mod ingest;
pub mod rerank;
pub mod retrieval;
pub mod synthetic;
pub mod tagger;
pub mod text;
