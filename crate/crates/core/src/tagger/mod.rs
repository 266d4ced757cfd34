//! Feature-hashed linear token classifier trained with (optionally
//! class-weighted) cross-entropy.
//!
//! The weight matrix has one row per hashed bucket plus a bias row, and one
//! column per [`Label`]. Decoding takes the per-token argmax and then
//! rewrites stray I- tags to B- so the output is always valid BIO.

mod features;
mod persist;
mod train;

use rayon::prelude::*;
use thiserror::Error;

use crate::codec::CodecError;
use crate::corpus::{parse_bio, project_bio, repair_bio, AnnotatedSentence, BioMode, Corpus, Label, Split};
use crate::ingest::DocumentCollection;

pub use features::{featurize, FeatureConfig, Features};
pub use persist::{read_model, write_model};
pub use train::{mean_loss, train, LossKind, TrainConfig, TrainHistory};

#[derive(Debug, Error)]
pub enum TaggerError {
    #[error("class {0} never occurs in the training split")]
    MissingClass(Label),
    #[error("the {0} split is empty")]
    EmptySplit(Split),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

impl TaggerError {
    pub fn name(&self) -> &'static str {
        match self {
            TaggerError::MissingClass(_) => "MissingClass",
            TaggerError::EmptySplit(_) => "EmptySplit",
            TaggerError::Config(_) => "ConfigError",
            TaggerError::Codec(e) => e.name(),
        }
    }
}

/// Per-label loss multipliers, indexed by label id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassWeights(pub [f64; Label::COUNT]);

impl ClassWeights {
    pub fn uniform() -> Self {
        Self([1.0; Label::COUNT])
    }

    pub fn get(&self, label: Label) -> f64 {
        self.0[label.id()]
    }

    /// Inverse frequencies rescaled to mean 1.
    pub fn from_counts(counts: [usize; Label::COUNT]) -> Result<Self, TaggerError> {
        if let Some(missing) = Label::ALL.iter().find(|l| counts[l.id()] == 0) {
            return Err(TaggerError::MissingClass(*missing));
        }
        let inv = counts.map(|c| 1.0 / c as f64);
        let mean = inv.iter().sum::<f64>() / Label::COUNT as f64;
        Ok(Self(inv.map(|w| w / mean)))
    }

    /// As [`ClassWeights::from_counts`] after adding one to every count.
    pub fn smoothed(counts: [usize; Label::COUNT]) -> Self {
        Self::from_counts(counts.map(|c| c + 1)).expect("smoothed counts are positive")
    }
}

pub fn label_counts<'a>(sentences: impl IntoIterator<Item = &'a AnnotatedSentence>) -> [usize; Label::COUNT] {
    let mut counts = [0; Label::COUNT];
    for s in sentences {
        for t in &s.tags {
            counts[t.id()] += 1;
        }
    }
    counts
}

/// Weights from the training split's label frequencies.
pub fn class_weights(corpus: &Corpus) -> Result<ClassWeights, TaggerError> {
    ClassWeights::from_counts(label_counts(corpus.split(Split::Train)))
}

/// Class scores `xᵀW` for one token.
pub fn scores(weights: &[f64], x: &[(u32, f64)]) -> [f64; Label::COUNT] {
    let mut s = [0.0; Label::COUNT];
    for &(f, v) in x {
        let row = &weights[f as usize * Label::COUNT..(f as usize + 1) * Label::COUNT];
        for (sc, w) in s.iter_mut().zip(row) {
            *sc += v * w;
        }
    }
    s
}

pub fn softmax(s: [f64; Label::COUNT]) -> [f64; Label::COUNT] {
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e = s.map(|v| (v - max).exp());
    let z: f64 = e.iter().sum();
    e.map(|v| v / z)
}

/// `w_gold · −log softmax(xᵀW)_gold`.
pub fn token_loss(weights: &[f64], x: &[(u32, f64)], gold: Label, class_weights: &ClassWeights) -> f64 {
    loss_from_scores(&scores(weights, x), gold, class_weights)
}

pub(crate) fn loss_from_scores(s: &[f64; Label::COUNT], gold: Label, cw: &ClassWeights) -> f64 {
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_z = max + s.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    cw.get(gold) * (log_z - s[gold.id()])
}

/// Sparse gradient of [`token_loss`] with respect to the flat weight
/// vector; entries for repeated buckets are listed separately.
pub fn token_gradient(
    weights: &[f64],
    x: &[(u32, f64)],
    gold: Label,
    class_weights: &ClassWeights,
) -> Vec<(usize, f64)> {
    let g = output_gradient(&scores(weights, x), gold, class_weights);
    let mut out = Vec::with_capacity(x.len() * Label::COUNT);
    for &(f, v) in x {
        for (c, gc) in g.iter().enumerate() {
            out.push((f as usize * Label::COUNT + c, v * gc));
        }
    }
    out
}

/// `∂loss/∂scores = w_gold · (softmax − onehot(gold))`.
pub(crate) fn output_gradient(s: &[f64; Label::COUNT], gold: Label, cw: &ClassWeights) -> [f64; Label::COUNT] {
    let p = softmax(*s);
    let w = cw.get(gold);
    let mut g = [0.0; Label::COUNT];
    for (c, (gc, pc)) in g.iter_mut().zip(p).enumerate() {
        *gc = w * (pc - if c == gold.id() { 1.0 } else { 0.0 });
    }
    g
}

pub(crate) fn argmax(s: &[f64; Label::COUNT]) -> Label {
    let mut best = 0;
    for c in 1..Label::COUNT {
        if s[c] > s[best] {
            best = c;
        }
    }
    Label::from_id(best).expect("index below label count")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    pub features: FeatureConfig,
    pub class_weights: ClassWeights,
    pub loss: LossKind,
    pub seed: u64,
    pub corpus_name: String,
    pub history: TrainHistory,
    /// Row-major `(hash_dim + 1) × 5`.
    pub weights: Vec<f64>,
}

impl TaggerModel {
    pub fn nonzero_parameters(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count()
    }

    /// Argmax labels with stray I- tags rewritten to B-.
    pub fn predict_tokens(&self, tokens: &[&str]) -> Vec<Label> {
        let mut tags: Vec<Label> =
            featurize(tokens, &self.features).iter().map(|x| argmax(&scores(&self.weights, x))).collect();
        repair_bio(&mut tags);
        tags
    }

    pub fn predict(&self, sentence: &AnnotatedSentence) -> Vec<Label> {
        let tokens: Vec<&str> = sentence.tokens.iter().map(|t| t.text.as_str()).collect();
        self.predict_tokens(&tokens)
    }
}

/// Add predicted mentions that do not touch an existing one. Existing
/// mentions are never changed.
pub fn augment_corpus(corpus: &Corpus, model: &TaggerModel) -> Corpus {
    let sentences: Vec<AnnotatedSentence> = corpus
        .sentences
        .par_iter()
        .map(|s| {
            let mut mentions = s.mentions();
            let predicted_tags = model.predict(s);
            let predicted = parse_bio(&predicted_tags, &s.tokens, BioMode::Repair).expect("one tag per token");
            let added: Vec<_> = predicted.into_iter().filter(|p| !mentions.iter().any(|m| m.overlaps(p))).collect();
            mentions.extend(added);
            mentions.sort_by_key(|m| m.char_start);
            AnnotatedSentence {
                tags: project_bio(&s.tokens, &mentions).expect("mentions are disjoint and aligned"),
                ..s.clone()
            }
        })
        .collect();
    Corpus { name: corpus.name.clone(), sentences, split_assignment: corpus.split_assignment.clone() }
}

/// Tag every sentence of every document (documents in id order).
pub fn annotate_collection(model: &TaggerModel, collection: &DocumentCollection, name: &str) -> Corpus {
    let sentences: Vec<AnnotatedSentence> = collection
        .sorted_docs()
        .par_iter()
        .flat_map_iter(|doc| {
            (0..doc.sentences.len()).map(move |i| {
                let tokens = doc.sentence_tokens(i);
                let texts: Vec<&str> = tokens.iter().map(|t| t.text.as_str()).collect();
                let tags = model.predict_tokens(&texts);
                AnnotatedSentence {
                    sentence_id: doc.sentence_id(i),
                    doc_id: doc.doc_id.clone(),
                    language: doc.language.clone(),
                    text: doc.sentence_text(i).to_string(),
                    tokens,
                    tags,
                    gold_entities: None,
                }
            })
        })
        .collect();
    let mut corpus = Corpus::new(name);
    for s in sentences {
        corpus.push(s, Split::Unassigned);
    }
    corpus
}
