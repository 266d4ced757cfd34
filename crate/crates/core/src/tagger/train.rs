use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    argmax, class_weights, featurize, label_counts, loss_from_scores, output_gradient, scores, token_loss,
    ClassWeights, FeatureConfig, Features, TaggerError, TaggerModel,
};
use crate::corpus::{AnnotatedSentence, Corpus, Label, Split};
use crate::eval::{token_counts, TokenCounts, DEFAULT_BETA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossKind {
    /// Cross-entropy scaled by inverse class frequency.
    #[default]
    Weighted,
    Unweighted,
}

impl LossKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::Weighted => "WCE",
            LossKind::Unweighted => "CE",
        }
    }
}

impl std::str::FromStr for LossKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weighted" | "wce" | "WCE" => Ok(LossKind::Weighted),
            "unweighted" | "ce" | "CE" => Ok(LossKind::Unweighted),
            other => Err(format!("unknown loss `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub loss: LossKind,
    /// Stop after this many epochs without a better validation F_β.
    pub patience: usize,
    pub beta: f64,
    /// Weights to use instead of the training-split frequencies (weighted
    /// loss only).
    pub class_weights: Option<ClassWeights>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 20,
            seed: 0,
            loss: LossKind::Weighted,
            patience: 5,
            beta: DEFAULT_BETA,
            class_weights: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TaggerError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(TaggerError::Config(format!("learning_rate must be positive, got {}", self.learning_rate)));
        }
        if self.epochs == 0 {
            return Err(TaggerError::Config("epochs must be at least 1".into()));
        }
        if self.beta.is_nan() || self.beta <= 0.0 {
            return Err(TaggerError::Config(format!("beta must be positive, got {}", self.beta)));
        }
        Ok(())
    }
}

/// Per-epoch training curve.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    /// Mean training loss over each epoch's updates.
    pub epoch_loss: Vec<f64>,
    pub validation_fbeta: Vec<f64>,
    /// 1-based epoch whose weights were kept.
    pub best_epoch: usize,
}

fn featurize_sentence(s: &AnnotatedSentence, config: &FeatureConfig) -> Vec<Features> {
    let tokens: Vec<&str> = s.tokens.iter().map(|t| t.text.as_str()).collect();
    featurize(&tokens, config)
}

fn validation_counts(weights: &[f64], data: &[(Vec<Features>, &[Label])]) -> TokenCounts {
    let mut total = TokenCounts::default();
    for (xs, gold) in data {
        let mut pred: Vec<Label> = xs.iter().map(|x| argmax(&scores(weights, x))).collect();
        crate::corpus::repair_bio(&mut pred);
        total.add(token_counts(gold, &pred));
    }
    total
}

/// Seeded stochastic gradient descent over shuffled training tokens, with
/// AdaGrad per-parameter step sizes. After every epoch the model is scored
/// on the validation split and the best weights so far are kept.
pub fn train(corpus: &Corpus, features: &FeatureConfig, config: &TrainConfig) -> Result<TaggerModel, TaggerError> {
    features.validate().map_err(TaggerError::Config)?;
    config.validate()?;
    for split in [Split::Train, Split::Validation] {
        if corpus.split(split).all(|s| s.tokens.is_empty()) {
            return Err(TaggerError::EmptySplit(split));
        }
    }
    let cw = match config.loss {
        LossKind::Unweighted => ClassWeights::uniform(),
        LossKind::Weighted => match config.class_weights {
            Some(w) => w,
            None => class_weights(corpus)
                .unwrap_or_else(|_| ClassWeights::smoothed(label_counts(corpus.split(Split::Train)))),
        },
    };
    let train_tokens: Vec<(Features, Label)> = corpus
        .split(Split::Train)
        .flat_map(|s| featurize_sentence(s, features).into_iter().zip(s.tags.iter().copied()))
        .collect();
    let validation: Vec<(Vec<Features>, &[Label])> =
        corpus.split(Split::Validation).map(|s| (featurize_sentence(s, features), s.tags.as_slice())).collect();

    let mut weights = vec![0.0; features.rows() * Label::COUNT];
    let mut squared = vec![0.0; weights.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..train_tokens.len()).collect();
    let mut history = TrainHistory::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut since_best = 0;
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for &i in &order {
            let (x, gold) = &train_tokens[i];
            let s = scores(&weights, x);
            loss_sum += loss_from_scores(&s, *gold, &cw);
            let g = output_gradient(&s, *gold, &cw);
            for &(f, v) in x {
                let at = f as usize * Label::COUNT;
                for (c, gc) in g.iter().enumerate() {
                    let grad = v * gc;
                    squared[at + c] += grad * grad;
                    if grad != 0.0 {
                        weights[at + c] -= config.learning_rate * grad / squared[at + c].sqrt();
                    }
                }
            }
        }
        history.epoch_loss.push(loss_sum / train_tokens.len().max(1) as f64);
        let f = validation_counts(&weights, &validation).fbeta(config.beta);
        history.validation_fbeta.push(f);
        if best.as_ref().is_none_or(|(b, _)| f > *b) {
            best = Some((f, weights.clone()));
            history.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best > config.patience {
                break;
            }
        }
    }
    let (_, weights) = best.expect("at least one epoch runs");
    Ok(TaggerModel {
        features: features.clone(),
        class_weights: cw,
        loss: config.loss,
        seed: config.seed,
        corpus_name: corpus.name.clone(),
        history,
        weights,
    })
}

/// Mean (weighted) loss of `weights` over one split.
pub fn mean_loss(weights: &[f64], corpus: &Corpus, split: Split, features: &FeatureConfig, cw: &ClassWeights) -> f64 {
    let mut sum = 0.0;
    let mut n = 0;
    for s in corpus.split(split) {
        for (x, gold) in featurize_sentence(s, features).iter().zip(&s.tags) {
            sum += token_loss(weights, x, *gold, cw);
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}
