use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Split};

/// Train/validation/test fractions: each positive, summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { train: 0.8, validation: 0.1, test: 0.1 }
    }
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self, String> {
        let all = [train, validation, test];
        if all.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(format!("split ratios must be positive, got {train}/{validation}/{test}"));
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(format!("split ratios must sum to 1, got {sum}"));
        }
        Ok(Self { train, validation, test })
    }

    /// `(train, validation, test)` sizes: floors for the first two, the
    /// remainder for test.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let floor = |r: f64| ((r * n as f64 + 1e-9).floor() as usize).min(n);
        let train = floor(self.train);
        let validation = floor(self.validation).min(n - train);
        (train, validation, n - train - validation)
    }
}

/// Assign splits through a ChaCha8 permutation seeded with `seed`. Sentence
/// order is unchanged; only `split_assignment` is rewritten.
pub fn split_corpus(mut corpus: Corpus, ratios: SplitRatios, seed: u64) -> Corpus {
    let n = corpus.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train, validation, _) = ratios.sizes(n);
    corpus.split_assignment = vec![Split::Test; n];
    for (rank, &i) in order.iter().enumerate() {
        corpus.split_assignment[i] = if rank < train {
            Split::Train
        } else if rank < train + validation {
            Split::Validation
        } else {
            Split::Test
        };
    }
    corpus
}
