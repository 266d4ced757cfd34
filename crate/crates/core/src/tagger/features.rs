use std::hash::Hasher;

use fnv::FnvHasher;

use crate::text::fold_case;

/// Sparse input vector: `(bucket, value)` pairs; a bucket may repeat.
pub type Features = Vec<(u32, f64)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureConfig {
    /// Number of hashed buckets; bucket `hash_dim` is the bias.
    pub hash_dim: usize,
    pub ngram_sizes: Vec<usize>,
    /// Context tokens on each side.
    pub window: usize,
    pub shape_features: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self { hash_dim: 1 << 18, ngram_sizes: vec![2, 3, 4], window: 2, shape_features: true }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.hash_dim < 2 || self.hash_dim >= u32::MAX as usize {
            return Err(format!("hash_dim must be in 2..2^32-1, got {}", self.hash_dim));
        }
        if self.ngram_sizes.contains(&0) {
            return Err("n-gram sizes must be positive".into());
        }
        Ok(())
    }

    /// Rows of the weight matrix, bias included.
    pub fn rows(&self) -> usize {
        self.hash_dim + 1
    }

    fn bucket(&self, feature: &str) -> u32 {
        let mut h = FnvHasher::default();
        h.write(feature.as_bytes());
        (h.finish() % self.hash_dim as u64) as u32
    }
}

/// Collapsed character classes: `Praha` → `Xx`, `1420` → `d`, `.` → `.`.
fn shape(token: &str) -> String {
    let mut out = String::new();
    for c in token.chars() {
        let class = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_numeric() {
            'd'
        } else {
            c
        };
        if !out.ends_with(class) {
            out.push(class);
        }
    }
    out
}

fn context(tokens: &[String], i: usize, offset: isize) -> &str {
    match i.checked_add_signed(offset) {
        Some(j) if j < tokens.len() => &tokens[j],
        _ if offset < 0 => "<s>",
        _ => "</s>",
    }
}

/// Hashed features for every token of a sentence.
pub fn featurize(tokens: &[&str], config: &FeatureConfig) -> Vec<Features> {
    let folded: Vec<String> = tokens.iter().map(|t| fold_case(t)).collect();
    let raw: Vec<String> = tokens.iter().map(|t| t.to_string()).collect();
    let bias = config.hash_dim as u32;
    (0..tokens.len())
        .map(|i| {
            let mut names: Vec<String> = Vec::new();
            names.push(format!("w0={}", folded[i]));
            for o in 1..=config.window as isize {
                names.push(format!("w-{o}={}", context(&folded, i, -o)));
                names.push(format!("w+{o}={}", context(&folded, i, o)));
            }
            let padded: Vec<char> = std::iter::once('<').chain(folded[i].chars()).chain(std::iter::once('>')).collect();
            for &n in &config.ngram_sizes {
                for g in padded.windows(n) {
                    names.push(format!("g{n}={}", g.iter().collect::<String>()));
                }
            }
            if config.shape_features {
                let tok = tokens[i];
                let first = tok.chars().next().unwrap_or(' ');
                names.push(format!("s0={}", shape(tok)));
                if first.is_uppercase() {
                    names.push("cap".into());
                }
                if tok.chars().all(|c| c.is_uppercase()) {
                    names.push("allcap".into());
                }
                if tok.chars().any(|c| c.is_numeric()) {
                    names.push("digit".into());
                }
                if tok.chars().all(|c| !c.is_alphanumeric()) {
                    names.push("punct".into());
                }
                if i == 0 {
                    names.push("first".into());
                }
                names.push(format!("s-1={}", shape(context(&raw, i, -1))));
                names.push(format!("s+1={}", shape(context(&raw, i, 1))));
            }
            let mut f: Features = names.iter().map(|n| (config.bucket(n), 1.0)).collect();
            f.push((bias, 1.0));
            f
        })
        .collect()
}
