use std::collections::HashSet;

use crate::ingest::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextMode {
    /// Characters (edit distance) or character bigrams (Jaccard).
    Char,
    /// Tokens from the rule-based tokenizer.
    Word,
}

/// Unit-cost Levenshtein distance, two-row DP.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn edit_distance(a: &str, b: &str, mode: TextMode) -> usize {
    match mode {
        TextMode::Char => {
            let a: Vec<char> = a.chars().collect();
            let b: Vec<char> = b.chars().collect();
            levenshtein(&a, &b)
        }
        TextMode::Word => {
            let a: Vec<String> = tokenize(a).into_iter().map(|t| t.text).collect();
            let b: Vec<String> = tokenize(b).into_iter().map(|t| t.text).collect();
            levenshtein(&a, &b)
        }
    }
}

fn bigrams(s: &str) -> HashSet<(char, char)> {
    let chars: Vec<char> = s.chars().collect();
    chars.windows(2).map(|w| (w[0], w[1])).collect()
}

fn words(s: &str) -> HashSet<String> {
    tokenize(s).into_iter().map(|t| t.text).collect()
}

fn jaccard<T: Eq + std::hash::Hash>(a: &HashSet<T>, b: &HashSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Jaccard similarity of character-bigram sets or token sets. Two empty sets
/// are identical (1.0).
pub fn jaccard_similarity(a: &str, b: &str, mode: TextMode) -> f64 {
    match mode {
        TextMode::Char => jaccard(&bigrams(a), &bigrams(b)),
        TextMode::Word => jaccard(&words(a), &words(b)),
    }
}
