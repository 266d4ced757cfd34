//! Dictionary + suffix-stripping normalization of tokens to lemma-like keys.

use std::collections::{HashMap, HashSet};

use crate::text::{char_len, fold_case};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixRule {
    pub suffix: String,
    /// Minimum number of characters that must remain after stripping.
    pub min_stem: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Normalizer {
    lemma_dictionary: HashMap<String, String>,
    lemmas: HashSet<String>,
    suffix_rules: Vec<SuffixRule>,
    case_folding: bool,
}

impl Normalizer {
    pub fn new(case_folding: bool) -> Self {
        Self { case_folding, ..Self::default() }
    }

    /// Case folding plus the bundled suffix rules, no dictionary.
    pub fn with_default_rules() -> Self {
        Self::new(true).with_suffix_rules(
            parse_suffix_rules(include_str!("../../data/suffix_rules.txt")).expect("bundled suffix rules parse"),
        )
    }

    pub fn with_suffix_rules(mut self, rules: Vec<SuffixRule>) -> Self {
        self.suffix_rules =
            rules.into_iter().map(|r| SuffixRule { suffix: self.fold(&r.suffix), min_stem: r.min_stem }).collect();
        self
    }

    pub fn with_dictionary<I>(mut self, entries: I) -> Self
    where
        I: IntoIterator<Item = (String, String)>,
    {
        for (surface, lemma) in entries {
            let lemma = self.fold(&lemma);
            self.lemmas.insert(lemma.clone());
            self.lemma_dictionary.insert(self.fold(&surface), lemma);
        }
        self
    }

    pub fn case_folding(&self) -> bool {
        self.case_folding
    }

    pub fn suffix_rules(&self) -> &[SuffixRule] {
        &self.suffix_rules
    }

    pub fn dictionary_len(&self) -> usize {
        self.lemma_dictionary.len()
    }

    fn fold(&self, s: &str) -> String {
        if self.case_folding {
            fold_case(s)
        } else {
            s.to_string()
        }
    }

    /// Map a token to its lemma key.
    ///
    /// Known lemmas map to themselves and dictionary surfaces map to their
    /// lemma. Otherwise the first applicable suffix rule is stripped and the
    /// lookup repeats until nothing changes, which makes the mapping
    /// idempotent.
    pub fn normalize(&self, token: &str) -> String {
        let mut s = self.fold(token);
        loop {
            if self.lemmas.contains(&s) {
                return s;
            }
            if let Some(lemma) = self.lemma_dictionary.get(&s) {
                return lemma.clone();
            }
            match self.strip_once(&s) {
                Some(stripped) => s = stripped,
                None => return s,
            }
        }
    }

    fn strip_once(&self, s: &str) -> Option<String> {
        let len = char_len(s);
        self.suffix_rules.iter().find_map(|rule| {
            let suffix_len = char_len(&rule.suffix);
            (suffix_len > 0 && s.ends_with(rule.suffix.as_str()) && len - suffix_len >= rule.min_stem.max(1))
                .then(|| s[..s.len() - rule.suffix.len()].to_string())
        })
    }
}

/// Parse suffix rules: one `<suffix> <min-stem>` per line, `#` comments.
pub fn parse_suffix_rules(contents: &str) -> Result<Vec<SuffixRule>, String> {
    let mut rules = Vec::new();
    for (i, line) in contents.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let suffix = parts.next().unwrap_or_default();
        let min_stem = parts
            .next()
            .ok_or_else(|| format!("line {}: missing minimum stem length", i + 1))?
            .parse::<usize>()
            .map_err(|_| format!("line {}: bad minimum stem length", i + 1))?;
        if parts.next().is_some() {
            return Err(format!("line {}: too many fields", i + 1));
        }
        rules.push(SuffixRule { suffix: suffix.to_string(), min_stem });
    }
    Ok(rules)
}

/// Parse a `surface\tlemma` dictionary.
pub fn parse_lemma_dictionary(contents: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in contents.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (surface, lemma) =
            line.split_once('\t').ok_or_else(|| format!("line {}: expected `surface\\tlemma`", i + 1))?;
        if surface.is_empty() || lemma.is_empty() || lemma.contains('\t') {
            return Err(format!("line {}: expected `surface\\tlemma`", i + 1));
        }
        out.push((surface.to_string(), lemma.to_string()));
    }
    Ok(out)
}
