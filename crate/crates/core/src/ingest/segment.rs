//! Rule-based tokenizer and sentence splitter.

use std::collections::HashSet;

use crate::corpus::Token;

fn is_word_char(c: char) -> bool {
    // combining diacritics stay attached to the letter they decorate
    c.is_alphanumeric() || ('\u{0300}'..='\u{036F}').contains(&c)
}

/// Maximal runs of letters/digits become tokens; every other non-whitespace
/// character is a token on its own.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut run: Option<(usize, String)> = None;
    for (pos, c) in text.chars().enumerate() {
        if is_word_char(c) {
            match run.as_mut() {
                Some((_, s)) => s.push(c),
                None => run = Some((pos, c.to_string())),
            }
            continue;
        }
        if let Some((start, s)) = run.take() {
            tokens.push(Token::new(s, start, pos));
        }
        if !c.is_whitespace() {
            tokens.push(Token::new(c.to_string(), pos, pos + 1));
        }
    }
    if let Some((start, s)) = run {
        let end = start + s.chars().count();
        tokens.push(Token::new(s, start, end));
    }
    tokens
}

#[derive(Debug, Clone, Default)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl SentenceSplitter {
    pub fn new<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { abbreviations: abbreviations.into_iter().map(Into::into).collect() }
    }

    /// Abbreviations from a one-per-line config file (`#` starts a comment).
    pub fn from_config(contents: &str) -> Self {
        Self::new(contents.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')))
    }

    pub fn with_default_abbreviations() -> Self {
        Self::from_config(include_str!("../../data/abbreviations.txt"))
    }

    pub fn abbreviations(&self) -> impl Iterator<Item = &str> {
        self.abbreviations.iter().map(String::as_str)
    }

    /// Partition `text` into sentence spans `(char_start, char_end)`.
    ///
    /// A boundary follows `.`, `!` or `?` when the next character is
    /// whitespace and the first non-whitespace character after it is an
    /// uppercase letter or a digit. The whitespace run belongs to the earlier
    /// sentence, so the spans cover every character exactly once.
    pub fn split(&self, text: &str) -> Vec<(usize, usize)> {
        let chars: Vec<char> = text.chars().collect();
        let mut spans = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if matches!(c, '.' | '!' | '?') && chars.get(i + 1).is_some_and(|n| n.is_whitespace()) {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_whitespace() {
                    j += 1;
                }
                let opens = chars.get(j).is_some_and(|n| n.is_uppercase() || n.is_ascii_digit());
                if opens && !self.is_abbreviation(&chars, i) {
                    spans.push((start, j));
                    start = j;
                    i = j;
                    continue;
                }
            }
            i += 1;
        }
        if start < chars.len() {
            spans.push((start, chars.len()));
        }
        spans
    }

    fn is_abbreviation(&self, chars: &[char], punct: usize) -> bool {
        if self.abbreviations.is_empty() {
            return false;
        }
        let mut k = punct;
        while k > 0 && is_word_char(chars[k - 1]) {
            k -= 1;
        }
        let candidate: String = chars[k..=punct].iter().collect();
        self.abbreviations.contains(&candidate)
    }
}
