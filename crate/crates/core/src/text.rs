//! Character-offset helpers.
//!
//! Every span in this crate is measured in Unicode scalar values, never bytes.
//! [`CharText`] keeps a string together with its char→byte table so slicing by
//! character offsets is O(1).

use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct CharText {
    text: String,
    byte_offsets: Vec<usize>,
}

impl CharText {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let mut byte_offsets: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        byte_offsets.push(text.len());
        Self { text, byte_offsets }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Length in characters.
    pub fn len(&self) -> usize {
        self.byte_offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Slice by character offsets. Panics if the range is out of bounds.
    pub fn slice(&self, start: usize, end: usize) -> &str {
        &self.text[self.byte_offsets[start]..self.byte_offsets[end]]
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

impl fmt::Debug for CharText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.text, f)
    }
}

/// Number of characters in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Slice `s` by character offsets without a precomputed table.
pub fn slice_chars(s: &str, start: usize, end: usize) -> &str {
    let mut it = s.char_indices().map(|(b, _)| b).chain(std::iter::once(s.len()));
    let b0 = it.nth(start).expect("start offset in range");
    let b1 = if end == start { b0 } else { it.nth(end - start - 1).expect("end offset in range") };
    &s[b0..b1]
}

/// Lowercase a single character, keeping it unchanged when the lowercase form
/// is not a single character. Preserves character counts so offsets stay valid.
pub fn fold_char(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// Length-preserving case fold.
pub fn fold_case(s: &str) -> String {
    s.chars().map(fold_char).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slicing_by_chars() {
        let t = CharText::new("Blažek z Kralup");
        assert_eq!(t.len(), 15);
        assert_eq!(t.slice(0, 6), "Blažek");
        assert_eq!(t.slice(9, 15), "Kralup");
        assert_eq!(slice_chars("Blažek z Kralup", 3, 6), "žek");
        assert_eq!(slice_chars("abc", 1, 1), "");
    }

    #[test]
    fn fold_keeps_length() {
        let s = "İSTANBUL Žižka";
        assert_eq!(char_len(&fold_case(s)), char_len(s));
        assert_eq!(fold_case("Žižka"), "žižka");
    }
}
