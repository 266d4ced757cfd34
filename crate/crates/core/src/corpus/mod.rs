//! Core domain types shared by every stage of the pipeline.
//!
//! Offsets are character (Unicode scalar value) counts relative to the
//! containing sentence. Tags follow the BIO scheme over two entity types.

mod bio;
mod conll;
mod stats;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use bio::{parse_bio, project_bio, repair_bio, BioMode};
pub use conll::{read_corpus, read_gold_sidecar, write_corpus, write_gold_sidecar, CorpusHeader};
pub use stats::{corpus_stats, CorpusStats, SplitStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorpusError {
    #[error("invalid BIO sequence at token {0}")]
    InvalidBio(usize),
    #[error("mentions overlap on token {0}")]
    OverlapConflict(usize),
    #[error("tag count {tags} does not match token count {tokens}")]
    LengthMismatch { tags: usize, tokens: usize },
    #[error("duplicate sentence id `{0}`")]
    DuplicateSentenceId(String),
    #[error("sentence `{sentence}`: {reason}")]
    InvalidSentence { sentence: String, reason: String },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unknown sentence id `{0}` in gold entity file")]
    UnknownSentence(String),
}

impl CorpusError {
    pub fn name(&self) -> &'static str {
        match self {
            CorpusError::InvalidBio(_) => "InvalidBio",
            CorpusError::OverlapConflict(_) => "OverlapConflict",
            CorpusError::LengthMismatch { .. } => "LengthMismatch",
            CorpusError::DuplicateSentenceId(_) => "DuplicateSentenceId",
            CorpusError::InvalidSentence { .. } => "InvalidSentence",
            CorpusError::Parse { .. } => "ParseError",
            CorpusError::UnknownSentence(_) => "UnknownSentence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityType {
    Per,
    Loc,
}

impl EntityType {
    pub const ALL: [EntityType; 2] = [EntityType::Per, EntityType::Loc];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Per => "PER",
            EntityType::Loc => "LOC",
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PER" => Ok(EntityType::Per),
            "LOC" => Ok(EntityType::Loc),
            other => Err(format!("unknown entity type `{other}`")),
        }
    }
}

/// Token label. The discriminant is the stable matrix index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    BPer = 0,
    IPer = 1,
    BLoc = 2,
    ILoc = 3,
    O = 4,
}

impl Label {
    pub const COUNT: usize = 5;
    pub const ALL: [Label; 5] = [Label::BPer, Label::IPer, Label::BLoc, Label::ILoc, Label::O];

    pub fn id(self) -> usize {
        self as usize
    }

    pub fn from_id(id: usize) -> Option<Label> {
        Label::ALL.get(id).copied()
    }

    pub fn begin(ty: EntityType) -> Label {
        match ty {
            EntityType::Per => Label::BPer,
            EntityType::Loc => Label::BLoc,
        }
    }

    pub fn inside(ty: EntityType) -> Label {
        match ty {
            EntityType::Per => Label::IPer,
            EntityType::Loc => Label::ILoc,
        }
    }

    pub fn entity_type(self) -> Option<EntityType> {
        match self {
            Label::BPer | Label::IPer => Some(EntityType::Per),
            Label::BLoc | Label::ILoc => Some(EntityType::Loc),
            Label::O => None,
        }
    }

    pub fn is_begin(self) -> bool {
        matches!(self, Label::BPer | Label::BLoc)
    }

    pub fn is_inside(self) -> bool {
        matches!(self, Label::IPer | Label::ILoc)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::BPer => "B-PER",
            Label::IPer => "I-PER",
            Label::BLoc => "B-LOC",
            Label::ILoc => "I-LOC",
            Label::O => "O",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL.iter().copied().find(|l| l.as_str() == s).ok_or_else(|| format!("unknown label `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    pub char_start: usize,
    pub char_end: usize,
}

impl Token {
    pub fn new(text: impl Into<String>, char_start: usize, char_end: usize) -> Self {
        Self { text: text.into(), char_start, char_end }
    }

    pub fn overlaps(&self, start: usize, end: usize) -> bool {
        self.char_start < end && start < self.char_end
    }
}

/// A typed span, possibly carrying nested mentions strictly inside it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntityMention {
    pub entity_type: EntityType,
    pub char_start: usize,
    pub char_end: usize,
    pub nested: Vec<EntityMention>,
}

impl EntityMention {
    pub fn new(entity_type: EntityType, char_start: usize, char_end: usize) -> Self {
        Self { entity_type, char_start, char_end, nested: Vec::new() }
    }

    pub fn with_nested(mut self, nested: Vec<EntityMention>) -> Self {
        self.nested = nested;
        self
    }

    pub fn len(&self) -> usize {
        self.char_end - self.char_start
    }

    pub fn is_empty(&self) -> bool {
        self.char_end <= self.char_start
    }

    pub fn overlaps(&self, other: &EntityMention) -> bool {
        self.char_start < other.char_end && other.char_start < self.char_end
    }

    pub fn same_span(&self, other: &EntityMention) -> bool {
        self.char_start == other.char_start && self.char_end == other.char_end
    }

    /// Check span ordering and nesting containment recursively.
    pub fn validate(&self) -> Result<(), String> {
        if self.char_start >= self.char_end {
            return Err(format!("empty mention span {}..{}", self.char_start, self.char_end));
        }
        for (i, inner) in self.nested.iter().enumerate() {
            inner.validate()?;
            let strictly_inside = inner.char_start >= self.char_start
                && inner.char_end <= self.char_end
                && (inner.char_start, inner.char_end) != (self.char_start, self.char_end);
            if !strictly_inside {
                return Err(format!(
                    "nested mention {}..{} not strictly inside {}..{}",
                    inner.char_start, inner.char_end, self.char_start, self.char_end
                ));
            }
            if self.nested[..i].iter().any(|other| other.overlaps(inner)) {
                return Err(format!("nested mentions overlap at {}..{}", inner.char_start, inner.char_end));
            }
        }
        Ok(())
    }

    /// The mention without its nested children.
    pub fn flat(&self) -> EntityMention {
        EntityMention::new(self.entity_type, self.char_start, self.char_end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Validation,
    Test,
    Unassigned,
}

impl Split {
    pub const ALL: [Split; 4] = [Split::Train, Split::Validation, Split::Test, Split::Unassigned];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL.iter().copied().find(|sp| sp.as_str() == s).ok_or_else(|| format!("unknown split `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedSentence {
    pub sentence_id: String,
    pub doc_id: String,
    pub language: String,
    pub text: String,
    pub tokens: Vec<Token>,
    pub tags: Vec<Label>,
    /// Gold mentions with nesting; only present for hand-checked test data.
    pub gold_entities: Option<Vec<EntityMention>>,
}

impl AnnotatedSentence {
    /// Top-level mentions read off the tag sequence (repairing stray I- tags).
    pub fn mentions(&self) -> Vec<EntityMention> {
        parse_bio(&self.tags, &self.tokens, BioMode::Repair).expect("tag/token lengths checked at construction")
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let invalid = |reason: String| CorpusError::InvalidSentence { sentence: self.sentence_id.clone(), reason };
        if self.tags.len() != self.tokens.len() {
            return Err(CorpusError::LengthMismatch { tags: self.tags.len(), tokens: self.tokens.len() });
        }
        let text_len = crate::text::char_len(&self.text);
        let mut prev_end = 0;
        for (i, tok) in self.tokens.iter().enumerate() {
            if tok.char_start >= tok.char_end {
                return Err(invalid(format!("token {i} has an empty span")));
            }
            if tok.char_start < prev_end {
                return Err(invalid(format!("token {i} overlaps its predecessor")));
            }
            if tok.char_end > text_len {
                return Err(invalid(format!("token {i} extends past the text")));
            }
            prev_end = tok.char_end;
        }
        parse_bio(&self.tags, &self.tokens, BioMode::Strict)?;
        if let Some(gold) = &self.gold_entities {
            for m in gold {
                m.validate().map_err(invalid)?;
                check_aligned(m, &self.tokens).map_err(invalid)?;
            }
            for (i, m) in gold.iter().enumerate() {
                if gold[..i].iter().any(|o| o.overlaps(m)) {
                    return Err(invalid("top-level gold mentions overlap".into()));
                }
            }
        }
        Ok(())
    }
}

fn check_aligned(m: &EntityMention, tokens: &[Token]) -> Result<(), String> {
    let starts = tokens.iter().any(|t| t.char_start == m.char_start);
    let ends = tokens.iter().any(|t| t.char_end == m.char_end);
    if !(starts && ends) {
        return Err(format!("mention {}..{} is not aligned to token boundaries", m.char_start, m.char_end));
    }
    m.nested.iter().try_for_each(|n| check_aligned(n, tokens))
}

/// A named list of sentences with one split tag per sentence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    pub name: String,
    pub sentences: Vec<AnnotatedSentence>,
    pub split_assignment: Vec<Split>,
}

impl Corpus {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn push(&mut self, sentence: AnnotatedSentence, split: Split) {
        self.sentences.push(sentence);
        self.split_assignment.push(split);
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AnnotatedSentence, Split)> {
        self.sentences.iter().zip(self.split_assignment.iter().copied())
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &AnnotatedSentence> {
        self.iter().filter(move |(_, s)| *s == split).map(|(s, _)| s)
    }

    /// Copy of the corpus restricted to one split.
    pub fn subset(&self, split: Split) -> Corpus {
        let mut out = Corpus::new(self.name.clone());
        for s in self.split(split) {
            out.push(s.clone(), split);
        }
        out
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.split_assignment.len() != self.sentences.len() {
            return Err(CorpusError::InvalidSentence {
                sentence: String::new(),
                reason: "split assignment does not cover every sentence".into(),
            });
        }
        let mut seen = HashSet::new();
        for s in &self.sentences {
            if !seen.insert(s.sentence_id.as_str()) {
                return Err(CorpusError::DuplicateSentenceId(s.sentence_id.clone()));
            }
            s.validate()?;
        }
        Ok(())
    }
}

/// Render `text` with each top-level mention wrapped as `[span]TYPE`.
/// Mentions must be non-overlapping; nested mentions are not shown.
pub fn bracket_mentions(text: &str, mentions: &[EntityMention]) -> String {
    let mut sorted: Vec<&EntityMention> = mentions.iter().collect();
    sorted.sort_by_key(|m| (m.char_start, m.char_end));
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() + 8 * mentions.len());
    let mut pos = 0;
    for m in sorted {
        if m.char_start < pos || m.char_end > chars.len() {
            continue;
        }
        out.extend(&chars[pos..m.char_start]);
        out.push('[');
        out.extend(&chars[m.char_start..m.char_end]);
        out.push(']');
        out.push_str(m.entity_type.as_str());
        pos = m.char_end;
    }
    out.extend(&chars[pos..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets() {
        let m = [EntityMention::new(EntityType::Loc, 21, 26), EntityMention::new(EntityType::Per, 0, 15)];
        assert_eq!(bracket_mentions("Blažek z Kralup dal  Praze.", &m), "[Blažek z Kralup]PER dal  [Praze]LOC.");
    }

    #[test]
    fn label_ids_are_stable() {
        for (i, l) in Label::ALL.iter().enumerate() {
            assert_eq!(l.id(), i);
            assert_eq!(Label::from_id(i), Some(*l));
            assert_eq!(l.as_str().parse::<Label>().unwrap(), *l);
        }
        assert_eq!(Label::from_id(5), None);
    }

    #[test]
    fn nested_validation() {
        let ok =
            EntityMention::new(EntityType::Per, 0, 15).with_nested(vec![EntityMention::new(EntityType::Loc, 9, 15)]);
        assert!(ok.validate().is_ok());
        let same_span =
            EntityMention::new(EntityType::Per, 0, 6).with_nested(vec![EntityMention::new(EntityType::Loc, 0, 6)]);
        assert!(same_span.validate().is_err());
        let overlapping = EntityMention::new(EntityType::Per, 0, 20)
            .with_nested(vec![EntityMention::new(EntityType::Loc, 2, 8), EntityMention::new(EntityType::Loc, 6, 10)]);
        assert!(overlapping.validate().is_err());
    }

    #[test]
    fn corpus_rejects_duplicate_ids_and_bad_bio() {
        let s = AnnotatedSentence {
            sentence_id: "s1".into(),
            doc_id: "d".into(),
            language: "cs".into(),
            text: "Jan".into(),
            tokens: vec![Token::new("Jan", 0, 3)],
            tags: vec![Label::BPer],
            gold_entities: None,
        };
        let mut c = Corpus::new("c");
        c.push(s.clone(), Split::Train);
        assert!(c.validate().is_ok());
        c.push(s.clone(), Split::Test);
        assert_eq!(c.validate(), Err(CorpusError::DuplicateSentenceId("s1".into())));

        let mut bad = s;
        bad.tags = vec![Label::IPer];
        let mut c = Corpus::new("c");
        c.push(bad, Split::Train);
        assert_eq!(c.validate(), Err(CorpusError::InvalidBio(0)));
    }
}
