use std::collections::BTreeMap;
use std::fmt;

use super::{Corpus, Label, Split};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SplitStats {
    pub sentences: usize,
    pub b_per: usize,
    pub b_loc: usize,
}

impl std::ops::AddAssign for SplitStats {
    fn add_assign(&mut self, rhs: Self) {
        self.sentences += rhs.sentences;
        self.b_per += rhs.b_per;
        self.b_loc += rhs.b_loc;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusStats {
    pub name: String,
    pub per_split: BTreeMap<Split, SplitStats>,
    pub total: SplitStats,
}

impl CorpusStats {
    pub fn split(&self, split: Split) -> SplitStats {
        self.per_split.get(&split).copied().unwrap_or_default()
    }
}

/// Sentence and entity-start counts per split, read from the tags.
pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut per_split: BTreeMap<Split, SplitStats> = Split::ALL.iter().map(|&s| (s, SplitStats::default())).collect();
    for (sentence, split) in corpus.iter() {
        let entry = per_split.entry(split).or_default();
        entry.sentences += 1;
        for tag in &sentence.tags {
            match tag {
                Label::BPer => entry.b_per += 1,
                Label::BLoc => entry.b_loc += 1,
                _ => {}
            }
        }
    }
    let mut total = SplitStats::default();
    for s in per_split.values() {
        total += *s;
    }
    CorpusStats { name: corpus.name.clone(), per_split, total }
}

impl fmt::Display for CorpusStats {
    /// Table-1 style layout: one row per split and a total row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Corpus: {}", self.name)?;
        writeln!(f, "{:<12} {:>10} {:>10} {:>10}", "Split", "Sentences", "B-PER", "B-LOC")?;
        for (split, s) in &self.per_split {
            if *split == Split::Unassigned && s.sentences == 0 {
                continue;
            }
            writeln!(f, "{:<12} {:>10} {:>10} {:>10}", split.as_str(), s.sentences, s.b_per, s.b_loc)?;
        }
        writeln!(f, "{:<12} {:>10} {:>10} {:>10}", "total", self.total.sentences, self.total.b_per, self.total.b_loc)
    }
}
