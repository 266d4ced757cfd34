//! CoNLL-style corpus files and the nested gold-entity sidecar.
//!
//! ```text
//! # corpus=books-small seed=42
//!
//! # id=d1#0000 doc=d1 lang=cs split=train
//! # text=Jan z Kralup.
//! Jan	B-PER
//! z	I-PER
//! Kralup	I-PER
//! .	O
//! ```
//!
//! The `# text=` line is optional. When present it carries the exact sentence
//! text (with `\\`, `\t`, `\n`, `\r` escaped) so character offsets survive a
//! round trip; when absent the text is rebuilt by joining tokens with spaces.

#![allow(clippy::tabs_in_doc_comments)]

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{AnnotatedSentence, Corpus, CorpusError, EntityMention, Label, Split, Token};
use crate::text::char_len;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusHeader {
    pub name: String,
    pub seed: Option<u64>,
}

pub fn write_corpus<W: Write>(mut w: W, corpus: &Corpus, seed: Option<u64>) -> std::io::Result<()> {
    write!(w, "# corpus={}", corpus.name)?;
    if let Some(seed) = seed {
        write!(w, " seed={seed}")?;
    }
    writeln!(w)?;
    for (s, split) in corpus.iter() {
        writeln!(w)?;
        writeln!(w, "# id={} doc={} lang={} split={}", s.sentence_id, s.doc_id, s.language, split)?;
        writeln!(w, "# text={}", escape(&s.text))?;
        for (tok, tag) in s.tokens.iter().zip(&s.tags) {
            writeln!(w, "{}\t{}", tok.text, tag)?;
        }
    }
    Ok(())
}

struct Pending {
    line: usize,
    sentence_id: String,
    doc_id: String,
    language: String,
    split: Split,
    text: Option<String>,
    rows: Vec<(String, Label)>,
}

/// Read a corpus file. Every sentence is validated (strict BIO).
pub fn read_corpus<R: BufRead>(reader: R) -> Result<(Corpus, CorpusHeader), CorpusError> {
    let mut header = CorpusHeader::default();
    let mut corpus = Corpus::default();
    let mut pending: Option<Pending> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| CorpusError::Parse { line: lineno, reason: e.to_string() })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(p) = pending.take() {
                finish(&mut corpus, p)?;
            }
        } else if let Some(rest) = line.strip_prefix("# id=") {
            if let Some(p) = pending.take() {
                finish(&mut corpus, p)?;
            }
            pending = Some(parse_sentence_header(rest, lineno)?);
        } else if let Some(rest) = line.strip_prefix("# text=") {
            match pending.as_mut() {
                Some(p) if p.rows.is_empty() => p.text = Some(unescape(rest)),
                _ => {
                    return Err(CorpusError::Parse {
                        line: lineno,
                        reason: "text line outside a sentence header".into(),
                    })
                }
            }
        } else if let Some(rest) = line.strip_prefix('#') {
            if pending.is_none() && corpus.is_empty() {
                for field in rest.split_whitespace() {
                    match field.split_once('=') {
                        Some(("corpus", v)) => header.name = v.to_string(),
                        Some(("seed", v)) => header.seed = v.parse().ok(),
                        _ => {}
                    }
                }
            }
        } else {
            let p = pending.as_mut().ok_or_else(|| CorpusError::Parse {
                line: lineno,
                reason: "token line before any sentence header".into(),
            })?;
            let (tok, label) = line
                .split_once('\t')
                .ok_or_else(|| CorpusError::Parse { line: lineno, reason: "expected `<token>\\t<label>`".into() })?;
            let label = label.trim().parse::<Label>().map_err(|reason| CorpusError::Parse { line: lineno, reason })?;
            if tok.is_empty() || tok.chars().any(char::is_whitespace) {
                return Err(CorpusError::Parse {
                    line: lineno,
                    reason: "token text is empty or contains whitespace".into(),
                });
            }
            p.rows.push((tok.to_string(), label));
        }
    }
    if let Some(p) = pending.take() {
        finish(&mut corpus, p)?;
    }
    corpus.name = header.name.clone();
    corpus.validate()?;
    Ok((corpus, header))
}

fn parse_sentence_header(rest: &str, line: usize) -> Result<Pending, CorpusError> {
    let mut fields = HashMap::new();
    let mut parts = rest.split_whitespace();
    let id = parts.next().ok_or_else(|| CorpusError::Parse { line, reason: "missing sentence id".into() })?;
    for part in parts {
        if let Some((k, v)) = part.split_once('=') {
            fields.insert(k, v);
        }
    }
    let get = |key: &str| {
        fields
            .get(key)
            .map(|v| v.to_string())
            .ok_or_else(|| CorpusError::Parse { line, reason: format!("sentence header missing `{key}=`") })
    };
    let split = get("split")?.parse::<Split>().map_err(|reason| CorpusError::Parse { line, reason })?;
    Ok(Pending {
        line,
        sentence_id: id.to_string(),
        doc_id: get("doc")?,
        language: get("lang")?,
        split,
        text: None,
        rows: Vec::new(),
    })
}

fn finish(corpus: &mut Corpus, p: Pending) -> Result<(), CorpusError> {
    let text = p.text.unwrap_or_else(|| p.rows.iter().map(|(t, _)| t.as_str()).collect::<Vec<_>>().join(" "));
    let tokens = align_tokens(&text, p.rows.iter().map(|(t, _)| t.as_str()))
        .map_err(|reason| CorpusError::Parse { line: p.line, reason })?;
    corpus.push(
        AnnotatedSentence {
            sentence_id: p.sentence_id,
            doc_id: p.doc_id,
            language: p.language,
            text,
            tokens,
            tags: p.rows.into_iter().map(|(_, l)| l).collect(),
            gold_entities: None,
        },
        p.split,
    );
    Ok(())
}

/// Recover character offsets by locating each token in order, skipping only
/// whitespace between them.
fn align_tokens<'a>(text: &str, token_texts: impl Iterator<Item = &'a str>) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let mut out = Vec::new();
    for tok in token_texts {
        while pos < chars.len() && chars[pos].is_whitespace() {
            pos += 1;
        }
        let len = char_len(tok);
        let found: String = chars[pos..(pos + len).min(chars.len())].iter().collect();
        if found != tok {
            return Err(format!("token `{tok}` not found in text at offset {pos}"));
        }
        out.push(Token::new(tok, pos, pos + len));
        pos += len;
    }
    Ok(out)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

/// One record per mention in pre-order; `parent_index` refers to the
/// record's position among the same sentence's records.
pub fn write_gold_sidecar<W: Write>(mut w: W, corpus: &Corpus) -> std::io::Result<()> {
    fn emit<W: Write>(w: &mut W, sid: &str, m: &EntityMention, parent: i64, next: &mut i64) -> std::io::Result<()> {
        let me = *next;
        *next += 1;
        writeln!(w, "{sid}\t{}\t{}\t{}\t{parent}", m.entity_type, m.char_start, m.char_end)?;
        for inner in &m.nested {
            emit(w, sid, inner, me, next)?;
        }
        Ok(())
    }
    for s in &corpus.sentences {
        if let Some(gold) = &s.gold_entities {
            let mut next = 0;
            for m in gold {
                emit(&mut w, &s.sentence_id, m, -1, &mut next)?;
            }
        }
    }
    Ok(())
}

/// Attach nested gold entities from a sidecar file to the corpus sentences.
/// Sentences not mentioned in the file get an empty gold list.
pub fn read_gold_sidecar<R: BufRead>(reader: R, corpus: &mut Corpus) -> Result<(), CorpusError> {
    let mut records: HashMap<String, Vec<(EntityMention, i64)>> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let perr = |reason: String| CorpusError::Parse { line: lineno, reason };
        let line = line.map_err(|e| perr(e.to_string()))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
        if f.len() != 5 {
            return Err(perr(format!("expected 5 fields, found {}", f.len())));
        }
        let ty = f[1].parse().map_err(perr)?;
        let start: usize = f[2].parse().map_err(|_| perr("bad char_start".into()))?;
        let end: usize = f[3].parse().map_err(|_| perr("bad char_end".into()))?;
        let parent: i64 = f[4].parse().map_err(|_| perr("bad parent index".into()))?;
        let list = records.entry(f[0].to_string()).or_default();
        if parent >= list.len() as i64 || parent < -1 {
            return Err(perr(format!("parent index {parent} does not precede record")));
        }
        list.push((EntityMention::new(ty, start, end), parent));
    }

    let ids: std::collections::HashSet<&str> = corpus.sentences.iter().map(|s| s.sentence_id.as_str()).collect();
    let mut unknown: Vec<&String> = records.keys().filter(|k| !ids.contains(k.as_str())).collect();
    unknown.sort();
    if let Some(first) = unknown.first() {
        return Err(CorpusError::UnknownSentence((*first).clone()));
    }

    for s in &mut corpus.sentences {
        let list = records.remove(&s.sentence_id).unwrap_or_default();
        s.gold_entities = Some(build_tree(list));
    }
    corpus.validate()
}

fn build_tree(list: Vec<(EntityMention, i64)>) -> Vec<EntityMention> {
    let parents: Vec<i64> = list.iter().map(|(_, p)| *p).collect();
    let mut nodes: Vec<Option<EntityMention>> = list.into_iter().map(|(m, _)| Some(m)).collect();
    let mut top = Vec::new();
    for i in (0..nodes.len()).rev() {
        let node = nodes[i].take().expect("each node taken once");
        match parents[i] {
            -1 => top.push(node),
            p => nodes[p as usize].as_mut().expect("parent precedes child").nested.insert(0, node),
        }
    }
    top.reverse();
    top
}
