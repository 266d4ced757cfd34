//! Loading OCR page texts into segmented, tokenized documents.

mod normalize;
mod segment;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::codec::{BinReader, BinWriter, CodecError};
use crate::corpus::Token;
use crate::text::CharText;

pub use normalize::{parse_lemma_dictionary, parse_suffix_rules, Normalizer, SuffixRule};
pub use segment::{tokenize, SentenceSplitter};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error("duplicate document id `{0}`")]
    DuplicateDocId(String),
    #[error("{0} is not valid UTF-8")]
    InvalidEncoding(PathBuf),
    #[error("manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("collection cache: {0}")]
    Cache(#[from] CodecError),
}

impl IngestError {
    pub fn name(&self) -> &'static str {
        match self {
            IngestError::MissingFile(_) => "MissingFile",
            IngestError::DuplicateDocId(_) => "DuplicateDocId",
            IngestError::InvalidEncoding(_) => "InvalidEncoding",
            IngestError::Manifest { .. } => "ManifestError",
            IngestError::Io { .. } => "IoError",
            IngestError::Cache(_) => "CacheError",
        }
    }
}

/// A sentence within a document: trimmed character span plus the range of
/// document tokens it contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SentenceSpan {
    pub char_start: usize,
    pub char_end: usize,
    pub token_start: usize,
    pub token_end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub language: String,
    text: CharText,
    /// Non-empty sentences with surrounding whitespace trimmed.
    pub sentences: Vec<SentenceSpan>,
    /// Tokens with document-level character offsets.
    pub tokens: Vec<Token>,
}

impl Document {
    pub fn new(
        doc_id: impl Into<String>,
        language: impl Into<String>,
        text: impl Into<String>,
        splitter: &SentenceSplitter,
    ) -> Self {
        let text = CharText::new(text);
        let tokens = tokenize(text.as_str());
        let mut sentences = Vec::new();
        let mut next_token = 0;
        for (start, end) in splitter.split(text.as_str()) {
            let first = next_token;
            while next_token < tokens.len() && tokens[next_token].char_end <= end {
                next_token += 1;
            }
            if first == next_token {
                continue;
            }
            sentences.push(SentenceSpan {
                char_start: tokens[first].char_start.max(start),
                char_end: tokens[next_token - 1].char_end,
                token_start: first,
                token_end: next_token,
            });
        }
        Self { doc_id: doc_id.into(), language: language.into(), text, sentences, tokens }
    }

    pub fn text(&self) -> &str {
        self.text.as_str()
    }

    pub fn char_len(&self) -> usize {
        self.text.len()
    }

    pub fn slice(&self, start: usize, end: usize) -> &str {
        self.text.slice(start, end)
    }

    pub fn sentence_id(&self, index: usize) -> String {
        sentence_id(&self.doc_id, index)
    }

    pub fn sentence_text(&self, index: usize) -> &str {
        let s = &self.sentences[index];
        self.slice(s.char_start, s.char_end)
    }

    /// Tokens of one sentence, rebased to sentence-relative offsets.
    pub fn sentence_tokens(&self, index: usize) -> Vec<Token> {
        let s = &self.sentences[index];
        self.tokens[s.token_start..s.token_end]
            .iter()
            .map(|t| Token::new(t.text.clone(), t.char_start - s.char_start, t.char_end - s.char_start))
            .collect()
    }

    /// Index of the sentence containing character `pos`, or of the first
    /// sentence starting after it when `pos` falls in inter-sentence space.
    pub fn sentence_at(&self, pos: usize) -> Option<usize> {
        let i = self.sentences.partition_point(|s| s.char_end <= pos);
        (i < self.sentences.len()).then_some(i)
    }
}

pub fn sentence_id(doc_id: &str, index: usize) -> String {
    format!("{doc_id}#{index:04}")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocumentCollection {
    docs: Vec<Document>,
    by_id: HashMap<String, usize>,
}

impl DocumentCollection {
    pub fn new(docs: Vec<Document>) -> Result<Self, IngestError> {
        let mut by_id = HashMap::with_capacity(docs.len());
        for (i, d) in docs.iter().enumerate() {
            if by_id.insert(d.doc_id.clone(), i).is_some() {
                return Err(IngestError::DuplicateDocId(d.doc_id.clone()));
            }
        }
        Ok(Self { docs, by_id })
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.by_id.get(doc_id).map(|&i| &self.docs[i])
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn sentence_count(&self) -> usize {
        self.docs.iter().map(|d| d.sentences.len()).sum()
    }

    /// Documents ordered by doc id (the global tie-break order).
    pub fn sorted_docs(&self) -> Vec<&Document> {
        let mut docs: Vec<&Document> = self.docs.iter().collect();
        docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        docs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub doc_id: String,
    pub language: String,
    pub relative_path: PathBuf,
}

/// Parse a `doc_id\tlanguage\trelative_path` manifest.
pub fn parse_manifest(contents: &str) -> Result<Vec<ManifestEntry>, IngestError> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in contents.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 || fields.iter().any(|f| f.is_empty()) {
            return Err(IngestError::Manifest {
                line: i + 1,
                reason: "expected `doc_id\\tlanguage\\trelative_path`".into(),
            });
        }
        if fields[0].chars().any(char::is_whitespace) {
            return Err(IngestError::Manifest { line: i + 1, reason: "doc_id must not contain whitespace".into() });
        }
        if !seen.insert(fields[0].to_string()) {
            return Err(IngestError::DuplicateDocId(fields[0].to_string()));
        }
        entries.push(ManifestEntry {
            doc_id: fields[0].to_string(),
            language: fields[1].to_string(),
            relative_path: PathBuf::from(fields[2]),
        });
    }
    Ok(entries)
}

/// Load every page listed in the manifest (paths relative to the manifest's
/// directory). Files are read in parallel; documents keep manifest order.
pub fn load_collection(manifest_path: &Path, splitter: &SentenceSplitter) -> Result<DocumentCollection, IngestError> {
    let contents = read_utf8(manifest_path)?;
    let entries = parse_manifest(&contents)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let docs = entries
        .par_iter()
        .map(|e| {
            let text = read_utf8(&base.join(&e.relative_path))?;
            Ok(Document::new(e.doc_id.clone(), e.language.clone(), text, splitter))
        })
        .collect::<Result<Vec<_>, IngestError>>()?;
    DocumentCollection::new(docs)
}

pub(crate) fn read_utf8(path: &Path) -> Result<String, IngestError> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => IngestError::MissingFile(path.to_path_buf()),
        _ => IngestError::Io { path: path.to_path_buf(), source: e },
    })?;
    String::from_utf8(bytes).map_err(|_| IngestError::InvalidEncoding(path.to_path_buf()))
}

const CACHE_MAGIC: &[u8; 8] = b"SNERCOL\0";
const CACHE_VERSION: u32 = 1;

/// Persist a collection (text plus segmentation).
pub fn write_collection<W: Write>(w: W, collection: &DocumentCollection) -> std::io::Result<()> {
    let mut w = BinWriter::new(w);
    w.header(CACHE_MAGIC, CACHE_VERSION)?;
    w.len(collection.docs.len())?;
    for d in &collection.docs {
        w.str(&d.doc_id)?;
        w.str(&d.language)?;
        w.str(d.text())?;
        w.len(d.tokens.len())?;
        for t in &d.tokens {
            w.len(t.char_start)?;
            w.len(t.char_end)?;
        }
        w.len(d.sentences.len())?;
        for s in &d.sentences {
            w.len(s.char_start)?;
            w.len(s.char_end)?;
            w.len(s.token_start)?;
            w.len(s.token_end)?;
        }
    }
    Ok(())
}

pub fn read_collection<R: Read>(r: R) -> Result<DocumentCollection, IngestError> {
    let mut r = BinReader::new(r);
    r.header(CACHE_MAGIC, CACHE_VERSION, "collection cache")?;
    let n = r.len()?;
    let mut docs = Vec::with_capacity(n.min(1 << 16));
    for _ in 0..n {
        let doc_id = r.str()?;
        let language = r.str()?;
        let text = CharText::new(r.str()?);
        let n_tokens = r.len()?;
        let mut tokens = Vec::with_capacity(n_tokens.min(1 << 20));
        for _ in 0..n_tokens {
            let (a, b) = (r.len()?, r.len()?);
            if a >= b || b > text.len() {
                return Err(CodecError::InvalidValue("token span".into()).into());
            }
            tokens.push(Token::new(text.slice(a, b), a, b));
        }
        let n_sent = r.len()?;
        let mut sentences = Vec::with_capacity(n_sent.min(1 << 20));
        for _ in 0..n_sent {
            let s =
                SentenceSpan { char_start: r.len()?, char_end: r.len()?, token_start: r.len()?, token_end: r.len()? };
            if s.token_start >= s.token_end || s.token_end > tokens.len() {
                return Err(CodecError::InvalidValue("sentence span".into()).into());
            }
            sentences.push(s);
        }
        docs.push(Document { doc_id, language, text, sentences, tokens });
    }
    r.finish()?;
    DocumentCollection::new(docs)
}
