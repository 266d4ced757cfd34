//! Little-endian binary framing for the persisted artifacts (collection cache,
//! indexes, models). Each file starts with an 8-byte magic and a u32 format
//! version.

use std::io::{self, Read, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("not a {expected} file (bad magic header)")]
    BadMagic { expected: &'static str },
    #[error("unsupported format version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },
    #[error("file is truncated or corrupt")]
    Truncated,
    #[error("invalid UTF-8 in string field")]
    InvalidUtf8,
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CodecError {
    pub fn name(&self) -> &'static str {
        match self {
            CodecError::BadMagic { .. } => "BadMagic",
            CodecError::UnsupportedVersion { .. } => "UnsupportedVersion",
            CodecError::Truncated => "Truncated",
            CodecError::InvalidUtf8 => "InvalidUtf8",
            CodecError::InvalidValue(_) => "InvalidValue",
            CodecError::Io(_) => "IoError",
        }
    }
}

pub struct BinWriter<W: Write> {
    inner: W,
}

impl<W: Write> BinWriter<W> {
    pub fn new(inner: W) -> Self {
        Self { inner }
    }

    pub fn header(&mut self, magic: &[u8; 8], version: u32) -> io::Result<()> {
        self.inner.write_all(magic)?;
        self.u32(version)
    }

    pub fn u8(&mut self, v: u8) -> io::Result<()> {
        self.inner.write_all(&[v])
    }

    pub fn u32(&mut self, v: u32) -> io::Result<()> {
        self.inner.write_all(&v.to_le_bytes())
    }

    pub fn u64(&mut self, v: u64) -> io::Result<()> {
        self.inner.write_all(&v.to_le_bytes())
    }

    pub fn len(&mut self, v: usize) -> io::Result<()> {
        self.u64(v as u64)
    }

    pub fn f64(&mut self, v: f64) -> io::Result<()> {
        self.inner.write_all(&v.to_le_bytes())
    }

    pub fn str(&mut self, s: &str) -> io::Result<()> {
        self.len(s.len())?;
        self.inner.write_all(s.as_bytes())
    }

    pub fn into_inner(self) -> W {
        self.inner
    }
}

pub struct BinReader<R: Read> {
    inner: R,
}

#[allow(clippy::len_without_is_empty)]
impl<R: Read> BinReader<R> {
    pub fn new(inner: R) -> Self {
        Self { inner }
    }

    pub fn header(&mut self, magic: &[u8; 8], version: u32, what: &'static str) -> Result<(), CodecError> {
        let mut buf = [0u8; 8];
        self.exact(&mut buf)?;
        if &buf != magic {
            return Err(CodecError::BadMagic { expected: what });
        }
        let found = self.u32()?;
        if found != version {
            return Err(CodecError::UnsupportedVersion { found, expected: version });
        }
        Ok(())
    }

    fn exact(&mut self, buf: &mut [u8]) -> Result<(), CodecError> {
        self.inner.read_exact(buf).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => CodecError::Truncated,
            _ => CodecError::Io(e),
        })
    }

    pub fn u8(&mut self) -> Result<u8, CodecError> {
        let mut b = [0u8; 1];
        self.exact(&mut b)?;
        Ok(b[0])
    }

    pub fn u32(&mut self) -> Result<u32, CodecError> {
        let mut b = [0u8; 4];
        self.exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }

    pub fn u64(&mut self) -> Result<u64, CodecError> {
        let mut b = [0u8; 8];
        self.exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }

    /// A length prefix, bounded so corrupt input cannot trigger huge allocations.
    pub fn len(&mut self) -> Result<usize, CodecError> {
        let v = self.u64()?;
        if v > (1 << 40) {
            return Err(CodecError::Truncated);
        }
        Ok(v as usize)
    }

    pub fn f64(&mut self) -> Result<f64, CodecError> {
        let mut b = [0u8; 8];
        self.exact(&mut b)?;
        Ok(f64::from_le_bytes(b))
    }

    pub fn str(&mut self) -> Result<String, CodecError> {
        let n = self.len()?;
        let mut buf = Vec::new();
        (&mut self.inner).take(n as u64).read_to_end(&mut buf).map_err(CodecError::Io)?;
        if buf.len() != n {
            return Err(CodecError::Truncated);
        }
        String::from_utf8(buf).map_err(|_| CodecError::InvalidUtf8)
    }

    /// Succeeds only if the input is fully consumed.
    pub fn finish(mut self) -> Result<(), CodecError> {
        let mut b = [0u8; 1];
        match self.inner.read(&mut b)? {
            0 => Ok(()),
            _ => Err(CodecError::InvalidValue("trailing bytes".into())),
        }
    }
}
