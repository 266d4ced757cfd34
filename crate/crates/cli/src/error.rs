use std::fmt;

/// A failed command: usage problems exit with 2, data problems with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data { name: &'static str, message: String },
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn data(name: &'static str, message: impl fmt::Display) -> Self {
        CliError::Data { name, message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data { .. } => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data { name, message } => write!(f, "{name}: {message}"),
        }
    }
}

macro_rules! impl_from_named {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::data(e.name(), &e)
            }
        }
    )*};
}

impl_from_named!(
    silverner::ingest::IngestError,
    silverner::corpus::CorpusError,
    silverner::codec::CodecError,
    silverner::bootstrap::BootstrapError,
    silverner::rerank::RerankError,
    silverner::tagger::TaggerError,
    silverner::eval::EvalError
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::data("IoError", e)
    }
}
