use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScfError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("malformed PPM: {0}")]
    Ppm(String),

    #[error("unsupported bit depth {0} (supported: 1..=16)")]
    UnsupportedDepth(u8),

    #[error("not an SCF bitstream (bad magic)")]
    BadMagic,

    #[error("unsupported bitstream version {0}")]
    UnsupportedVersion(u8),

    #[error("corrupt stream: {0}")]
    Corrupt(String),
}

impl ScfError {
    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        ScfError::Corrupt(msg.into())
    }

    /// True for errors caused by malformed or truncated bitstreams.
    pub fn is_corrupt_stream(&self) -> bool {
        matches!(
            self,
            ScfError::BadMagic | ScfError::UnsupportedVersion(_) | ScfError::Corrupt(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, ScfError>;
