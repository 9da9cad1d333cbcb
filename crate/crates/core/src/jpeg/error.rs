use thiserror::Error;

/// Errors raised while reading or writing a JPEG stream.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JpegError {
    /// Truncated or garbled marker segments or entropy-coded data.
    #[error("malformed JPEG stream: {0}")]
    MalformedStream(String),
    /// A valid JPEG that uses a coding process other than baseline sequential Huffman.
    #[error("unsupported JPEG: {0}")]
    UnsupportedJpeg(String),
    /// A coefficient (or DC difference) cannot be represented by a Huffman magnitude category ≤ 15.
    #[error(
        "coefficient {value} in component {component}, block {block} is not entropy-encodable"
    )]
    EncodingOverflow {
        component: usize,
        block: usize,
        value: i32,
    },
}

pub type Result<T> = std::result::Result<T, JpegError>;

pub(crate) fn malformed<T>(msg: impl Into<String>) -> Result<T> {
    Err(JpegError::MalformedStream(msg.into()))
}

pub(crate) fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(JpegError::UnsupportedJpeg(msg.into()))
}
