use thiserror::Error;

/// Errors produced by image construction and the processing operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("image dimensions must be nonzero, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },

    #[error("buffer of {actual} values does not match {width}x{height} ({expected} expected)")]
    BufferSize {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("parameter `{name}` out of range: got {value}, expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
}

impl Error {
    pub(crate) fn parameter(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            expected,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
