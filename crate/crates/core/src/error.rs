use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("layout mismatch in {0}")]
    LayoutMismatch(&'static str),
    #[error("non-finite value at index {index} in {context}")]
    NonFinite { context: &'static str, index: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("index {index} out of range (len {len}) in {context}")]
    OutOfRange {
        context: &'static str,
        index: usize,
        len: usize,
    },
    #[error("aggregation weights of client {client} sum to zero after clipping")]
    ZeroWeightSum { client: usize },
    #[error("round {round} failed: {source}")]
    Round {
        round: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
