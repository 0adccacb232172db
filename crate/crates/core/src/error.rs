use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A point or window reaches past the end of the coefficient table.
    #[error("{what} = {value} lies outside the table range [0, {n_max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        n_max: usize,
    },

    /// A short-interval window `[X, 2X + U]` does not fit in the table.
    #[error("window X = {x}, U = {u} needs index {needed} but n_max = {n_max}")]
    WindowOutOfRange {
        x: u64,
        u: f64,
        needed: u64,
        n_max: usize,
    },

    #[error("resource limit exceeded: {0}")]
    ResourceExhausted(String),

    #[error("tau({n}) does not fit in a signed 128-bit integer")]
    UnsupportedRange { n: usize },

    #[error("corrupt cache: {0}")]
    CorruptCache(String),

    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("imported tau({n}) = {imported} disagrees with the sieve value {sieved}")]
    CrossCheck {
        n: usize,
        imported: i128,
        sieved: i128,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
