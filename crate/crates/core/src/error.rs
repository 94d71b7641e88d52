//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid caller-supplied configuration (missing column, bad key, bad rate, ...).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("no sessions")]
    NoSessions,

    #[error("session outside date range: {0}")]
    SessionOutOfRange(String),

    #[error("insufficient day-type coverage: {0}")]
    DayTypeCoverage(String),

    /// A sample request violated the history or horizon bound.
    #[error("sample bounds: {0}")]
    SampleBounds(String),

    #[error("series too short: length {len}, need at least {needed}")]
    SeriesTooShort { len: usize, needed: usize },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("no admissible evaluation windows: {0}")]
    NoWindows(String),

    /// Malformed model container (bad magic, header, shapes, trailer).
    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("unsupported model format version {0}")]
    ModelVersion(u32),

    #[error("model file checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
