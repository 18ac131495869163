use std::path::PathBuf;

/// Errors produced anywhere in the workbench.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("phase {0} is outside its allowed range")]
    InvalidPhase(f64),
    #[error("fraction {0} is outside [0, 1]")]
    InvalidFraction(f64),
    #[error("grid size {0} is not a power of two >= 2")]
    InvalidGrid(u64),
    #[error("phase {phase} is not on the 1/{grid} grid")]
    OffGrid { phase: f64, grid: u64 },
    #[error("sample list is empty")]
    EmptySamples,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("oracle table is degenerate: g is constant {0}")]
    DegenerateOracle(u8),
    #[error("malformed PFM header: {0}")]
    MalformedHeader(String),
    #[error("image dimensions {width}x{height} overflow")]
    DimensionOverflow { width: u64, height: u64 },
    #[error("truncated pixel data: expected {expected} bytes, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("non-finite value at component {0}")]
    NonFinite(usize),
    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("PNG encoding failed: {0}")]
    Png(#[from] png::EncodingError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
