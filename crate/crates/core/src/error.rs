use thiserror::Error;

/// Errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate {value} on axis {axis} lies outside [0, 1]")]
    CoordinateOutOfRange { axis: usize, value: f64 },

    #[error("cube side must be positive and finite, got {0}")]
    NonPositiveTheta(f64),

    #[error("sample size mismatch: |X| = {x}, |Y| = {y}")]
    SizeMismatch { x: usize, y: usize },

    #[error("(2^{l} - 1)^{d} does not fit in a 64-bit box index")]
    ResolutionOverflow { l: u32, d: u32 },

    #[error("{what}: exact mode supports at most {limit}, requested {requested}; {hint}")]
    SizeGuard {
        what: &'static str,
        limit: u64,
        requested: u64,
        hint: &'static str,
    },

    #[error("not a lattice bound on axis {axis}: upper cell count {upper} not in [1, {max}]")]
    NonLatticeBound { axis: usize, upper: u64, max: u64 },

    #[error("round cap {cap} exceeded; a vector's l1 norm likely violates the declared bound")]
    RoundCapExceeded { cap: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
