use thiserror::Error;

/// Errors raised across the crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("chain length {0} must be even and at least 2")]
    InvalidLength(usize),
    #[error("coupling or chemical potential is not finite")]
    NonFiniteCoupling,
    #[error("coupling list is empty or does not match nf")]
    EmptyCouplings,
    #[error("all couplings and the chemical potential vanish")]
    AllZeroCouplings,
    #[error("root finder did not converge after {iterations} iterations (max residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("the spectrum is gapless (min gap {0:e})")]
    GaplessSpec(f64),
    #[error("null space has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("chain length {length} too small for range {range}")]
    LengthTooSmall { length: usize, range: usize },
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("separation {r} outside the admissible range 1..={max}")]
    LengthOutOfRange { r: usize, max: usize },
    #[error("scaling fit needs at least two distinct lengths")]
    FitDegenerate,
    #[error("operator support {first}..={last} does not fit in a chain of {length} sites")]
    SupportOverflow { first: i64, last: i64, length: usize },
    #[error("exact diagonalisation limited to {max} sites, got {length}")]
    SizeLimitExceeded { length: usize, max: usize },
    #[error("degenerate ground state (gap {0:e})")]
    DegenerateGroundState(f64),
    #[error("Lanczos did not converge (residual {0:e})")]
    LanczosNoConvergence(f64),
    #[error("couplings must be strictly positive")]
    NonPositiveCoupling,
    #[error("winding index must be nonzero")]
    ZeroWinding,
    #[error("the loop (y, z) is degenerate: every momentum is a gap-closing candidate")]
    DegenerateLoop,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
