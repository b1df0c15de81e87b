use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` is not finite (got {value})")]
    NonFiniteParameter { name: &'static str, value: f64 },

    #[error("chain too short: need L >= {required}, got {got}")]
    ChainTooShort { required: usize, got: usize },

    #[error("chain length {length} exceeds the engine cap {cap}")]
    LengthCap { length: usize, cap: usize },

    #[error("coupling range {range} does not fit on a chain of length {length}")]
    RangeTooLarge { range: usize, length: usize },

    #[error("site {site} out of range for chain of length {length}")]
    SiteOutOfRange { site: usize, length: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("repeated site {site} in Pauli term")]
    RepeatedSite { site: usize },

    #[error("state is not an eigenstate: residual norm {residual:e}")]
    ResidualTooLarge { residual: f64 },

    #[error("expectation value of a Hermitian operator has imaginary part {imag:e}")]
    NonRealExpectation { imag: f64 },

    #[error("evolution did not converge after {steps} substeps (residual {residual:e})")]
    NonConvergence { steps: usize, residual: f64 },

    #[error("no commuting-gate decomposition: {reason}; use the Krylov evolver")]
    UnsupportedDecomposition { reason: String },

    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("region is empty")]
    EmptyRegion,

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("too few points: need at least {required}, got {got}")]
    TooFewPoints { required: usize, got: usize },

    #[error("operator leaks out of the requested symmetry sector (leakage {leakage:e})")]
    SectorLeakage { leakage: f64 },

    #[error("sector spec is inconsistent: {0}")]
    InvalidSector(String),

    #[error("{0}")]
    Invalid(String),
}
