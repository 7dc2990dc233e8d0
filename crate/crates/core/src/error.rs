use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` must be strictly positive (got {value})")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("lattice extent `{name}` must be even and at least 4 (got {value})")]
    OddLatticeSize { name: &'static str, value: usize },
    #[error("dense oracle refused: {sites} sites exceeds the limit of {limit}")]
    LatticeTooLargeForDenseOracle { sites: usize, limit: usize },

    #[error("negative Wick order {0}")]
    NegativeOrder(i64),
    #[error("negative covariance constant {0}")]
    NegativeCovariance(f64),
    #[error("polynomial is not bounded below: {0}")]
    BoundedBelowViolation(String),
    #[error("polynomial degree {0} exceeds the supported maximum of 20")]
    DegreeTooLarge(usize),

    #[error("separation {value} lies outside the period [0, {period}]")]
    ArgumentOutsidePeriod { value: f64, period: f64 },
    #[error("point lies outside the analyticity domain: {0}")]
    PointOutsideAnalyticityDomain(String),
    #[error("quadrature tail bound {bound:e} could not be brought below {tolerance:e}")]
    QuadratureTailTooLarge { bound: f64, tolerance: f64 },
    #[error("imaginary time {0} lies on the wrong side of the forward tube")]
    TubeViolation(f64),
    #[error("mode-sum tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    TailTooLarge { bound: f64, tolerance: f64 },
    #[error("expected {expected} lambda weights, got {got}")]
    LambdaMismatch { expected: usize, got: usize },
    #[error("invalid lambda weights: {0}")]
    InvalidLambdas(String),

    #[error("configuration does not belong to the measure's lattice")]
    LatticeMismatch,
    #[error("spatial cutoff l = {l} must satisfy 0 < l <= L = {half_length}")]
    InvalidCutoff { l: f64, half_length: f64 },
    #[error("reweighting degenerate: effective sample size {ess:.2} < 10")]
    DegenerateWeights { ess: f64 },
    #[error("Metropolis acceptance {rate:.3} outside [0.3, 0.6] after tuning")]
    AcceptanceOutOfRange { rate: f64 },
    #[error("local Metropolis updates need the nearest-neighbour lattice Laplacian")]
    NonLocalDispersion,
    #[error("invalid run parameters: {0}")]
    InvalidRunParameters(String),

    #[error("time {alpha} does not coincide with a lattice slice")]
    OffLatticeTime { alpha: f64 },
    #[error("invalid smeared point: {0}")]
    InvalidSmearing(String),
    #[error("functional `{0}` touches sites outside the reflection-positive half")]
    SupportViolation(String),
    #[error("exact axis-swap variant requires beta = 2L and n_alpha = n_x")]
    AsymmetricLatticeForExactVariant,
    #[error("gap too small: exponent p = {p} exceeds 12")]
    GapTooSmall { p: usize },

    #[error("holomorphy stencil left the domain: {0}")]
    StencilOutsideDomain(String),
    #[error("spectrum bound fails only in the truncation-polluted top decile ({violations} states)")]
    TruncationTooSevere { violations: usize },

    #[error("Fock space dimension {dim} exceeds the limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("no (c1, c2) on the search grid satisfies the phi-bound")]
    NoConstantsFound,
    #[error("ground state is degenerate (gap {gap:e})")]
    DegenerateGround { gap: f64 },
    #[error("Hoelder exponent infeasible: a Euclidean-time gap is zero")]
    ExponentInfeasible,
    #[error("invalid matrix input: {0}")]
    InvalidMatrix(String),

    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("invalid value for `{field}`: {message}")]
    ValidationError { field: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
