use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state vector must have dimension 3 or 4, got {0}")]
    BadDimension(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("state vector is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("reference-state leakage: |01> amplitude {0:e} exceeds tolerance")]
    Leakage(f64),

    #[error("no unique geodesic lift: endpoints are orthogonal (|overlap| = {0:e})")]
    OrthogonalEndpoints(f64),

    #[error("arc parameter {s} outside [0, {s_max}]")]
    ArcParameterOutOfRange { s: f64, s_max: f64 },

    #[error("total phase undefined: overlap magnitude {0:e} vanishes")]
    TotalPhaseUndefined(f64),

    #[error(
        "quadrature did not converge: estimated error {achieved:e} above tolerance {tolerance:e}"
    )]
    QuadratureNotConverged { achieved: f64, tolerance: f64 },

    #[error("invalid curve domain [{0}, {1}]")]
    BadDomain(f64, f64),

    #[error("degenerate polygon: overlap between vertices {index} and {next} is {magnitude:e}")]
    DegeneratePolygon {
        index: usize,
        next: usize,
        magnitude: f64,
    },

    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("parameter {name} = {value} outside its range")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("beta undefined (orthogonal closure): |<psi1|psi3>| = {0:e}")]
    BetaUndefined(f64),

    #[error("|11> amplitude must be real and non-negative, got {re} + {im}i")]
    NonRealTail { re: f64, im: f64 },

    #[error("convention mismatch: {stage} misses its target by {deviation:e}")]
    ConventionMismatch { stage: &'static str, deviation: f64 },

    #[error("no signal: coherence magnitude {0:e}")]
    NoSignal(f64),

    #[error("decomposition invalid: fidelity {0}")]
    DecompositionInvalid(f64),

    #[error("pulse sequence parse error on line {line}: {message}")]
    SequenceParse { line: usize, message: String },

    #[error("bad config: {0}")]
    Config(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
