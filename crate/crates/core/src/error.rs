use thiserror::Error;

/// Errors raised by the quaternionic Blaschke machinery.
///
/// Every variant has a stable machine-readable name (see [`Error::name`])
/// which the command-line front end reports verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input is real (|Im| = {im_norm:e}); the centralizer complement is undefined")]
    RealInput { im_norm: f64 },

    #[error("epsilon is not a unit intertwiner of alpha (residual {residual:e})")]
    BadEpsilon { residual: f64 },

    #[error("inverse of near-zero quaternion (|q| = {modulus:e})")]
    NearZeroInverse { modulus: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not stable (spectral radius {radius})")]
    NotStable { radius: f64 },

    #[error("series evaluation diverges or is unreliable: r·|γ| = {product}")]
    DivergenceRisk { product: f64 },

    #[error("truncation error bound {bound:e} exceeds requested tolerance {tol:e}")]
    TruncationInsufficient { bound: f64, tol: f64 },

    #[error("node {modulus} is outside the admissible ball")]
    NodeOutsideBall { modulus: f64 },

    #[error("constant is not unimodular (|phi| = {modulus})")]
    NotUnimodular { modulus: f64 },

    #[error("evaluation point hits a pole (|denominator| = {modulus:e})")]
    PoleHit { modulus: f64 },

    #[error("no zero in the conjugacy class (re = {re}, |Im| = {im_norm}): {detail}")]
    NoZeroInClass {
        re: f64,
        im_norm: f64,
        detail: String,
    },

    #[error("chain extraction failed: {0}")]
    ChainExtractionFailed(String),

    #[error("inputs are similar (same conjugacy class)")]
    SimilarInputs,

    #[error("points {0} and {1} are similar; the left-zero recursion degenerates")]
    SimilarPointsUnsupported(usize, usize),

    #[error("pair is not controllable (rank {rank} < {n})")]
    NotControllable { rank: usize, n: usize },

    #[error("ill-conditioned {what}: condition number {cond:e}")]
    IllConditioned { what: String, cond: f64 },

    #[error("rank profile has not saturated at the available order: {0}")]
    NotSaturated(String),

    #[error("rank condition failed: rank P_(n+1) = {rank_next}, rank P_n = {rank_n}, n = {n}")]
    RankConditionFailed {
        rank_next: usize,
        rank_n: usize,
        n: usize,
    },

    #[error("defect matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("prefix is not a Schur prefix (min eigenvalue {min_eig:e})")]
    NotSchur { min_eig: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable error name used in machine-readable reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::RealInput { .. } => "RealInput",
            Error::BadEpsilon { .. } => "BadEpsilon",
            Error::NearZeroInverse { .. } => "NearZeroInverse",
            Error::Numerical(_) => "NumericalError",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotStable { .. } => "NotStable",
            Error::DivergenceRisk { .. } => "DivergenceRisk",
            Error::TruncationInsufficient { .. } => "TruncationInsufficient",
            Error::NodeOutsideBall { .. } => "NodeOutsideBall",
            Error::NotUnimodular { .. } => "NotUnimodular",
            Error::PoleHit { .. } => "PoleHit",
            Error::NoZeroInClass { .. } => "NoZeroInClass",
            Error::ChainExtractionFailed(_) => "ChainExtractionFailed",
            Error::SimilarInputs => "SimilarInputs",
            Error::SimilarPointsUnsupported(..) => "SimilarPointsUnsupported",
            Error::NotControllable { .. } => "NotControllable",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::NotSaturated(_) => "NotSaturated",
            Error::RankConditionFailed { .. } => "RankConditionFailed",
            Error::NotPsd { .. } => "NotPSD",
            Error::NotSchur { .. } => "NotSchur",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
