use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operator is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("projection onto {dim} levels annihilates the state at M = {m} (kept trace {trace:e})")]
    ProjectionAnnihilates { m: u32, dim: usize, trace: f64 },

    #[error("state is not permutation invariant (deviation {0:e})")]
    NotPermutationInvariant(f64),

    #[error("characteristic function did not stabilize by D = {0}")]
    PaddingDiverged(usize),

    #[error("truncation did not stabilize by D = {0}")]
    TruncationDiverged(usize),

    #[error("|t| = {t} exceeds the admissible limit {limit}")]
    TimeBeyondThreshold { t: f64, limit: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code, used in run manifests.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroDimension => "zero_dimension",
            Error::DimensionMismatch(..) => "dimension_mismatch",
            Error::NotHermitian(_) => "not_hermitian",
            Error::NotDensity(_) => "not_density",
            Error::ProjectionAnnihilates { .. } => "projection_annihilates",
            Error::NotPermutationInvariant(_) => "not_permutation_invariant",
            Error::PaddingDiverged(_) => "padding_diverged",
            Error::TruncationDiverged(_) => "truncation_diverged",
            Error::TimeBeyondThreshold { .. } => "time_beyond_threshold",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse(_) => "parse_error",
        }
    }

    /// Whether the failure is numerical (as opposed to a bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ProjectionAnnihilates { .. }
                | Error::PaddingDiverged(_)
                | Error::TruncationDiverged(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
