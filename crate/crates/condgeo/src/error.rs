//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("field mismatch: operands carry different scalar field tags")]
    FieldMismatch,

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The smallest singular value vanishes within tolerance.
    #[error("singular input: smallest singular value vanishes within tolerance")]
    SingularInput,

    /// A path node (or a point sampled on a segment) is singular.
    #[error("singular node at path index {index}")]
    SingularNode { index: usize },

    /// The smallest singular value is not simple at the requested tolerance.
    #[error("smallest singular value is not simple within the cluster tolerance")]
    MultipleSigma,

    /// SVD tracking: two singular-value clusters are about to merge, so the
    /// path is leaving its stratum.
    #[error("singular-value clusters collide near t = {t}: path leaves the stratum")]
    ClusterCollision { t: f64 },

    /// SVD tracking: the residual target cannot be met even at the minimum
    /// step size.
    #[error("integration step control failed near t = {t}")]
    StepFailure { t: f64 },

    #[error("matrix is not within 0.5 of unitary in operator norm")]
    NotNearUnitary,

    #[error("seed path passes through a singular matrix")]
    SeedSingular,

    /// Path optimizer stopped before reaching its first-order tolerance.
    /// Carries the best iterate so callers can inspect the diagnostics.
    #[error("optimizer stopped at first-order residual {residual:.3e} (target {tol:.3e})")]
    NoConvergence {
        residual: f64,
        tol: f64,
        best: Box<crate::geodesic::GeodesicResult>,
    },

    /// Geodesic shooting ran into a point where the smallest singular value
    /// stops being simple; integration cannot continue past the stratum.
    #[error("shooting hit a singular-value multiplicity at t = {exit_time}")]
    StratumHit {
        exit_time: f64,
        partial: Box<crate::geodesic::DiscretePath>,
    },

    #[error("trace grid too irregular for symmetric second differences")]
    GridTooIrregular,

    #[error("geodesic result is not converged; refusing to certify convexity")]
    NotConverged,

    #[error("matrix is rank deficient")]
    RankDeficient,

    /// The linear part `Df(0)` of the polynomial system is singular.
    #[error("degenerate linear part: Df(0) is singular")]
    DegenerateLinearPart,

    /// The gradient flow left the region where the smallest singular value is
    /// simple.
    #[error("gradient flow left the simple-sigma_min region")]
    FlowEscape,

    #[error("expected a skew-hermitian matrix")]
    NotSkew,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, used by the CLI error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::FieldMismatch => "field_mismatch",
            Error::NonFinite => "non_finite",
            Error::InvalidInput(_) => "invalid_input",
            Error::SingularInput => "singular_input",
            Error::SingularNode { .. } => "singular_node",
            Error::MultipleSigma => "multiple_sigma",
            Error::ClusterCollision { .. } => "cluster_collision",
            Error::StepFailure { .. } => "step_failure",
            Error::NotNearUnitary => "not_near_unitary",
            Error::SeedSingular => "seed_singular",
            Error::NoConvergence { .. } => "no_convergence",
            Error::StratumHit { .. } => "stratum_hit",
            Error::GridTooIrregular => "grid_too_irregular",
            Error::NotConverged => "not_converged",
            Error::RankDeficient => "rank_deficient",
            Error::DegenerateLinearPart => "degenerate_linear_part",
            Error::FlowEscape => "flow_escape",
            Error::NotSkew => "not_skew",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
