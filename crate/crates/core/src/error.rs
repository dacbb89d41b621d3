use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("operation needs a polynomial of degree >= {needed}, got degree {got:?}")]
    DegreeTooLow { needed: usize, got: Option<usize> },

    #[error("root finder did not converge (worst scaled residual {worst_residual:.3e})")]
    RootNonConvergence {
        worst_residual: f64,
        residuals: Vec<f64>,
    },

    #[error("singular Moebius matrix (|ad - bc| = {det:.3e})")]
    SingularMoebius { det: f64 },

    #[error("points must be pairwise distinct: {0}")]
    CoincidentPoints(String),

    #[error("cross-ratio is undefined for this configuration")]
    UndefinedCrossRatio,

    #[error("denominator of a rational map cannot be zero")]
    ZeroDenominator,

    #[error("rational map must have degree >= {needed}, got {got}")]
    MapDegree { needed: usize, got: usize },

    #[error("point is not fixed (chordal distance to its image {distance:.3e})")]
    NotFixed { distance: f64 },

    #[error("iterate degree {degree} exceeds cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("map is the identity; fixed points are not isolated")]
    IdentityMap,

    #[error("contour quadrature did not settle (last disagreement {disagreement:.3e})")]
    QuadratureNonConvergence { disagreement: f64 },

    #[error("witness re-evaluation mismatch: archived {archived}, recomputed {recomputed}")]
    WitnessMismatch { archived: f64, recomputed: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
