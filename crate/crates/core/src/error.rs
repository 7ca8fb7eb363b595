use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (deviation {deviation:.3e}, allowed {allowed:.3e})")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error(
        "matrix is not dissipative: min eigenvalue of Im(T) is {min_eig:.3e}, bound is {bound:.3e}"
    )]
    NotDissipative { min_eig: f64, bound: f64 },

    #[error("matrix is not anti-dissipative: max eigenvalue of Im(S) is {max_eig:.3e}, bound is {bound:.3e}")]
    NotAntiDissipative { max_eig: f64, bound: f64 },

    #[error("argument {re}{im:+}i lies on the branch cut")]
    OnBranchCut { re: f64, im: f64 },

    #[error(
        "quadrature did not reach tolerance within {panels} panels (error estimate {error:.3e})"
    )]
    QuadratureDiverged { panels: usize, error: f64 },

    #[error("lambda = {lambda} lies within {distance:.3e} of eigenvalue {eigenvalue}")]
    InExclusionZone {
        lambda: f64,
        eigenvalue: f64,
        distance: f64,
    },

    #[error("spectral function is not finite at eigenvalue {0}")]
    FunctionNotFinite(f64),

    #[error("eigenbasis is defective or ill-conditioned (condition {condition:.3e})")]
    IllConditionedEigenbasis { condition: f64 },

    #[error("determinant vanishes along the continuation path at eps = {eps:.3e}")]
    DeterminantVanishes { eps: f64 },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
