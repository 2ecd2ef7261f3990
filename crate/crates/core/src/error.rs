use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("cannot normalize the zero vector")]
    ZeroVector,

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("angle {name} = {value} is outside [0, pi/2]")]
    AngleOutOfRange { name: &'static str, value: f64 },

    #[error("degenerate family parameters: alpha = {alpha}, beta = {beta} (ratios undefined at 0 or pi/2)")]
    DegenerateFamily { alpha: f64, beta: f64 },

    #[error("states {i} and {j} are not orthonormal (|<i|j> - delta_ij| = {deviation:e})")]
    NotOrthonormal { i: usize, j: usize, deviation: f64 },

    #[error("states are not orthogonal (|<psi|phi>| = {overlap:e})")]
    NotOrthogonal { overlap: f64 },

    #[error("invalid index pair ({i}, {j})")]
    InvalidPair { i: usize, j: usize },

    #[error("index {index} is out of range for a four-state basis")]
    IndexOutOfRange { index: usize },

    #[error("malformed protocol tree: {0}")]
    MalformedTree(String),

    #[error("protocol needs at least {required} copies, got {requested}")]
    TooFewCopies { requested: usize, required: usize },

    #[error("message {0} is outside 0..=3")]
    MessageOutOfRange(u8),

    #[error("{name} = {value} is outside the open interval (0, 1)")]
    WeightOutOfRange { name: &'static str, value: f64 },

    #[error("share set integrity check failed: {0}")]
    Integrity(String),

    #[error("invalid scan specification: {0}")]
    InvalidScan(String),

    #[error("invalid document: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical machinery itself rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
