use thiserror::Error;

use crate::roofs::Decomposition;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("2s must be at least 1")]
    InvalidSpin,

    #[error("vector has zero or non-finite length")]
    ZeroVector,

    #[error("not a unit vector: |n| = {0}")]
    NotUnit(f64),

    #[error("directions are not orthogonal: n1 . n2 = {0:e}")]
    NotOrthogonal(f64),

    #[error("triad is not orthonormal and right-handed (residual {0:e})")]
    NotTriad(f64),

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),

    #[error("trace {0} differs from 1")]
    Trace(f64),

    #[error("matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("Bloch vector length {0} exceeds 1")]
    BlochLength(f64),

    #[error("state vector is not normalized: squared norm {0}")]
    NotNormalized(f64),

    #[error("rank {rank} out of range 1..={dim}")]
    Rank { rank: usize, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("factor {index} is mixed (|r| = {norm}); product states need pure factors")]
    MixedFactor { index: usize, norm: f64 },

    #[error("target is pure; the only decomposition is the state itself")]
    PureTarget(Box<Decomposition>),

    #[error("state is degenerate; its eigendecomposition is not unique")]
    Degenerate,

    #[error("Bloch vector on the sphere with radial velocity r.dr = {0:e}")]
    InconsistentTangent(f64),

    #[error("decomposition does not reconstruct the target (max deviation {0:e})")]
    Reconstruction(f64),

    #[error("quantum Fisher information {0:e} is zero; the parameter is not estimable")]
    ZeroQfi(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
