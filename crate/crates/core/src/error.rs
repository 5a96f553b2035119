//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("mesh resolution must be at least 1, got {0}")]
    InvalidResolution(usize),

    #[error("boundary face {face} with midpoint ({x}, {y}) was left untagged by the classifier")]
    UntaggedBoundaryFace { face: usize, x: f64, y: f64 },

    #[error("point ({x}, {y}) lies outside triangle {triangle} (barycentric slack {slack:e})")]
    PointOutsideTriangle {
        triangle: usize,
        x: f64,
        y: f64,
        slack: f64,
    },

    #[error("face {0} is not a boundary face")]
    NotBoundaryFace(usize),

    #[error("face {0} is not tagged as a contact face")]
    NotContactFace(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("meshes are incompatible: {0}")]
    IncompatibleMeshes(String),

    #[error("sparse factorization failed: matrix is singular or structurally deficient")]
    SingularMatrix,

    #[error("linear solve residual {residual:e} exceeds the contract bound {bound:e}")]
    LinearSolveInaccurate { residual: f64, bound: f64 },
}
