use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} is not positive definite (smallest eigenvalue {min_eig:.3e})")]
    NotPd { what: String, min_eig: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("correlation index ({0}, {1}) is not available")]
    MissingIndex(i64, i64),

    #[error("determinant polynomial vanishes identically")]
    DegenerateDeterminant,

    #[error("trigonometric polynomial is not positive definite on the circle (min eigenvalue {min_eig:.3e})")]
    NotPositiveOnCircle { min_eig: f64 },

    #[error("spectral factorization did not converge (relative change {change:.3e})")]
    NoConvergence { change: f64 },

    #[error("correlation data is infeasible: {0}")]
    Infeasible(String),

    #[error("structure violation in {what}: magnitude {magnitude:.3e}")]
    StructureViolation { what: String, magnitude: f64 },

    #[error("polynomial is not stable (min root modulus {min_modulus:.6})")]
    Unstable { min_modulus: f64 },

    #[error("block Toeplitz section T_k(z) is singular")]
    SingularTk,

    #[error("Hankel section has norm {norm:.6} >= 1")]
    NormAtLeastOne { norm: f64 },

    #[error("Hankel section is too close to a contraction boundary (1 - norm = {gap:.3e})")]
    IllConditioned { gap: f64 },

    #[error("commutation condition fails (relative residual {residual:.3e})")]
    CommViolation { residual: f64 },

    #[error("invalid correlation grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
