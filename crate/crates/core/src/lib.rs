//! Two-variable autoregressive filter design from a finite band of
//! correlation matrices, doubly Toeplitz covariance extension, matrix spectral
//! factorization, and truncated suboptimal Nehari extension in one and two
//! variables.

pub mod ar1d;
pub mod ar2d;
pub mod completion;
pub mod covariance;
pub mod error;
pub mod fourier;
pub mod linalg;
pub mod nehari;
pub mod poly;
pub mod spectral_factor;

pub use error::{Error, Result};
