//! Suboptimal Nehari extension.
//!
//! One variable: given `Γ_j`, `j ≥ 0`, whose Hankel `H = (Γ_{i-j})_{i≥0, j≤0}`
//! is a strict contraction, produce `Γ_j`, `j < 0`, with `‖Σ Γ_j z^j‖_∞ < 1`.
//! Two variables: the same for a little Hankel `h_γ`, under a commutation
//! condition on three compressions of `[[I, h_γ], [h_γ*, I]]`.
//!
//! All infinite index sets are truncated to finite sections.

mod one;
mod two;

pub use one::{solve_nehari_1d, solve_nehari_1d_converged, HankelData1D, NehariSolution1D};
pub use two::{
    build_compressions, check_comm_2d, nehari_2d_unchecked, solve_nehari_2d, Compressions, LittleHankelData, NehariSolution2D,
};

/// Smallest allowed `1 − ‖H‖`.
pub const MIN_CONTRACTION_GAP: f64 = 1e-6;
