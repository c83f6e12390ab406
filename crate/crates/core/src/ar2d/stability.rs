//! Grid certificate of stability on the closed bidisk.
//!
//! `p` is stable iff `p(z,·)` has no roots in the closed disk for every
//! `z ∈ 𝕋` and `p(·,w)` has none for every `w ∈ 𝕋`. Both sweeps are run
//! on a finite circle grid and roots must stay outside `|·| ≤ 1 + margin`.
//! This is a numerical certificate, not a proof.

use crate::ar1d::stability_check_1d;
use crate::error::Result;
use crate::fourier::unit_root;
use crate::poly::MatrixPolynomial2D;

pub const DEFAULT_GRID_N: usize = 512;
pub const DEFAULT_STABILITY_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityCertificate {
    pub grid_n: usize,
    pub margin: f64,
    /// Smallest modulus of a root in `w` of `p(z,·)`, `z` on the grid.
    pub min_modulus_w_roots: f64,
    /// Smallest modulus of a root in `z` of `p(·,w)`, `w` on the grid.
    pub min_modulus_z_roots: f64,
    pub passed: bool,
}

impl StabilityCertificate {
    pub fn min_modulus(&self) -> f64 {
        self.min_modulus_w_roots.min(self.min_modulus_z_roots)
    }
}

pub fn stability_check_2d(p: &MatrixPolynomial2D, grid_n: usize, margin: f64) -> Result<StabilityCertificate> {
    let mut min_w = f64::INFINITY;
    let mut min_z = f64::INFINITY;
    for t in 0..grid_n {
        let x = unit_root(t, grid_n);
        min_w = min_w.min(stability_check_1d(&p.in_w(x), margin)?.1);
        min_z = min_z.min(stability_check_1d(&p.in_z(x), margin)?.1);
    }
    Ok(StabilityCertificate {
        grid_n,
        margin,
        min_modulus_w_roots: min_w,
        min_modulus_z_roots: min_z,
        passed: min_w.min(min_z) > 1.0 + margin,
    })
}
