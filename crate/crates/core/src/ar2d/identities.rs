//! Identities linking the designed pair to the block Toeplitz structure in
//! `w`: with `f(z,w) = Σ_j f_j(z) w^j` and `T_k(z) = (f_{i-j}(z))_{i,j=0}^k`,
//!
//! `T_k(z)⁻¹ = E_k(z) = L(z) L(z)* − U(z)* U(z)` on the circle, where `L` is
//! lower block Toeplitz in the `w`-coefficients `p_i(z)` of `p` and `U` is
//! upper block Toeplitz in those of `r`. The left stable factors of `E_k` are
//! nested: `M_{k+1}` borders `M_k` with the column `p_0(z), …, p_{k+1}(z)`.

use super::extension::spectral_density;
use crate::error::{Error, Result};
use crate::fourier::{self, unit_root};
use crate::linalg::{self, CMat, C64};
use crate::poly::{MatrixPolynomial, MatrixPolynomial2D};
use crate::spectral_factor::{block_normalize, left_stable_factor, FactorOptions, TrigMatrixPolynomial};

/// Number of `w` samples used to extract `f_j(z)`.
const W_SAMPLES: usize = 512;

/// `f_{-k}(z), …, f_k(z)` at one point `z` of the circle.
pub fn w_coefficient_functions(p: &MatrixPolynomial2D, z: C64, k: usize) -> Result<Vec<CMat>> {
    let d = p.d;
    let samples = (0..W_SAMPLES)
        .map(|t| spectral_density(p, z, unit_root(t, W_SAMPLES)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![linalg::zeros(d, d); 2 * k + 1];
    let mut buf = vec![C64::new(0.0, 0.0); W_SAMPLES];
    for a in 0..d {
        for b in 0..d {
            for (slot, s) in buf.iter_mut().zip(&samples) {
                *slot = s[(a, b)];
            }
            fourier::coefficients_1d(&mut buf);
            for (idx, o) in out.iter_mut().enumerate() {
                o[(a, b)] = buf[fourier::wrap(idx as i64 - k as i64, W_SAMPLES)];
            }
        }
    }
    Ok(out)
}

/// `E_k(z)` for `z` on the circle.
fn e_matrix(p: &MatrixPolynomial2D, r: &MatrixPolynomial2D, k: usize, z: C64) -> CMat {
    let d = p.d;
    let pz: Vec<CMat> = (0..=p.m).map(|j| p.w_coefficient(j).eval(z)).collect();
    let rz: Vec<CMat> = (0..=r.m).map(|j| r.w_coefficient(j).eval(z)).collect();
    let size = (k + 1) * d;
    let mut lower = linalg::zeros(size, size);
    let mut upper = linalg::zeros(size, size);
    for i in 0..=k {
        for j in 0..=i {
            if let Some(c) = pz.get(i - j) {
                linalg::set_block(&mut lower, i, j, c);
            }
        }
        for j in i..=k {
            // r_{k+1-(j-i)}
            if let Some(c) = (k + 1 + i).checked_sub(j).and_then(|s| rz.get(s)) {
                linalg::set_block(&mut upper, i, j, c);
            }
        }
    }
    &lower * lower.adjoint() - upper.adjoint() * &upper
}

/// `max_z ‖T_k(z) E_k(z) − I‖` over `grid_n` circle points.
pub fn inverse_formula_check(p: &MatrixPolynomial2D, r: &MatrixPolynomial2D, k: usize, grid_n: usize) -> Result<f64> {
    let d = p.d;
    let size = (k + 1) * d;
    let mut worst: f64 = 0.0;
    for t in 0..grid_n {
        let z = unit_root(t, grid_n);
        let f = w_coefficient_functions(p, z, k)?;
        let mut tk = linalg::zeros(size, size);
        for i in 0..=k {
            for j in 0..=k {
                linalg::set_block(&mut tk, i, j, &f[i + k - j]);
            }
        }
        if tk.clone().try_inverse().is_none() {
            return Err(Error::SingularTk);
        }
        let residual = &tk * e_matrix(p, r, k, z) - linalg::identity(size);
        worst = worst.max(linalg::spectral_norm(&residual));
    }
    Ok(worst)
}

/// `E_k` as a trigonometric polynomial in `z` of degree `n`.
fn e_trig(p: &MatrixPolynomial2D, r: &MatrixPolynomial2D, k: usize) -> TrigMatrixPolynomial {
    let n = p.n.max(r.n);
    let samples = 4 * (n + 1);
    let values: Vec<CMat> = (0..samples).map(|t| e_matrix(p, r, k, unit_root(t, samples))).collect();
    let size = values[0].nrows();
    let coeffs = (0..=n)
        .map(|l| {
            let mut acc = linalg::zeros(size, size);
            for (t, v) in values.iter().enumerate() {
                acc += v * unit_root(t * l, samples).conj();
            }
            acc.unscale(samples as f64)
        })
        .collect();
    TrigMatrixPolynomial::from_nonnegative(coeffs)
}

/// Block-normalized left stable factor of `E_k`.
pub fn left_factor_of_e(p: &MatrixPolynomial2D, r: &MatrixPolynomial2D, k: usize) -> Result<MatrixPolynomial> {
    let m = left_stable_factor(&e_trig(p, r, k), FactorOptions::default())?;
    Ok(block_normalize(&m, p.d))
}

/// Coefficientwise deviation of `M_{k+1}` from `M_k` bordered by the first
/// block column `p_0(z), …, p_{k+1}(z)`.
pub fn nested_factor_check(p: &MatrixPolynomial2D, r: &MatrixPolynomial2D, k: usize) -> Result<f64> {
    let d = p.d;
    let mk = left_factor_of_e(p, r, k)?;
    let mk1 = left_factor_of_e(p, r, k + 1)?;
    let size = (k + 2) * d;
    let degree = mk.degree().max(mk1.degree()).max(p.n);
    let bordered = MatrixPolynomial::new(
        (0..=degree)
            .map(|i| {
                let mut c = linalg::zeros(size, size);
                if i <= p.n {
                    for l in 0..=(k + 1).min(p.m) {
                        linalg::set_block(&mut c, l, 0, p.get(i, l));
                    }
                }
                if let Some(inner) = mk.coeffs.get(i) {
                    c.view_mut((d, d), (size - d, size - d)).copy_from(inner);
                }
                c
            })
            .collect(),
    );
    Ok(mk1.max_coeff_distance(&bordered))
}
