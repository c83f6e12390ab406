//! Left and right stable factorization of matrix trigonometric polynomials
//! that are positive definite on the unit circle.
//!
//! The factor is obtained with Bauer's method: the block Cholesky factor of
//! a long banded block Toeplitz section `(A_{a-b})` has rows that converge to
//! the coefficients of the stable factor, read backwards from the diagonal.
//! The section is banded, so the factorization costs `O(size · n² · d³)`.

use crate::error::{Error, Result};
use crate::fourier::unit_root;
use crate::linalg::{self, CMat, C64};
use crate::poly::MatrixPolynomial;

/// Circle grid used for positivity certificates and residuals.
pub const CIRCLE_GRID: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-8;

/// `A(z) = Σ_{i=-n}^{n} A_i z^i` with `A_{-i} = A_i*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigMatrixPolynomial {
    pub block_dim: usize,
    pub n: usize,
    /// `blocks[i + n] = A_i`.
    pub blocks: Vec<CMat>,
}

impl TrigMatrixPolynomial {
    /// From `A_0, …, A_n`; `A_0` is replaced by its Hermitian part.
    pub fn from_nonnegative(a: Vec<CMat>) -> Self {
        let n = a.len() - 1;
        let block_dim = a[0].nrows();
        let mut blocks: Vec<CMat> = a[1..].iter().rev().map(|b| b.adjoint()).collect();
        blocks.push(linalg::hermitian_part(&a[0]));
        blocks.extend(a.into_iter().skip(1));
        TrigMatrixPolynomial { block_dim, n, blocks }
    }

    /// `M(z) M(1/z̄)*` for a matrix polynomial `M`.
    pub fn from_left_factor(m: &MatrixPolynomial) -> Self {
        let deg = m.degree();
        let a = (0..=deg)
            .map(|i| (0..=deg - i).map(|l| &m.coeffs[l + i] * m.coeffs[l].adjoint()).sum())
            .collect();
        Self::from_nonnegative(a)
    }

    /// `N(1/z̄)* N(z)` for a matrix polynomial `N`.
    pub fn from_right_factor(m: &MatrixPolynomial) -> Self {
        let deg = m.degree();
        let a = (0..=deg)
            .map(|i| (0..=deg - i).map(|l| m.coeffs[l].adjoint() * &m.coeffs[l + i]).sum())
            .collect();
        Self::from_nonnegative(a)
    }

    pub fn get(&self, i: i64) -> &CMat {
        &self.blocks[(i + self.n as i64) as usize]
    }

    pub fn eval(&self, z: C64) -> CMat {
        let mut acc = linalg::zeros(self.block_dim, self.block_dim);
        for i in -(self.n as i64)..=self.n as i64 {
            acc += self.get(i) * z.powi(i as i32);
        }
        acc
    }

    /// Smallest eigenvalue of `A(z)` over `grid` equispaced circle points.
    pub fn min_eigenvalue_on_circle(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|t| linalg::min_hermitian_eigenvalue(&self.eval(unit_root(t, grid))))
            .fold(f64::INFINITY, f64::min)
    }

    fn max_norm_on_circle(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|t| linalg::spectral_norm(&self.eval(unit_root(t, grid))))
            .fold(0.0, f64::max)
    }

    /// `J A(z)ᵀ J` with `J` the reversal permutation.
    fn flipped_transpose(&self) -> Self {
        TrigMatrixPolynomial {
            blocks: self.blocks.iter().map(|b| linalg::flip(&b.transpose())).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorOptions {
    /// Number of block rows of the banded section; `None` means `64·(n+1)`.
    pub bauer_size: Option<usize>,
    pub tol: f64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            bauer_size: None,
            tol: DEFAULT_TOL,
        }
    }
}

/// Banded block Cholesky of `(A_{a-b})_{a,b<size}`; returns the last two block
/// rows read as polynomial coefficients `M_j = L_{a, a-j}`.
fn bauer_rows(a: &TrigMatrixPolynomial, size: usize) -> Result<(Vec<CMat>, Vec<CMat>)> {
    let n = a.n;
    let d = a.block_dim;
    // rows[r][k] = L_{r, r-n+k} for the in-band columns, k = 0..=n
    let mut rows: Vec<Vec<CMat>> = Vec::with_capacity(size);
    for r in 0..size {
        let mut row = vec![linalg::zeros(d, d); n + 1];
        let first = r.saturating_sub(n);
        for b in first..=r {
            let mut s = a.get(r as i64 - b as i64).clone();
            for c in first.max(b.saturating_sub(n))..b {
                let l_rc = &row[c + n - r];
                let l_bc = if b == r { l_rc } else { &rows[b][c + n - b] };
                s -= l_rc * l_bc.adjoint();
            }
            if b < r {
                let l_bb = &rows[b][n];
                row[b + n - r] = linalg::mul_inv_adjoint(&s, l_bb, true);
            } else {
                row[n] = linalg::cholesky_lower(&s, "banded Toeplitz section")?;
            }
        }
        rows.push(row);
    }
    let as_coeffs = |row: &Vec<CMat>| row.iter().rev().cloned().collect::<Vec<_>>();
    let last = as_coeffs(&rows[size - 1]);
    let prev = if size >= 2 { as_coeffs(&rows[size - 2]) } else { last.clone() };
    Ok((last, prev))
}

fn relative_change(a: &[CMat], b: &[CMat]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_squared()).sum::<f64>().sqrt();
    let scale: f64 = a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt();
    diff / scale.max(f64::MIN_POSITIVE)
}

/// Relative circle-grid residual `max ‖M(z)M(z)* − A(z)‖ / max(1, max ‖A(z)‖)`.
pub fn left_factor_residual(a: &TrigMatrixPolynomial, m: &MatrixPolynomial, grid: usize) -> f64 {
    let scale = a.max_norm_on_circle(grid).max(1.0);
    (0..grid)
        .map(|t| {
            let z = unit_root(t, grid);
            let mz = m.eval(z);
            linalg::spectral_norm(&(&mz * mz.adjoint() - a.eval(z)))
        })
        .fold(0.0, f64::max)
        / scale
}

/// Relative circle-grid residual of `N(z)* N(z) = A(z)`.
pub fn right_factor_residual(a: &TrigMatrixPolynomial, m: &MatrixPolynomial, grid: usize) -> f64 {
    let scale = a.max_norm_on_circle(grid).max(1.0);
    (0..grid)
        .map(|t| {
            let z = unit_root(t, grid);
            let nz = m.eval(z);
            linalg::spectral_norm(&(nz.adjoint() * &nz - a.eval(z)))
        })
        .fold(0.0, f64::max)
        / scale
}

/// The left stable factor: `A(z) = M(z) M(1/z̄)*`, `M` stable, `M(0)` lower
/// triangular with positive diagonal.
pub fn left_stable_factor(a: &TrigMatrixPolynomial, opts: FactorOptions) -> Result<MatrixPolynomial> {
    let min_eig = a.min_eigenvalue_on_circle(CIRCLE_GRID);
    // also rejects NaN
    if min_eig.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::NotPositiveOnCircle { min_eig });
    }
    let base = opts.bauer_size.unwrap_or(64 * (a.n + 1)).max(a.n + 2);
    let mut change = f64::INFINITY;
    for size in [base, 2 * base] {
        let (last, prev) = bauer_rows(a, size)?;
        change = relative_change(&last, &prev);
        let m = MatrixPolynomial::new(last);
        if left_factor_residual(a, &m, CIRCLE_GRID) <= opts.tol {
            return Ok(m);
        }
    }
    Err(Error::NoConvergence { change })
}

/// The right stable factor: `A(z) = N(1/z̄)* N(z)`, `N` stable, `N(0)` lower
/// triangular with positive diagonal.
pub fn right_stable_factor(a: &TrigMatrixPolynomial, opts: FactorOptions) -> Result<MatrixPolynomial> {
    let g = left_stable_factor(&a.flipped_transpose(), opts)?;
    Ok(MatrixPolynomial::new(
        g.coeffs.iter().map(|c| linalg::flip(&c.transpose())).collect(),
    ))
}

/// Rotates a left factor so that `M(0)` is block lower triangular with
/// Hermitian positive definite `block × block` diagonal blocks (the block
/// normalization of the stable factor).
pub fn block_normalize(m: &MatrixPolynomial, block: usize) -> MatrixPolynomial {
    let size = m.shape().1;
    assert_eq!(size % block, 0);
    let m0 = &m.coeffs[0];
    let mut u = linalg::zeros(size, size);
    for k in 0..size / block {
        let l = linalg::block(m0, k, k, block, block);
        let h = linalg::hpd_sqrt(&(&l * l.adjoint()));
        let v = h.try_inverse().expect("diagonal block is invertible") * &l;
        linalg::set_block(&mut u, k, k, &v.adjoint());
    }
    MatrixPolynomial::new(m.coeffs.iter().map(|c| c * &u).collect())
}
