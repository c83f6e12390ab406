//! One-variable block autoregressive filters: Yule-Walker solves in both
//! directions, covariance extension, and a determinant-root stability test.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::poly::{det_polynomial, polynomial_roots, MatrixPolynomial};

/// Default margin for [`stability_check_1d`].
pub const DEFAULT_MARGIN: f64 = 1e-9;

/// Blocks `A_{-n}, …, A_n` of a Hermitian block Toeplitz matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockToeplitz1D {
    pub block_dim: usize,
    pub n: usize,
    /// `blocks[k + n] = A_k`.
    pub blocks: Vec<CMat>,
}

impl BlockToeplitz1D {
    /// From `A_0, …, A_n`; negative blocks are the adjoints.
    pub fn from_nonnegative(a: Vec<CMat>) -> Self {
        let n = a.len() - 1;
        let block_dim = a[0].nrows();
        let mut blocks: Vec<CMat> = a[1..].iter().rev().map(|b| b.adjoint()).collect();
        blocks.extend(a);
        BlockToeplitz1D { block_dim, n, blocks }
    }

    pub fn scalar(a: &[f64]) -> Self {
        Self::from_nonnegative(a.iter().map(|&x| linalg::scalar(x)).collect())
    }

    pub fn get(&self, k: i64) -> &CMat {
        &self.blocks[(k + self.n as i64) as usize]
    }

    /// `(A_{i-j})_{i,j=0}^{size-1}`, `size ≤ n + 1`.
    pub fn section(&self, size: usize) -> CMat {
        let d = self.block_dim;
        let mut t = linalg::zeros(size * d, size * d);
        for i in 0..size {
            for j in 0..size {
                linalg::set_block(&mut t, i, j, self.get(i as i64 - j as i64));
            }
        }
        t
    }

    /// Largest entrywise `|A_{-k} - A_k*|`.
    pub fn symmetry_deviation(&self) -> f64 {
        (0..=self.n as i64)
            .map(|k| linalg::max_abs(&(self.get(-k) - self.get(k).adjoint())))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `R(z) = Σ_{i=0}^n R_i z^i`, stable.
    Left,
    /// `S(z) = Σ_{i=-n}^0 S_i z^i`, antistable.
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ar1Solution {
    pub direction: Direction,
    /// Left: `raw[i] = P_i`. Right: `raw[i] = Q_{-i}`.
    pub raw: Vec<CMat>,
    /// Left: `coeffs[i] = R_i`. Right: `coeffs[i] = S_{-i}`.
    pub coeffs: Vec<CMat>,
    /// Left: lower `B` with `P_0 = B B*`. Right: upper `C` with `Q_0 = C C*`.
    pub normalizer: CMat,
}

impl Ar1Solution {
    /// `R(z)` (left) or `S(z)` (right).
    pub fn eval(&self, z: C64) -> CMat {
        match self.direction {
            Direction::Left => MatrixPolynomial::new(self.coeffs.clone()).eval(z),
            Direction::Right => MatrixPolynomial::new(self.coeffs.clone()).eval(z.inv()),
        }
    }

    /// The stable polynomial attached to the solution: `R(z)` for the left
    /// system and `S(1/z̄)*` for the right one.
    pub fn stable_polynomial(&self) -> MatrixPolynomial {
        match self.direction {
            Direction::Left => MatrixPolynomial::new(self.coeffs.clone()),
            Direction::Right => MatrixPolynomial::new(self.coeffs.iter().map(|c| c.adjoint()).collect()),
        }
    }

    /// `(F(z) F(z)*)^{-1}` for the factor `F = R` or `S` on the unit circle.
    pub fn spectral_density(&self, z: C64) -> Option<CMat> {
        let f = self.eval(z);
        (&f * f.adjoint()).try_inverse()
    }
}

fn unit_column(size: usize, d: usize, at: usize) -> CMat {
    let mut rhs = linalg::zeros(size * d, d);
    linalg::set_block(&mut rhs, at, 0, &linalg::identity(d));
    rhs
}

/// Solves `(A_{i-j}) col(P_0..P_n) = col(I, 0, …, 0)` and normalizes by the
/// lower Cholesky factor of `P_0`.
pub fn solve_yule_walker_left(t: &BlockToeplitz1D) -> Result<Ar1Solution> {
    let (size, d) = (t.n + 1, t.block_dim);
    let sol = linalg::solve_hpd(&t.section(size), &unit_column(size, d, 0), "(A_{i-j})")?;
    let raw = linalg::vsplit(&sol, size);
    let b = linalg::cholesky_lower(&raw[0], "P_0")?;
    let coeffs = raw.iter().map(|p| linalg::mul_inv_adjoint(p, &b, true)).collect();
    Ok(Ar1Solution {
        direction: Direction::Left,
        raw,
        coeffs,
        normalizer: b,
    })
}

/// Solves `(A_{i-j}) col(Q_{-n}..Q_0) = col(0, …, 0, I)` and normalizes by the
/// upper Cholesky factor of `Q_0`.
pub fn solve_yule_walker_right(t: &BlockToeplitz1D) -> Result<Ar1Solution> {
    let (size, d) = (t.n + 1, t.block_dim);
    let sol = linalg::solve_hpd(&t.section(size), &unit_column(size, d, t.n), "(A_{i-j})")?;
    let mut raw = linalg::vsplit(&sol, size);
    raw.reverse();
    let c = linalg::cholesky_upper(&raw[0], "Q_0")?;
    let coeffs = raw.iter().map(|q| linalg::mul_inv_adjoint(q, &c, false)).collect();
    Ok(Ar1Solution {
        direction: Direction::Right,
        raw,
        coeffs,
        normalizer: c,
    })
}

/// `A_{n+1}, …, A_{r_max}` of the maximum entropy extension.
pub fn extend_covariance_1d(t: &BlockToeplitz1D, r_max: usize) -> Result<Vec<CMat>> {
    let (n, d) = (t.n, t.block_dim);
    if r_max <= n {
        return Ok(Vec::new());
    }
    if n == 0 {
        return Ok(vec![linalg::zeros(d, d); r_max - n]);
    }
    // negative-index blocks A_0, A_{-1}, ...
    let mut neg: Vec<CMat> = (0..=n).map(|k| t.get(-(k as i64)).clone()).collect();
    let mut head = linalg::zeros(d, n * d);
    for (k, a) in neg.iter().enumerate().skip(1) {
        linalg::set_block(&mut head, 0, k - 1, a);
    }
    let section = t.section(n);
    // row vector (A_{-1} … A_{-n}) T_{n}^{-1}, computed once
    let weights = linalg::solve_hpd(&section, &head.adjoint(), "(A_{i-j})_{i,j<n}")?.adjoint();

    for r in n + 1..=r_max {
        // col(A_{-r+1}, …, A_{-r+n})
        let col = linalg::vstack(&(1..=n).map(|s| neg[r - s].clone()).collect::<Vec<_>>());
        neg.push(&weights * col);
    }
    Ok(neg[n + 1..].iter().map(|a| a.adjoint()).collect())
}

/// Stability of `A(z)` via the roots of `det A(z)`. Returns whether every
/// root has modulus above `1 + margin`, and the smallest root modulus
/// (`∞` when the determinant is constant).
pub fn stability_check_1d(poly: &MatrixPolynomial, margin: f64) -> Result<(bool, f64)> {
    let det = det_polynomial(poly)?;
    let roots = polynomial_roots(&det);
    let min_modulus = roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min);
    if roots.is_empty() && det[0].norm() == 0.0 {
        return Err(Error::DegenerateDeterminant);
    }
    Ok((min_modulus > 1.0 + margin, min_modulus))
}
