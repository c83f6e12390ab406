//! One- and two-variable matrix polynomials.

use std::f64::consts::PI;

use nalgebra::Schur;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};

/// `A(z) = Σ_{i=0}^{deg} A_i z^i` with equally sized matrix coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    pub coeffs: Vec<CMat>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<CMat>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        MatrixPolynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn shape(&self) -> (usize, usize) {
        self.coeffs[0].shape()
    }

    pub fn eval(&self, z: C64) -> CMat {
        let mut acc = self.coeffs[self.degree()].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * z + c;
        }
        acc
    }

    /// Largest coefficientwise entry deviation from `other` (shorter one padded with zeros).
    pub fn max_coeff_distance(&self, other: &MatrixPolynomial) -> f64 {
        let (r, c) = self.shape();
        let zero = linalg::zeros(r, c);
        (0..self.coeffs.len().max(other.coeffs.len()))
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                linalg::max_abs(&(a - b))
            })
            .fold(0.0, f64::max)
    }
}

/// `p(z,w) = Σ p_{ij} z^i w^j`, `0 ≤ i ≤ n`, `0 ≤ j ≤ m`, each `p_{ij}` of size `d × d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial2D {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    /// Row-major in `(i, j)`: `coeffs[i * (m + 1) + j] = p_{ij}`.
    pub coeffs: Vec<CMat>,
}

impl MatrixPolynomial2D {
    pub fn zeros(d: usize, n: usize, m: usize) -> Self {
        MatrixPolynomial2D {
            d,
            n,
            m,
            coeffs: vec![linalg::zeros(d, d); (n + 1) * (m + 1)],
        }
    }

    pub fn from_fn(d: usize, n: usize, m: usize, mut f: impl FnMut(usize, usize) -> CMat) -> Self {
        let mut p = Self::zeros(d, n, m);
        for i in 0..=n {
            for j in 0..=m {
                p.coeffs[i * (m + 1) + j] = f(i, j);
            }
        }
        p
    }

    /// Scalar polynomial from a row-major `(n+1)×(m+1)` coefficient table.
    pub fn scalar(n: usize, m: usize, table: &[f64]) -> Self {
        assert_eq!(table.len(), (n + 1) * (m + 1));
        Self::from_fn(1, n, m, |i, j| linalg::scalar(table[i * (m + 1) + j]))
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, 0, 0, |_, _| linalg::identity(d))
    }

    pub fn get(&self, i: usize, j: usize) -> &CMat {
        &self.coeffs[i * (self.m + 1) + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut CMat {
        &mut self.coeffs[i * (self.m + 1) + j]
    }

    pub fn eval(&self, z: C64, w: C64) -> CMat {
        let mut acc = linalg::zeros(self.d, self.d);
        let mut zi = C64::new(1.0, 0.0);
        for i in 0..=self.n {
            let mut wj = C64::new(1.0, 0.0);
            for j in 0..=self.m {
                acc += self.get(i, j) * (zi * wj);
                wj *= w;
            }
            zi *= z;
        }
        acc
    }

    /// The `w`-polynomial `p(z, ·)` at fixed `z`.
    pub fn in_w(&self, z: C64) -> MatrixPolynomial {
        MatrixPolynomial::new((0..=self.m).map(|j| self.w_coefficient(j).eval(z)).collect())
    }

    /// The `z`-polynomial `p(·, w)` at fixed `w`.
    pub fn in_z(&self, w: C64) -> MatrixPolynomial {
        MatrixPolynomial::new((0..=self.n).map(|i| self.z_coefficient(i).eval(w)).collect())
    }

    /// `p_j(z) = Σ_i p_{ij} z^i`, the coefficient of `w^j`.
    pub fn w_coefficient(&self, j: usize) -> MatrixPolynomial {
        MatrixPolynomial::new((0..=self.n).map(|i| self.get(i, j).clone()).collect())
    }

    /// `Σ_j p_{ij} w^j`, the coefficient of `z^i`.
    pub fn z_coefficient(&self, i: usize) -> MatrixPolynomial {
        MatrixPolynomial::new((0..=self.m).map(|j| self.get(i, j).clone()).collect())
    }

    /// Largest coefficientwise deviation, padding the smaller support with zeros.
    pub fn max_coeff_distance(&self, other: &MatrixPolynomial2D) -> f64 {
        let zero = linalg::zeros(self.d, self.d);
        let mut dist: f64 = 0.0;
        for i in 0..=self.n.max(other.n) {
            for j in 0..=self.m.max(other.m) {
                let a = if i <= self.n && j <= self.m { self.get(i, j) } else { &zero };
                let b = if i <= other.n && j <= other.m { other.get(i, j) } else { &zero };
                dist = dist.max(linalg::max_abs(&(a - b)));
            }
        }
        dist
    }

    /// `p · p₀₀^{-1/2}`: removes the positive factor left free by the normalization `p₀₀ ≻ 0`.
    pub fn normalized(&self) -> MatrixPolynomial2D {
        let root = linalg::hpd_sqrt(&linalg::hermitian_part(self.get(0, 0)));
        let inv = root.try_inverse().expect("p_00 is positive definite");
        MatrixPolynomial2D {
            coeffs: self.coeffs.iter().map(|c| c * &inv).collect(),
            ..self.clone()
        }
    }
}

/// Coefficients (ascending powers) of `det A(z)`, recovered by evaluating the
/// determinant at roots of unity and transforming back.
pub fn det_polynomial(poly: &MatrixPolynomial) -> Result<Vec<C64>> {
    let (r, c) = poly.shape();
    if r != c {
        return Err(Error::Dimension("determinant of a non-square polynomial".into()));
    }
    let count = poly.degree() * r + 1;
    let values: Vec<C64> = (0..count)
        .map(|t| poly.eval(C64::from_polar(1.0, 2.0 * PI * t as f64 / count as f64)).determinant())
        .collect();
    let coeffs: Vec<C64> = (0..count)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(t, v)| v * C64::from_polar(1.0, -2.0 * PI * (t * k) as f64 / count as f64))
                .sum::<C64>()
                / count as f64
        })
        .collect();

    let scale: f64 = poly.coeffs.iter().map(linalg::spectral_norm).sum::<f64>().powi(r as i32);
    let largest = coeffs.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    if largest <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateDeterminant);
    }
    Ok(coeffs)
}

/// Roots of `Σ a_k z^k`; leading coefficients negligible against the largest
/// one are treated as roots at infinity and dropped.
pub fn polynomial_roots(coeffs: &[C64]) -> Vec<C64> {
    let largest = coeffs.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let mut deg = coeffs.len().saturating_sub(1);
    while deg > 0 && coeffs[deg].norm() <= 1e-12 * largest {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let mut companion = linalg::zeros(deg, deg);
    for k in 0..deg {
        companion[(0, k)] = -coeffs[deg - 1 - k] / lead;
    }
    for k in 1..deg {
        companion[(k, k - 1)] = C64::new(1.0, 0.0);
    }
    Schur::new(companion)
        .eigenvalues()
        .expect("complex Schur form is triangular")
        .iter()
        .copied()
        .collect()
}
