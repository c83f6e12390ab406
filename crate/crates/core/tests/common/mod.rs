//! Shared test support: a direct-sum Fourier oracle (no FFT) and a generator
//! of random polynomials that are stable on the closed bidisk by
//! construction.
#![allow(dead_code)]

use std::f64::consts::PI;

use bidisk_ar::covariance::CorrelationGrid;
use bidisk_ar::linalg::{CMat, C64};
use bidisk_ar::poly::MatrixPolynomial2D;
use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Direct evaluation of `Σ p_{ij} z^i w^j`.
pub fn eval(p: &MatrixPolynomial2D, z: C64, w: C64) -> CMat {
    let mut acc = DMatrix::zeros(p.d, p.d);
    for i in 0..=p.n {
        for j in 0..=p.m {
            acc += p.get(i, j) * (z.powu(i as u32) * w.powu(j as u32));
        }
    }
    acc
}

fn root(k: i64, n: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// `c_{ij}`, `|i| ≤ ri`, `|j| ≤ rj`, of `f(z,w)` by direct sums over an
/// `n × n` torus grid; `out[(i + ri) * (2rj+1) + (j + rj)] = c_{ij}`.
pub fn fourier_direct(n: usize, ri: i64, rj: i64, f: impl Fn(C64, C64) -> CMat) -> Vec<CMat> {
    let samples: Vec<Vec<CMat>> = (0..n)
        .map(|a| (0..n).map(|b| f(root(a as i64, n), root(b as i64, n))).collect())
        .collect();
    let (r, c) = samples[0][0].shape();
    // partial sums over w first
    let partial: Vec<Vec<CMat>> = samples
        .iter()
        .map(|row| {
            (-rj..=rj)
                .map(|j| {
                    let mut acc = DMatrix::zeros(r, c);
                    for (b, v) in row.iter().enumerate() {
                        acc += v * root(-(b as i64) * j, n);
                    }
                    acc / C64::new(n as f64, 0.0)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for i in -ri..=ri {
        for jj in 0..(2 * rj + 1) as usize {
            let mut acc = DMatrix::zeros(r, c);
            for (a, row) in partial.iter().enumerate() {
                acc += &row[jj] * root(-(a as i64) * i, n);
            }
            out.push(acc / C64::new(n as f64, 0.0));
        }
    }
    out
}

/// The band of `(p p*)⁻¹` for `p` of bidegree `(n, m)`, including the
/// optional corner pair `c_{±(n,m)}`, from an `fft_n²` torus grid.
pub fn grid_from_filter(p: &MatrixPolynomial2D, fft_n: usize) -> CorrelationGrid {
    grid_from_filter_window(p, p.n as i64, p.m as i64, fft_n, true)
}

pub fn grid_from_filter_window(p: &MatrixPolynomial2D, n: i64, m: i64, fft_n: usize, with_corner: bool) -> CorrelationGrid {
    let coeffs = fourier_direct(fft_n, n, m, |z, w| {
        let v = eval(p, z, w);
        (&v * v.adjoint()).try_inverse().unwrap()
    });
    let at = |k: (i64, i64)| coeffs[((k.0 + n) * (2 * m + 1) + (k.1 + m)) as usize].clone();
    let mut g = CorrelationGrid::from_fn(p.d, n, m, &at);
    // exact Hermitian symmetry
    for k in g.entries.keys().copied().collect::<Vec<_>>() {
        if k > (0, 0) || (k.0 == 0 && k.1 > 0) {
            let v = (at(k) + at((-k.0, -k.1)).adjoint()) * C64::new(0.5, 0.0);
            g.insert_pair(k, v);
        }
    }
    if with_corner {
        let v = (at((n, m)) + at((-n, -m)).adjoint()) * C64::new(0.5, 0.0);
        g.insert_pair((n, m), v);
    }
    g
}

fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    let a = DMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    a.qr().q()
}

fn random_complex(rng: &mut ChaCha8Rng, modulus: f64) -> C64 {
    C64::from_polar(modulus, rng.random_range(0.0..2.0 * PI))
}

fn multiply(a: &MatrixPolynomial2D, b: &MatrixPolynomial2D) -> MatrixPolynomial2D {
    let mut out = MatrixPolynomial2D::zeros(a.d, a.n + b.n, a.m + b.m);
    for i in 0..=a.n {
        for j in 0..=a.m {
            for k in 0..=b.n {
                for l in 0..=b.m {
                    *out.get_mut(i + k, j + l) += a.get(i, j) * b.get(k, l);
                }
            }
        }
    }
    out
}

/// Scalar product of factors `1 − a z − b w` with `|a| + |b| < 1`, each
/// invertible on the closed bidisk; constant term 1, bidegree `(n, m)`.
pub fn random_stable_scalar(rng: &mut ChaCha8Rng, n: usize, m: usize) -> MatrixPolynomial2D {
    let mut p = MatrixPolynomial2D::identity(1);
    for t in 0..n.max(m) {
        let budget = rng.random_range(0.3..0.75);
        let share = rng.random_range(0.3..0.7);
        let (na, nb) = match (t < n, t < m) {
            (true, true) => (budget * share, budget * (1.0 - share)),
            (true, false) => (budget, 0.0),
            _ => (0.0, budget),
        };
        let mut f = MatrixPolynomial2D::zeros(1, (t < n) as usize, (t < m) as usize);
        f.get_mut(0, 0)[(0, 0)] = C64::new(1.0, 0.0);
        if t < n {
            f.get_mut(1, 0)[(0, 0)] = -random_complex(rng, na);
        }
        if t < m {
            f.get_mut(0, 1)[(0, 0)] = -random_complex(rng, nb);
        }
        p = multiply(&p, &f);
    }
    p
}

/// Random stable filter of bidegree `(n, m)` with `p₀₀ = I`.
///
/// For `d > 1` it is `V diag(p_1, …, p_d) V*` with `V` a random unitary and
/// scalar stable `p_k`: a generic matrix filter has no companion `r` of the
/// same bidegree, so its band violates the commutation condition.
pub fn random_stable(rng: &mut ChaCha8Rng, d: usize, n: usize, m: usize) -> MatrixPolynomial2D {
    let v = random_unitary(rng, d);
    let parts: Vec<MatrixPolynomial2D> = (0..d).map(|_| random_stable_scalar(rng, n, m)).collect();
    MatrixPolynomial2D::from_fn(d, n, m, |i, j| {
        let diag = CMat::from_diagonal(&nalgebra::DVector::from_fn(d, |k, _| parts[k].get(i, j)[(0, 0)]));
        &v * diag * v.adjoint()
    })
}

/// A generic stable matrix filter `I − A z − B w`, `‖A‖ + ‖B‖ < 1`.
pub fn random_generic_stable(rng: &mut ChaCha8Rng, d: usize) -> MatrixPolynomial2D {
    let mut random_matrix = |norm: f64| {
        let a = DMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let s = a.clone().svd(false, false).singular_values.max();
        a * C64::new(norm / s, 0.0)
    };
    let (a, b) = (random_matrix(0.4), random_matrix(0.4));
    MatrixPolynomial2D::from_fn(d, 1, 1, |i, j| match (i, j) {
        (0, 0) => DMatrix::identity(d, d),
        (1, 0) => -a.clone(),
        (0, 1) => -b.clone(),
        _ => DMatrix::zeros(d, d),
    })
}

pub fn scalar_poly(n: usize, m: usize, table: &[f64]) -> MatrixPolynomial2D {
    MatrixPolynomial2D::scalar(n, m, table)
}
