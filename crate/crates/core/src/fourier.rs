//! Sampling on the unit circle / torus and Fourier coefficient extraction.
//!
//! Convention: `f(z) = Σ c_k z^k`, so `c_k = (1/N) Σ_t f(ω^t) ω^{-tk}` with
//! `ω = e^{2πi/N}`, which is a forward FFT scaled by `1/N`.

use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::linalg::{self, CMat, C64};

/// `e^{2πi k / n}`.
pub fn unit_root(k: usize, n: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// Angle of the `k`-th of `n` equispaced circle points.
pub fn angle(k: usize, n: usize) -> f64 {
    2.0 * PI * k as f64 / n as f64
}

/// Wraps an integer frequency into `0..n`.
pub fn wrap(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// In-place `c_k` extraction from `n` circle samples.
pub fn coefficients_1d(samples: &mut [C64]) {
    let n = samples.len();
    FftPlanner::new().plan_fft_forward(n).process(samples);
    let scale = 1.0 / n as f64;
    samples.iter_mut().for_each(|v| *v *= scale);
}

/// In-place `c_{ij}` extraction from an `n × n` torus grid stored row-major
/// with the `z` sample index major.
pub fn coefficients_2d(samples: &mut [C64], n: usize) {
    assert_eq!(samples.len(), n * n);
    let fft = FftPlanner::new().plan_fft_forward(n);
    // rows: transform over w
    fft.process(samples);
    // columns: transform over z
    let mut column = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            column[i] = samples[i * n + j];
        }
        fft.process(&mut column);
        for i in 0..n {
            samples[i * n + j] = column[i];
        }
    }
    let scale = 1.0 / (n * n) as f64;
    samples.iter_mut().for_each(|v| *v *= scale);
}

/// Matrix-valued samples of a function on the `n × n` torus grid.
#[derive(Debug, Clone)]
pub struct TorusField {
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    /// `values[a * n + b] = F(ω^a, ω^b)`.
    pub values: Vec<CMat>,
}

impl TorusField {
    pub fn sample(n: usize, mut f: impl FnMut(C64, C64) -> CMat) -> Self {
        let mut values = Vec::with_capacity(n * n);
        for a in 0..n {
            let z = unit_root(a, n);
            for b in 0..n {
                values.push(f(z, unit_root(b, n)));
            }
        }
        let (rows, cols) = values[0].shape();
        TorusField { n, rows, cols, values }
    }

    /// All Fourier coefficients; `coeff(i, j)` then reads `c_{ij}` for `|i|, |j| < n/2`.
    pub fn coefficients(&self) -> TorusCoefficients {
        let n = self.n;
        let mut out = vec![linalg::zeros(self.rows, self.cols); n * n];
        let mut buf = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..self.rows {
            for c in 0..self.cols {
                for (slot, v) in buf.iter_mut().zip(&self.values) {
                    *slot = v[(r, c)];
                }
                coefficients_2d(&mut buf, n);
                for (o, v) in out.iter_mut().zip(&buf) {
                    o[(r, c)] = *v;
                }
            }
        }
        TorusCoefficients { n, coeffs: out }
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(linalg::spectral_norm).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct TorusCoefficients {
    pub n: usize,
    coeffs: Vec<CMat>,
}

impl TorusCoefficients {
    pub fn coeff(&self, i: i64, j: i64) -> &CMat {
        &self.coeffs[wrap(i, self.n) * self.n + wrap(j, self.n)]
    }
}
