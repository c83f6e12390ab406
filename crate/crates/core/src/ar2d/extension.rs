//! Full-plane covariance extension from a designed filter.

use super::stability::{stability_check_2d, DEFAULT_GRID_N, DEFAULT_STABILITY_MARGIN};
use crate::covariance::{CovarianceTable, IndexRect};
use crate::error::{Error, Result};
use crate::fourier::TorusField;
use crate::linalg::{self, CMat, C64};
use crate::poly::MatrixPolynomial2D;

/// `f(z,w) = (p(z,w) p(z,w)*)⁻¹` on the torus.
pub fn spectral_density(p: &MatrixPolynomial2D, z: C64, w: C64) -> Result<CMat> {
    let v = p.eval(z, w);
    (&v * v.adjoint())
        .try_inverse()
        .map(|f| linalg::hermitian_part(&f))
        .ok_or(Error::Unstable { min_modulus: 1.0 })
}

/// `c_{ij}`, `(i,j) ∈ rect`, of `f = (p p*)⁻¹`, from an `fft_n × fft_n` torus
/// grid. Each `c_{ij}` is averaged with `c_{-i,-j}*` so the table is exactly
/// Hermitian symmetric.
pub fn extend_covariance_2d(p: &MatrixPolynomial2D, rect: IndexRect, fft_n: usize) -> Result<CovarianceTable> {
    let reach = [rect.z_lo, rect.z_hi, rect.w_lo, rect.w_hi]
        .iter()
        .map(|k| k.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    if 2 * reach >= fft_n {
        return Err(Error::Dimension(format!("fft size {fft_n} cannot resolve index {reach}")));
    }
    let cert = stability_check_2d(p, DEFAULT_GRID_N, DEFAULT_STABILITY_MARGIN)?;
    if !cert.passed {
        return Err(Error::Unstable {
            min_modulus: cert.min_modulus(),
        });
    }
    let field = TorusField::sample(fft_n, |z, w| {
        let v = p.eval(z, w);
        (&v * v.adjoint()).try_inverse().expect("stable polynomial is invertible on the torus")
    });
    let coeffs = field.coefficients();
    let mut table = CovarianceTable::new(p.d);
    for (i, j) in rect.iter() {
        let c = (coeffs.coeff(i, j) + coeffs.coeff(-i, -j).adjoint()).scale(0.5);
        table.entries.insert((i, j), c);
    }
    Ok(table)
}
