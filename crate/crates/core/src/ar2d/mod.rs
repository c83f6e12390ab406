//! Two-variable autoregressive filters.
//!
//! Given `c_{ij}` on the band `Λ`, decide whether stable `p(z,w)`, `r(z,w)`
//! of bidegree `(n, m)` exist with
//! `p^{*-1} p^{-1} = Σ c_{ij} z^i w^j = r^{-1} r^{*-1}` on the torus, build
//! them, certify their stability, and extend the covariance to the plane.

mod design;
mod extension;
mod identities;
mod stability;

pub use design::{design_filters, Design, DesignOptions};
pub use extension::{extend_covariance_2d, spectral_density};
pub use identities::{inverse_formula_check, nested_factor_check, w_coefficient_functions};
pub use stability::{stability_check_2d, StabilityCertificate, DEFAULT_GRID_N, DEFAULT_STABILITY_MARGIN};

use crate::completion::corner_c_minus_nm;
use crate::covariance::{
    build_doubly_toeplitz, is_positive_definite, validate_grid, ValidationReport, BlockMatrix, Coefficients, CorrelationGrid,
    IndexRect, IndexSet, DEFAULT_PD_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Default relative Frobenius threshold for the commutation condition.
pub const DEFAULT_TOL_COMM: f64 = 1e-8;

/// Verdict on the two solvability conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// `‖Φ₁Φ⁻¹Φ₂* − Φ₂*Φ⁻¹Φ₁‖_F / max(‖Φ₁Φ⁻¹Φ₂*‖_F, ‖Φ₂*Φ⁻¹Φ₁‖_F)`.
    pub comm_residual: f64,
    /// The forced corner `c_{-n,m}`.
    pub corner_minus_nm: CMat,
    /// Smallest eigenvalue of `(c_{k-l})` over the quarter rect without `(n,m)`.
    pub pd_min_eig1: f64,
    /// Same without `(0,0)`.
    pub pd_min_eig2: f64,
    pub phi_min_eig: f64,
    pub tol_comm: f64,
    pub tol_pd: f64,
    pub feasible: bool,
}

/// The three matrices `Φ`, `Φ₁`, `Φ₂` built from the band.
#[derive(Debug, Clone)]
pub struct PhiMatrices {
    pub phi: BlockMatrix,
    pub phi1: BlockMatrix,
    pub phi2: BlockMatrix,
}

pub fn phi_matrices<C: Coefficients>(src: &C, n: i64, m: i64) -> Result<PhiMatrices> {
    let rows = IndexRect::new(0..=n - 1, 0..=m - 1);
    Ok(PhiMatrices {
        phi: build_doubly_toeplitz(src, rows, rows)?,
        phi1: build_doubly_toeplitz(src, rows, IndexRect::new(1..=n, 0..=m - 1))?,
        phi2: build_doubly_toeplitz(src, rows, IndexRect::new(0..=n - 1, 1..=m))?,
    })
}

impl PhiMatrices {
    /// `Φ₁Φ⁻¹Φ₂*` and `Φ₂*Φ⁻¹Φ₁`.
    pub fn products(&self) -> Result<(CMat, CMat)> {
        let phi = &self.phi.data;
        let phi2_star = self.phi2.data.adjoint();
        let left = &self.phi1.data * linalg::solve_hpd(phi, &phi2_star, "Φ")?;
        let right = phi2_star * linalg::solve_hpd(phi, &self.phi1.data, "Φ")?;
        Ok((left, right))
    }

    pub fn comm_residual(&self) -> Result<f64> {
        let (a, b) = self.products()?;
        Ok(linalg::relative_frobenius(&a, &b))
    }
}

/// Largest deviation of a pair-indexed square block matrix from being doubly
/// Toeplitz with respect to the positional labels `labels`.
pub fn doubly_toeplitz_deviation(m: &CMat, labels: &IndexSet, d: usize) -> f64 {
    use std::collections::BTreeMap;
    let mut first: BTreeMap<(i64, i64), CMat> = BTreeMap::new();
    let mut dev: f64 = 0.0;
    for (pk, k) in labels.iter().enumerate() {
        for (pl, l) in labels.iter().enumerate() {
            let b = linalg::block(m, pk, pl, d, d);
            let key = (k.0 - l.0, k.1 - l.1);
            match first.get(&key) {
                Some(f) => dev = dev.max(linalg::max_abs(&(&b - f))),
                None => {
                    first.insert(key, b);
                }
            }
        }
    }
    dev
}

/// Names the first offending index of an invalid grid.
pub fn describe_invalid(v: &ValidationReport) -> String {
    if let Some(&(i, j)) = v.missing.first() {
        return format!("index ({i}, {j}) is missing");
    }
    if let Some(&(i, j)) = v.extra.first() {
        return format!("index ({i}, {j}) lies outside the band");
    }
    if let Some(&(i, j)) = v.bad_shape.first() {
        return format!("entry ({i}, {j}) has the wrong shape");
    }
    if v.symmetry_deviation > v.tol {
        if let Some((i, j)) = v.worst_symmetry_index {
            return format!(
                "c({}, {}) is not the adjoint of c({i}, {j}) (deviation {:.3e})",
                -i, -j, v.symmetry_deviation
            );
        }
    }
    format!("c(0, 0) is not positive definite (min eigenvalue {:.3e})", v.c00_min_eig)
}

/// Tests conditions (i) and (ii): commutation `Φ₁Φ⁻¹Φ₂* = Φ₂*Φ⁻¹Φ₁` and
/// positive definiteness of the two punctured quarter-rect matrices after
/// installing the forced corner `c_{-n,m}`.
pub fn check_conditions(grid: &CorrelationGrid, tol_comm: f64, tol_pd: f64) -> Result<FeasibilityReport> {
    let validation = validate_grid(grid, tol_pd.max(DEFAULT_PD_TOL));
    if !validation.missing.is_empty() {
        let k = validation.missing[0];
        return Err(Error::MissingIndex(k.0, k.1));
    }
    if !validation.is_valid() {
        return Err(Error::InvalidGrid(describe_invalid(&validation)));
    }
    let (n, m) = (grid.n, grid.m);
    let phis = phi_matrices(grid, n, m)?;
    let (phi_pd, phi_min_eig) = is_positive_definite(&phis.phi.data, tol_pd)?;
    if !phi_pd {
        return Err(Error::NotPd {
            what: "Φ".into(),
            min_eig: phi_min_eig,
        });
    }
    let comm_residual = phis.comm_residual()?;

    let corner = corner_c_minus_nm(grid)?;
    let table = grid.band_only().with_corner((-n, m), corner.clone());
    let quarter = IndexRect::quarter(n, m);
    let set1 = quarter.without(&[(n, m)]);
    let set2 = quarter.without(&[(0, 0)]);
    let (pd1, pd_min_eig1) = is_positive_definite(&build_doubly_toeplitz(&table, set1.clone(), set1)?.data, tol_pd)?;
    let (pd2, pd_min_eig2) = is_positive_definite(&build_doubly_toeplitz(&table, set2.clone(), set2)?.data, tol_pd)?;

    Ok(FeasibilityReport {
        comm_residual,
        corner_minus_nm: corner,
        pd_min_eig1,
        pd_min_eig2,
        phi_min_eig,
        tol_comm,
        tol_pd,
        feasible: comm_residual <= tol_comm && pd1 && pd2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scalar;

    fn identity_grid() -> CorrelationGrid {
        CorrelationGrid::from_fn(1, 1, 1, |k| scalar(if k == (0, 0) { 1.0 } else { 0.0 }))
    }

    #[test]
    fn identity_grid_is_feasible() {
        let rep = check_conditions(&identity_grid(), DEFAULT_TOL_COMM, DEFAULT_PD_TOL).unwrap();
        assert!(rep.feasible);
        assert_eq!(rep.comm_residual, 0.0);
        assert_eq!(rep.pd_min_eig1, 1.0);
    }

    #[test]
    fn missing_entry_is_reported() {
        let mut g = identity_grid();
        g.entries.remove(&(0, -1));
        assert_eq!(
            check_conditions(&g, DEFAULT_TOL_COMM, DEFAULT_PD_TOL).unwrap_err(),
            Error::MissingIndex(0, -1)
        );
    }

    #[test]
    fn non_pd_phi_is_an_error() {
        let mut g = identity_grid();
        g.insert_pair((0, 0), scalar(-1.0));
        assert!(check_conditions(&g, DEFAULT_TOL_COMM, DEFAULT_PD_TOL).is_err());
    }

    #[test]
    fn toeplitz_deviation_detects_breaks() {
        let labels = IndexRect::quarter(1, 1).to_set();
        let mut m = linalg::identity(4);
        assert_eq!(doubly_toeplitz_deviation(&m, &labels, 1), 0.0);
        m[(3, 3)] = linalg::real(2.0);
        assert_eq!(doubly_toeplitz_deviation(&m, &labels, 1), 1.0);
    }
}
