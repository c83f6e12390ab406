//! Construction of the stable pair `p`, `r` from a feasible band.

use super::stability::{stability_check_2d, StabilityCertificate, DEFAULT_GRID_N, DEFAULT_STABILITY_MARGIN};
use super::{check_conditions, FeasibilityReport, DEFAULT_TOL_COMM};
use crate::completion::install_corners;
use crate::covariance::{build_doubly_toeplitz, CorrelationGrid, CovarianceTable, IndexRect, DEFAULT_PD_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::poly::MatrixPolynomial2D;

/// Relative size allowed for entries that must vanish structurally.
pub const DEFAULT_STRUCTURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignOptions {
    pub tol_comm: f64,
    pub tol_pd: f64,
    pub structure_tol: f64,
    pub grid_n: usize,
    pub margin: f64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            tol_comm: DEFAULT_TOL_COMM,
            tol_pd: DEFAULT_PD_TOL,
            structure_tol: DEFAULT_STRUCTURE_TOL,
            grid_n: DEFAULT_GRID_N,
            margin: DEFAULT_STABILITY_MARGIN,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Design {
    pub p: MatrixPolynomial2D,
    pub r: MatrixPolynomial2D,
    pub feasibility: FeasibilityReport,
    /// Band plus both installed corner pairs.
    pub table: CovarianceTable,
    /// Relative size of the entries of `P_i`, `S_j` that must vanish.
    pub p_structure_deviation: f64,
    pub r_structure_deviation: f64,
    pub p_stability: StabilityCertificate,
    pub r_stability: StabilityCertificate,
}

/// Raw solves of the two Yule–Walker systems of `Γ = (C_{i-j})_{i,j=0}^n`.
pub(crate) struct BlockSolves {
    /// `P_0 … P_n`, each `(m+1)d` square.
    pub p_blocks: Vec<CMat>,
    /// `S_{-n} … S_0`.
    pub s_blocks: Vec<CMat>,
}

pub(crate) fn block_solves(table: &CovarianceTable, n: usize, m: usize) -> Result<BlockSolves> {
    let d = table.d;
    let rect = IndexRect::quarter(n as i64, m as i64);
    let gamma = build_doubly_toeplitz(table, rect, rect)?.data;
    let size = (m + 1) * d;
    let total = gamma.nrows();

    let mut e_first = linalg::zeros(total, size);
    e_first.view_mut((0, 0), (size, size)).copy_from(&linalg::identity(size));
    let q = linalg::vsplit(&linalg::solve_hpd(&gamma, &e_first, "Γ")?, n + 1);
    let l = linalg::block_cholesky_lower(&q[0], d, "Q_0")?;
    let p_blocks = q.iter().map(|qj| linalg::mul_inv_adjoint(qj, &l, true)).collect();

    let mut e_last = linalg::zeros(total, size);
    e_last.view_mut((total - size, 0), (size, size)).copy_from(&linalg::identity(size));
    let rr = linalg::vsplit(&linalg::solve_hpd(&gamma, &e_last, "Γ")?, n + 1);
    let u = linalg::block_cholesky_upper(&rr[n], d, "R_0")?;
    let s_blocks = rr.iter().map(|rj| linalg::mul_inv_adjoint(rj, &u, false)).collect();

    Ok(BlockSolves { p_blocks, s_blocks })
}

impl BlockSolves {
    /// `p_{ij}` = block `(j, 0)` of `P_i`.
    pub fn p(&self, d: usize, n: usize, m: usize) -> MatrixPolynomial2D {
        MatrixPolynomial2D::from_fn(d, n, m, |i, j| linalg::block(&self.p_blocks[i], j, 0, d, d))
    }

    /// `r_{ij}` = adjoint of block `(m-j, m)` of `S_{-i}`.
    pub fn r(&self, d: usize, n: usize, m: usize) -> MatrixPolynomial2D {
        MatrixPolynomial2D::from_fn(d, n, m, |i, j| {
            linalg::block(&self.s_blocks[n - i], m - j, m, d, d).adjoint()
        })
    }

    /// Largest entry of the first block row of any `P_i` beyond block 0,
    /// relative to the largest entry of all `P_i`.
    pub fn p_structure_deviation(&self, d: usize, m: usize) -> f64 {
        let zeros: Vec<_> = (1..=m).map(|c| (0, c)).collect();
        structure_deviation(&self.p_blocks, d, &zeros)
    }

    /// Same for the last block row of any `S_j` before its last block.
    pub fn r_structure_deviation(&self, d: usize, m: usize) -> f64 {
        let zeros: Vec<_> = (0..m).map(|c| (m, c)).collect();
        structure_deviation(&self.s_blocks, d, &zeros)
    }
}

fn structure_deviation(blocks: &[CMat], d: usize, zero_blocks: &[(usize, usize)]) -> f64 {
    let scale = blocks.iter().map(linalg::max_abs).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let dev = blocks
        .iter()
        .flat_map(|b| zero_blocks.iter().map(move |&(bi, bj)| linalg::max_abs(&linalg::block(b, bi, bj, d, d))))
        .fold(0.0, f64::max);
    dev / scale
}

/// Designs the stable filters `p`, `r` of bidegree `(n, m)` with
/// `p^{*-1} p^{-1} = Σ c_{ij} z^i w^j = r^{-1} r^{*-1}` matching the band.
///
/// `p₀₀` and `r₀₀` come out Hermitian positive definite.
pub fn design_filters(grid: &CorrelationGrid, opts: DesignOptions) -> Result<Design> {
    let feasibility = check_conditions(grid, opts.tol_comm, opts.tol_pd)?;
    if !feasibility.feasible {
        return Err(Error::Infeasible(format!(
            "commutation residual {:.3e}, punctured minimum eigenvalues {:.3e} and {:.3e}",
            feasibility.comm_residual, feasibility.pd_min_eig1, feasibility.pd_min_eig2
        )));
    }
    let (d, n, m) = (grid.d, grid.n as usize, grid.m as usize);
    let table = install_corners(grid)?;
    let solves = block_solves(&table, n, m)?;

    let p_structure_deviation = solves.p_structure_deviation(d, m);
    if p_structure_deviation > opts.structure_tol {
        return Err(Error::StructureViolation {
            what: "first block row of P_i".into(),
            magnitude: p_structure_deviation,
        });
    }
    let r_structure_deviation = solves.r_structure_deviation(d, m);
    if r_structure_deviation > opts.structure_tol {
        return Err(Error::StructureViolation {
            what: "last block row of S_j".into(),
            magnitude: r_structure_deviation,
        });
    }

    let p = solves.p(d, n, m);
    let r = solves.r(d, n, m);
    let p_stability = stability_check_2d(&p, opts.grid_n, opts.margin)?;
    let r_stability = stability_check_2d(&r, opts.grid_n, opts.margin)?;
    for cert in [&p_stability, &r_stability] {
        if !cert.passed {
            return Err(Error::Unstable {
                min_modulus: cert.min_modulus(),
            });
        }
    }
    Ok(Design {
        p,
        r,
        feasibility,
        table,
        p_structure_deviation,
        r_structure_deviation,
        p_stability,
        r_stability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scalar;

    #[test]
    fn identity_grid_gives_identity_filters() {
        let g = CorrelationGrid::from_fn(2, 1, 2, |k| {
            if k == (0, 0) {
                linalg::identity(2)
            } else {
                linalg::zeros(2, 2)
            }
        });
        let des = design_filters(&g, DesignOptions::default()).unwrap();
        let id = MatrixPolynomial2D::identity(2);
        assert_eq!(des.p.max_coeff_distance(&id), 0.0);
        assert_eq!(des.r.max_coeff_distance(&id), 0.0);
    }

    fn separable_grid() -> CorrelationGrid {
        let c = |k: (i64, i64)| scalar(0.5f64.powi(k.0.abs() as i32) * 0.4f64.powi(k.1.abs() as i32) / (0.75 * 0.84));
        let mut g = CorrelationGrid::from_fn(1, 1, 1, c);
        g.insert_pair((1, 1), c((1, 1)));
        g
    }

    #[test]
    fn separable_generator_is_recovered() {
        let des = design_filters(&separable_grid(), DesignOptions::default()).unwrap();
        let want = MatrixPolynomial2D::scalar(1, 1, &[1.0, -0.4, -0.5, 0.2]);
        assert!(des.p.normalized().max_coeff_distance(&want) < 1e-12);
        assert!(des.r.normalized().max_coeff_distance(&want) < 1e-12);
        assert!(des.p_structure_deviation < 1e-14);
    }
}
