//! Truncated operator-valued Nehari extension in one variable.

use super::MIN_CONTRACTION_GAP;
use crate::error::{Error, Result};
use crate::fourier::unit_root;
use crate::linalg::{self, CMat, C64};

/// `Γ_0 … Γ_K` (each `rows × cols`) and the section size `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelData1D {
    pub gammas: Vec<CMat>,
    pub n: usize,
}

impl HankelData1D {
    pub fn new(gammas: Vec<CMat>, n: usize) -> Result<Self> {
        let Some(first) = gammas.first() else {
            return Err(Error::Dimension("no Hankel data".into()));
        };
        if n == 0 || gammas.iter().any(|g| g.shape() != first.shape()) {
            return Err(Error::Dimension("Hankel blocks must share one shape and n ≥ 1".into()));
        }
        Ok(HankelData1D { gammas, n })
    }

    pub fn scalar(gammas: &[f64], n: usize) -> Result<Self> {
        Self::new(gammas.iter().map(|&g| linalg::scalar(g)).collect(), n)
    }

    pub fn block_shape(&self) -> (usize, usize) {
        self.gammas[0].shape()
    }

    /// `Γ_k`, zero past the data.
    pub fn gamma(&self, k: usize) -> CMat {
        let (r, c) = self.block_shape();
        self.gammas.get(k).cloned().unwrap_or_else(|| linalg::zeros(r, c))
    }

    /// `(Γ_{i-j})`, `i = 0..n-1`, `j = -(n-1)..0` in that order.
    pub fn section(&self) -> CMat {
        let (r, c) = self.block_shape();
        let n = self.n;
        let mut h = linalg::zeros(n * r, n * c);
        for i in 0..n {
            for jpos in 0..n {
                linalg::set_block(&mut h, i, jpos, &self.gamma(i + n - 1 - jpos));
            }
        }
        h
    }

    pub fn section_norm(&self) -> f64 {
        linalg::spectral_norm(&self.section())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NehariSolution1D {
    pub n: usize,
    pub hankel_norm: f64,
    /// `D_{-1} … D_{-(n-1)}`.
    pub d: Vec<CMat>,
    pub delta0: CMat,
    /// `B_0 … B_{n-1}`.
    pub b: Vec<CMat>,
    /// `A_1 … A_{n-1}` (`A_0 = I`).
    pub a: Vec<CMat>,
    pub alpha0: CMat,
    /// `C_0, C_{-1}, … , C_{-(n-1)}`.
    pub c: Vec<CMat>,
    /// Given `Γ_0 … Γ_K`.
    pub given: Vec<CMat>,
    /// `Γ_{-1} … Γ_{-J}` from the `D` recursion.
    pub extension: Vec<CMat>,
    /// The same from the `A` recursion.
    pub extension_alt: Vec<CMat>,
    /// Largest entry of the difference of the two extensions.
    pub disagreement: f64,
    /// Residuals of the two Yule–Walker systems.
    pub yw_residual: f64,
}

impl NehariSolution1D {
    /// `Γ_k` for `-J ≤ k`, zero past the given data.
    pub fn coefficient(&self, k: i64) -> CMat {
        let (r, c) = self.given[0].shape();
        if k >= 0 {
            self.given.get(k as usize).cloned().unwrap_or_else(|| linalg::zeros(r, c))
        } else {
            self.extension
                .get((-k - 1) as usize)
                .cloned()
                .unwrap_or_else(|| linalg::zeros(r, c))
        }
    }

    /// `f(z) = Σ_{k=-J}^{K} Γ_k z^k`.
    pub fn symbol(&self, z: C64) -> CMat {
        let j = self.extension.len() as i64;
        let mut acc = linalg::zeros(self.given[0].nrows(), self.given[0].ncols());
        for k in -j..self.given.len() as i64 {
            acc += self.coefficient(k) * z.powi(k as i32);
        }
        acc
    }

    /// `max ‖f(z)‖` over `grid` circle points.
    pub fn sup_norm(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|t| linalg::spectral_norm(&self.symbol(unit_root(t, grid))))
            .fold(0.0, f64::max)
    }

    /// `‖(Γ_{i-j})_{i,j=0}^{size-1}‖`; needs `J ≥ size − 1`.
    pub fn toeplitz_section_norm(&self, size: usize) -> f64 {
        let (r, c) = self.given[0].shape();
        let mut t = linalg::zeros(size * r, size * c);
        for i in 0..size {
            for j in 0..size {
                linalg::set_block(&mut t, i, j, &self.coefficient(i as i64 - j as i64));
            }
        }
        linalg::spectral_norm(&t)
    }
}

fn recursion(given: &HankelData1D, weights: &[CMat], j_max: usize, adjoint: bool) -> Vec<CMat> {
    // Γ_j = −Σ_k Γ_{j+k} D_{−k}, or Γ_j* = −Σ_k Γ*_{j+k} A_k
    let mut neg: Vec<CMat> = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let (r, c) = given.block_shape();
        let mut acc = if adjoint { linalg::zeros(c, r) } else { linalg::zeros(r, c) };
        for (k, w) in weights.iter().enumerate() {
            let s = k as i64 + 1 - j as i64;
            let g = if s >= 0 { given.gamma(s as usize) } else { neg[(-s - 1) as usize].clone() };
            if adjoint {
                acc -= g.adjoint() * w;
            } else {
                acc -= g * w;
            }
        }
        neg.push(if adjoint { acc.adjoint() } else { acc });
    }
    neg
}

/// Solves the truncated Yule–Walker systems of `[[I, H], [H*, I]]` and
/// extends `Γ` to `Γ_{-1} … Γ_{-J}` by both recursions.
pub fn solve_nehari_1d(h: &HankelData1D, j_max: usize) -> Result<NehariSolution1D> {
    if j_max == 0 {
        return Err(Error::Dimension("extension length J must be at least 1".into()));
    }
    let (r, c) = h.block_shape();
    let n = h.n;
    let section = h.section();
    let hankel_norm = linalg::spectral_norm(&section);
    if hankel_norm >= 1.0 {
        return Err(Error::NormAtLeastOne { norm: hankel_norm });
    }
    if 1.0 - hankel_norm < MIN_CONTRACTION_GAP {
        return Err(Error::IllConditioned { gap: 1.0 - hankel_norm });
    }
    let top = n * r;
    let size = top + n * c;
    let mut big = linalg::identity(size);
    big.view_mut((0, top), (top, n * c)).copy_from(&section);
    big.view_mut((top, 0), (n * c, top)).copy_from(&section.adjoint());

    // [[I, H], [H*, I]] [B; D] = [0; Δ], D's last block pinned to I
    let mut rhs = linalg::zeros(size, c);
    rhs.view_mut((size - c, 0), (c, c)).copy_from(&linalg::identity(c));
    let x = linalg::solve_hpd(&big, &rhs, "[[I, H], [H*, I]]")?;
    let y0 = x.view((size - c, 0), (c, c)).into_owned();
    let y0_inv = y0.try_inverse().ok_or(Error::IllConditioned { gap: 0.0 })?;
    let bd = &x * &y0_inv;
    let b: Vec<CMat> = (0..n).map(|i| bd.view((i * r, 0), (r, c)).into_owned()).collect();
    let d_all: Vec<CMat> = (0..n).map(|i| bd.view((top + i * c, 0), (c, c)).into_owned()).collect();
    // d_all is ordered D_{-(n-1)}, …, D_{-1}, I
    let d: Vec<CMat> = (1..n).map(|k| d_all[n - 1 - k].clone()).collect();
    // Δ₀ read from the last block row of the system itself
    let delta0 = linalg::hermitian_part(&(&big * &bd).view((size - c, 0), (c, c)).into_owned());

    // [[I, H], [H*, I]] [A; C] = [α; 0], A_0 = I
    let mut rhs2 = linalg::zeros(size, r);
    rhs2.view_mut((0, 0), (r, r)).copy_from(&linalg::identity(r));
    let x2 = linalg::solve_hpd(&big, &rhs2, "[[I, H], [H*, I]]")?;
    let y = linalg::block(&x2, 0, 0, r, r);
    let y_inv = y.try_inverse().ok_or(Error::IllConditioned { gap: 0.0 })?;
    let ac = &x2 * &y_inv;
    let a: Vec<CMat> = (1..n).map(|k| ac.view((k * r, 0), (r, r)).into_owned()).collect();
    let c_blocks: Vec<CMat> = (0..n)
        .rev()
        .map(|i| ac.view((top + i * c, 0), (c, r)).into_owned())
        .collect();
    let alpha0 = linalg::hermitian_part(&(&big * &ac).view((0, 0), (r, r)).into_owned());

    let mut want1 = linalg::zeros(size, c);
    want1.view_mut((size - c, 0), (c, c)).copy_from(&delta0);
    let mut want2 = linalg::zeros(size, r);
    want2.view_mut((0, 0), (r, r)).copy_from(&alpha0);
    let yw_residual = linalg::max_abs(&(&big * &bd - want1)).max(linalg::max_abs(&(&big * &ac - want2)));

    let extension = recursion(h, &d, j_max, false);
    let extension_alt = recursion(h, &a, j_max, true);
    let disagreement = extension
        .iter()
        .zip(&extension_alt)
        .map(|(x, y)| linalg::max_abs(&(x - y)))
        .fold(0.0, f64::max);

    Ok(NehariSolution1D {
        n,
        hankel_norm,
        d,
        delta0,
        b,
        a,
        alpha0,
        c: c_blocks,
        given: h.gammas.clone(),
        extension,
        extension_alt,
        disagreement,
        yw_residual,
    })
}

/// Runs at `n` and `2n`; the extensions must agree within `10·tol`.
/// Returns the `2n` solution.
pub fn solve_nehari_1d_converged(h: &HankelData1D, j_max: usize, tol: f64) -> Result<NehariSolution1D> {
    let coarse = solve_nehari_1d(h, j_max)?;
    let fine = solve_nehari_1d(&HankelData1D { n: 2 * h.n, ..h.clone() }, j_max)?;
    let change = coarse
        .extension
        .iter()
        .zip(&fine.extension)
        .map(|(x, y)| linalg::max_abs(&(x - y)))
        .fold(0.0, f64::max);
    if change > 10.0 * tol {
        return Err(Error::NoConvergence { change });
    }
    Ok(fine)
}
