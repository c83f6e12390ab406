//! Truncated little-Hankel Nehari extension in two variables.
//!
//! Index pairs are `(outer, inner)` = (`z`-index, `w`-index). The little
//! Hankel `h_γ` maps `−ℕ₀ × −ℕ₀` to `ℕ₀ × ℕ₀` with entries `γ_{i-j, p-q}`;
//! as an outer Hankel its blocks are the inner Hankels
//! `Γ_s = (γ_{s, p-q})_{p ≥ 0, q ≤ 0}`.

use std::collections::BTreeMap;

use super::one::{solve_nehari_1d, HankelData1D, NehariSolution1D};
use crate::covariance::is_positive_definite;
use crate::error::{Error, Result};
use crate::fourier::{self, unit_root, TorusField};
use crate::linalg::{self, CMat, C64};

type Pair = (i64, i64);

/// Grid used for the final sup-norm certificate.
pub const CERTIFICATE_GRID: usize = 256;

/// `γ_{ij}`, `0 ≤ i, j ≤ K`, with inner section size `n` and outer `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LittleHankelData {
    pub d: usize,
    pub k: usize,
    /// Row-major: `gammas[i * (k + 1) + j] = γ_{ij}`.
    pub gammas: Vec<CMat>,
    pub n: usize,
    pub m: usize,
}

impl LittleHankelData {
    pub fn from_fn(d: usize, k: usize, n: usize, m: usize, mut f: impl FnMut(usize, usize) -> CMat) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Dimension("section sizes must be positive".into()));
        }
        let mut gammas = Vec::with_capacity((k + 1) * (k + 1));
        for i in 0..=k {
            for j in 0..=k {
                let g = f(i, j);
                if g.shape() != (d, d) {
                    return Err(Error::Dimension(format!("γ_({i},{j}) is not {d}×{d}")));
                }
                gammas.push(g);
            }
        }
        Ok(LittleHankelData { d, k, gammas, n, m })
    }

    /// `γ_{ij}`, zero outside the given quadrant square.
    pub fn gamma(&self, i: i64, j: i64) -> CMat {
        let k = self.k as i64;
        if (0..=k).contains(&i) && (0..=k).contains(&j) {
            self.gammas[(i * (k + 1) + j) as usize].clone()
        } else {
            linalg::zeros(self.d, self.d)
        }
    }

    /// Inner Hankel `Γ_s` as an `n × n` block section.
    pub fn inner_hankel(&self, s: i64) -> CMat {
        let (d, n) = (self.d, self.n);
        let mut out = linalg::zeros(n * d, n * d);
        for p in 0..n {
            for qpos in 0..n {
                let q = qpos as i64 - (n as i64 - 1);
                linalg::set_block(&mut out, p, qpos, &self.gamma(s, p as i64 - q));
            }
        }
        out
    }

    /// The outer Hankel data `Γ_0 … Γ_K`.
    pub fn outer(&self) -> HankelData1D {
        HankelData1D {
            gammas: (0..=self.k as i64).map(|s| self.inner_hankel(s)).collect(),
            n: self.m,
        }
    }

    pub fn section_norm(&self) -> f64 {
        self.outer().section_norm()
    }
}

/// The compressions `Φ`, `Φ₁`, `Φ₂` of `[[I, h_γ], [h_γ*, I]]`.
#[derive(Debug, Clone)]
pub struct Compressions {
    pub phi: CMat,
    pub phi1: CMat,
    pub phi2: CMat,
    /// Largest entry difference between the two displayed recipes of each.
    pub recipe_mismatch: f64,
}

#[derive(Clone, Copy)]
enum Range {
    /// `ℕ₀`
    Nat0,
    /// `ℕ`
    Nat,
    /// `−ℕ₀`
    NegNat0,
    /// `−ℕ`
    NegNat,
}

impl Range {
    fn values(self, len: usize) -> Vec<i64> {
        let l = len as i64;
        match self {
            Range::Nat0 => (0..l).collect(),
            Range::Nat => (1..=l).collect(),
            Range::NegNat0 => (-(l - 1)..=0).collect(),
            Range::NegNat => (-l..=-1).collect(),
        }
    }
}

fn product(g: &LittleHankelData, outer: Range, inner: Range) -> Vec<Pair> {
    let inner = inner.values(g.n);
    outer
        .values(g.m)
        .into_iter()
        .flat_map(|i| inner.iter().map(move |&p| (i, p)))
        .collect()
}

/// Compression of `[[I, h_γ], [h_γ*, I]]` to rows `r1 ⊕ r2`, columns `c1 ⊕ c2`
/// (`r1, c1 ⊆ ℕ₀ × ℕ₀`, `r2, c2 ⊆ −ℕ₀ × −ℕ₀`).
fn compress(g: &LittleHankelData, rows: [(Range, Range); 2], cols: [(Range, Range); 2]) -> CMat {
    let d = g.d;
    let r1 = product(g, rows[0].0, rows[0].1);
    let r2 = product(g, rows[1].0, rows[1].1);
    let c1 = product(g, cols[0].0, cols[0].1);
    let c2 = product(g, cols[1].0, cols[1].1);
    let mut out = linalg::zeros((r1.len() + r2.len()) * d, (c1.len() + c2.len()) * d);
    let eye = linalg::identity(d);
    for (a, &r) in r1.iter().enumerate() {
        for (b, &c) in c1.iter().enumerate() {
            if r == c {
                linalg::set_block(&mut out, a, b, &eye);
            }
        }
        for (b, &c) in c2.iter().enumerate() {
            linalg::set_block(&mut out, a, c1.len() + b, &g.gamma(r.0 - c.0, r.1 - c.1));
        }
    }
    for (a, &r) in r2.iter().enumerate() {
        for (b, &c) in c1.iter().enumerate() {
            linalg::set_block(&mut out, r1.len() + a, b, &g.gamma(c.0 - r.0, c.1 - r.1).adjoint());
        }
        for (b, &c) in c2.iter().enumerate() {
            if r == c {
                linalg::set_block(&mut out, r1.len() + a, c1.len() + b, &eye);
            }
        }
    }
    out
}

pub fn build_compressions(g: &LittleHankelData) -> Compressions {
    use Range::*;
    let phi = compress(g, [(Nat0, Nat), (NegNat, NegNat0)], [(Nat0, Nat), (NegNat, NegNat0)]);
    let phi_alt = compress(g, [(Nat, Nat0), (NegNat0, NegNat)], [(Nat, Nat0), (NegNat0, NegNat)]);
    let phi1 = compress(g, [(Nat0, Nat0), (NegNat, NegNat)], [(Nat, Nat0), (NegNat0, NegNat)]);
    let phi1_alt = compress(g, [(Nat0, Nat), (NegNat, NegNat0)], [(Nat, Nat), (NegNat0, NegNat0)]);
    let phi2 = compress(g, [(Nat0, Nat0), (NegNat, NegNat)], [(Nat0, Nat), (NegNat, NegNat0)]);
    let phi2_alt = compress(g, [(Nat, Nat0), (NegNat0, NegNat)], [(Nat, Nat), (NegNat0, NegNat0)]);
    let recipe_mismatch = [(&phi, &phi_alt), (&phi1, &phi1_alt), (&phi2, &phi2_alt)]
        .iter()
        .map(|(a, b)| linalg::max_abs(&(*a - *b)))
        .fold(0.0, f64::max);
    Compressions {
        phi,
        phi1,
        phi2,
        recipe_mismatch,
    }
}

/// Relative Frobenius residual of `Φ₁Φ⁻¹Φ₂* = Φ₂*Φ⁻¹Φ₁`.
pub fn check_comm_2d(c: &Compressions) -> Result<f64> {
    let (pd, min_eig) = is_positive_definite(&c.phi, 0.0)?;
    if !pd {
        return Err(Error::NotPd {
            what: "Φ".into(),
            min_eig,
        });
    }
    let phi2_star = c.phi2.adjoint();
    let left = &c.phi1 * linalg::solve_hpd(&c.phi, &phi2_star, "Φ")?;
    let right = &phi2_star * linalg::solve_hpd(&c.phi, &c.phi1, "Φ")?;
    Ok(linalg::relative_frobenius(&left, &right))
}

#[derive(Debug, Clone)]
pub struct NehariSolution2D {
    pub d: usize,
    pub j: usize,
    pub comm_residual: f64,
    pub section_norm: f64,
    /// Largest entry of the computed `D_{-k}` that must vanish (last row).
    pub claim_d_deviation: f64,
    /// Same for `A_k` (first row).
    pub claim_a_deviation: f64,
    /// Largest deviation of an extended `Γ_j`, `j < 0`, from Hankel form.
    pub hankel_deviation: f64,
    /// Given and extended `γ_{ij}`, `|i|, |j| ≤ J` plus the given quadrant.
    pub gammas: BTreeMap<Pair, CMat>,
    /// `max ‖Σ γ_{ij} z^i w^j‖` on the certificate grid.
    pub sup_norm: f64,
    pub outer: NehariSolution1D,
}

impl NehariSolution2D {
    pub fn symbol(&self, z: C64, w: C64) -> CMat {
        let mut acc = linalg::zeros(self.d, self.d);
        for (&(i, j), g) in &self.gammas {
            acc += g * (z.powi(i as i32) * w.powi(j as i32));
        }
        acc
    }

    /// The extended entries only (`min(i, j) < 0`).
    pub fn extension(&self) -> impl Iterator<Item = (&Pair, &CMat)> {
        self.gammas.iter().filter(|(k, _)| k.0.min(k.1) < 0)
    }
}

fn hankel_deviation(m: &CMat, d: usize) -> f64 {
    let n = m.nrows() / d;
    let mut dev: f64 = 0.0;
    for p in 0..n - 1 {
        for q in 0..n - 1 {
            let diff = linalg::block(m, p, q, d, d) - linalg::block(m, p + 1, q + 1, d, d);
            dev = dev.max(linalg::max_abs(&diff));
        }
    }
    dev
}

/// Number of `z` samples in the final pointwise pass.
fn z_samples(j: usize, k: usize) -> usize {
    (4 * (j + k + 1)).next_power_of_two().max(64)
}

/// Extends `γ` to `(i, j)` with `min(i, j) < 0`, `|i|, |j| ≤ J`.
///
/// Requires the commutation residual to be at most `tol` and the Claim's
/// zeros and the Hankel form of the extended `Γ_j` to hold at `100·tol`;
/// the result must satisfy `‖Σ γ_{ij} z^i w^j‖_∞ < 1` on the certificate grid.
pub fn solve_nehari_2d(g: &LittleHankelData, j_max: usize, tol: f64) -> Result<NehariSolution2D> {
    let sol = nehari_2d_unchecked(g, j_max)?;
    if sol.comm_residual > tol {
        return Err(Error::CommViolation {
            residual: sol.comm_residual,
        });
    }
    for (what, magnitude) in [
        ("last row of D_j", sol.claim_d_deviation),
        ("first row of A_j", sol.claim_a_deviation),
        ("Hankel form of extended Γ_j", sol.hankel_deviation),
    ] {
        if magnitude > 100.0 * tol {
            return Err(Error::StructureViolation {
                what: what.into(),
                magnitude,
            });
        }
    }
    if sol.sup_norm >= 1.0 {
        return Err(Error::NormAtLeastOne { norm: sol.sup_norm });
    }
    Ok(sol)
}

/// The construction behind [`solve_nehari_2d`] with every diagnostic
/// recorded but only the strict-contraction precondition enforced.
///
/// The outer 1D problem yields `Γ_j`, `j < 0`, and `γ_{j,s}`, `s ≥ 0`, is
/// read off their last column. The remaining half-plane (second index
/// negative) is a 1D problem whose coefficients are Toeplitz in the first
/// index, so it is solved pointwise in `z` and transformed back.
pub fn nehari_2d_unchecked(g: &LittleHankelData, j_max: usize) -> Result<NehariSolution2D> {
    let d = g.d;
    let n = g.n;
    let outer_data = g.outer();
    let section_norm = outer_data.section_norm();
    if section_norm >= 1.0 {
        return Err(Error::NormAtLeastOne { norm: section_norm });
    }
    let comm_residual = check_comm_2d(&build_compressions(g))?;

    let outer = solve_nehari_1d(&outer_data, j_max)?;
    let claim_d_deviation = outer
        .d
        .iter()
        .flat_map(|dk| (0..n - 1).map(move |c| linalg::max_abs(&linalg::block(dk, n - 1, c, d, d))))
        .fold(0.0, f64::max);
    let claim_a_deviation = outer
        .a
        .iter()
        .flat_map(|ak| (1..n).map(move |c| linalg::max_abs(&linalg::block(ak, 0, c, d, d))))
        .fold(0.0, f64::max);
    let hankel_deviation = outer.extension.iter().map(|gj| hankel_deviation(gj, d)).fold(0.0, f64::max);

    let j = j_max as i64;
    let k = g.k as i64;
    let mut gammas: BTreeMap<Pair, CMat> = BTreeMap::new();
    for i in 0..=k {
        for s in 0..=k {
            gammas.insert((i, s), g.gamma(i, s));
        }
    }
    // γ_{i,s}, i < 0, s ≥ 0, from the last column of Γ_i
    for (idx, gi) in outer.extension.iter().enumerate() {
        for s in 0..n {
            gammas.insert((-(idx as i64) - 1, s as i64), linalg::block(gi, s, n - 1, d, d));
        }
    }

    // second index negative: pointwise in z
    let zn = z_samples(j_max, g.k);
    let w_top = k.max(n as i64 - 1);
    let mut samples: Vec<Vec<CMat>> = Vec::with_capacity(zn);
    for t in 0..zn {
        let z = unit_root(t, zn);
        let mut hs = vec![linalg::zeros(d, d); w_top as usize + 1];
        for (&(i, s), v) in &gammas {
            hs[s as usize] += v * z.powi(i as i32);
        }
        samples.push(solve_nehari_1d(&HankelData1D { gammas: hs, n }, j_max)?.extension);
    }
    for jj in 0..j_max {
        let mut buf = vec![C64::new(0.0, 0.0); zn];
        let mut coeffs = vec![linalg::zeros(d, d); 2 * j_max + 1];
        for a in 0..d {
            for b in 0..d {
                for (slot, s) in buf.iter_mut().zip(&samples) {
                    *slot = s[jj][(a, b)];
                }
                fourier::coefficients_1d(&mut buf);
                for (idx, c) in coeffs.iter_mut().enumerate() {
                    c[(a, b)] = buf[fourier::wrap(idx as i64 - j, zn)];
                }
            }
        }
        for (idx, c) in coeffs.into_iter().enumerate() {
            gammas.insert((idx as i64 - j, -(jj as i64) - 1), c);
        }
    }
    gammas.retain(|key, _| key.0.min(key.1) >= 0 || (key.0.abs() <= j && key.1.abs() <= j));

    let field = TorusField::sample(CERTIFICATE_GRID, |z, w| {
        let mut acc = linalg::zeros(d, d);
        for (&(i, s), v) in &gammas {
            acc += v * (z.powi(i as i32) * w.powi(s as i32));
        }
        acc
    });
    Ok(NehariSolution2D {
        d,
        j: j_max,
        comm_residual,
        section_norm,
        claim_d_deviation,
        claim_a_deviation,
        hankel_deviation,
        gammas,
        sup_norm: field.max_norm(),
        outer,
    })
}
