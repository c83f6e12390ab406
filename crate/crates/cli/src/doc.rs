//! On-disk document formats. Complex matrices are stored as separate
//! real and imaginary row arrays.

use std::collections::BTreeMap;

use bidisk_ar::covariance::CorrelationGrid;
use bidisk_ar::linalg::{CMat, C64};
use bidisk_ar::poly::MatrixPolynomial2D;
use serde::{Deserialize, Serialize};

use crate::Failure;

pub type Rows = Vec<Vec<f64>>;
pub type PairMap = BTreeMap<(i64, i64), CMat>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub i: i64,
    pub j: i64,
    pub re: Rows,
    pub im: Rows,
}

/// Correlation band `c_{ij}`, `(i, j) ∈ Λ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub d: usize,
    pub n: i64,
    pub m: i64,
    pub entries: Vec<Entry>,
}

/// Output of `design`; `extend` and `spectrum` accept it in place of a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignDoc {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub p: Vec<Entry>,
    pub r: Vec<Entry>,
    #[serde(default, skip_deserializing)]
    pub report: Option<serde_json::Value>,
}

/// Covariance values over a rectangle of indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableDoc {
    pub d: usize,
    pub z_range: [i64; 2],
    pub w_range: [i64; 2],
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexedBlock {
    pub k: usize,
    pub re: Rows,
    pub im: Rows,
}

/// `Γ_0 … Γ_K` for the one-variable Nehari problem; absent `k` are zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hankel1Doc {
    pub rows: usize,
    pub cols: usize,
    pub gammas: Vec<IndexedBlock>,
}

/// `γ_{ij}`, `i, j ≥ 0`, for the two-variable problem; absent pairs are zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hankel2Doc {
    pub d: usize,
    pub gammas: Vec<Entry>,
}

pub fn to_rows(m: &CMat) -> (Rows, Rows) {
    let part = |f: fn(&C64) -> f64| (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect();
    (part(|z| z.re), part(|z| z.im))
}

pub fn entry(i: i64, j: i64, m: &CMat) -> Entry {
    let (re, im) = to_rows(m);
    Entry { i, j, re, im }
}

/// Builds a `rows × cols` matrix, naming `what` on a shape mismatch.
pub fn from_rows(re: &Rows, im: &Rows, rows: usize, cols: usize, what: &str) -> Result<CMat, Failure> {
    let ok = |a: &Rows| a.len() == rows && a.iter().all(|r| r.len() == cols);
    if !ok(re) || !ok(im) {
        return Err(Failure::input(format!("{what}: re and im must both be {rows}×{cols} arrays")));
    }
    Ok(CMat::from_fn(rows, cols, |r, c| C64::new(re[r][c], im[r][c])))
}

fn collect_pairs(entries: &[Entry], d: usize) -> Result<PairMap, Failure> {
    let mut out = BTreeMap::new();
    for e in entries {
        let m = from_rows(&e.re, &e.im, d, d, &format!("entry ({}, {})", e.i, e.j))?;
        if out.insert((e.i, e.j), m).is_some() {
            return Err(Failure::input(format!("entry ({}, {}) appears twice", e.i, e.j)));
        }
    }
    Ok(out)
}

impl GridDoc {
    pub fn to_grid(&self) -> Result<CorrelationGrid, Failure> {
        if self.d == 0 || self.n < 1 || self.m < 1 {
            return Err(Failure::input("d, n and m must all be at least 1".into()));
        }
        let mut grid = CorrelationGrid::new(self.d, self.n, self.m);
        for (k, v) in collect_pairs(&self.entries, self.d)? {
            if !grid.in_band(k) && !grid.is_free_corner(k) {
                return Err(Failure::input(format!("entry ({}, {}) lies outside the band", k.0, k.1)));
            }
            grid.entries.insert(k, v);
        }
        Ok(grid)
    }
}

pub fn poly_entries(p: &MatrixPolynomial2D) -> Vec<Entry> {
    let mut out = Vec::new();
    for i in 0..=p.n {
        for j in 0..=p.m {
            out.push(entry(i as i64, j as i64, p.get(i, j)));
        }
    }
    out
}

impl DesignDoc {
    fn poly(&self, entries: &[Entry], what: &str) -> Result<MatrixPolynomial2D, Failure> {
        let pairs = collect_pairs(entries, self.d)?;
        let mut p = MatrixPolynomial2D::zeros(self.d, self.n, self.m);
        for ((i, j), v) in pairs {
            if !(0..=self.n as i64).contains(&i) || !(0..=self.m as i64).contains(&j) {
                return Err(Failure::input(format!("{what} coefficient ({i}, {j}) exceeds the degree")));
            }
            *p.get_mut(i as usize, j as usize) = v;
        }
        Ok(p)
    }

    pub fn p(&self) -> Result<MatrixPolynomial2D, Failure> {
        self.poly(&self.p, "p")
    }
}

impl Hankel1Doc {
    pub fn blocks(&self) -> Result<Vec<CMat>, Failure> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Failure::input("rows and cols must be positive".into()));
        }
        let len = self.gammas.iter().map(|g| g.k + 1).max().unwrap_or(1);
        let mut out: Vec<Option<CMat>> = vec![None; len];
        for g in &self.gammas {
            let m = from_rows(&g.re, &g.im, self.rows, self.cols, &format!("Γ_{}", g.k))?;
            if out[g.k].replace(m).is_some() {
                return Err(Failure::input(format!("Γ_{} appears twice", g.k)));
            }
        }
        Ok(out
            .into_iter()
            .map(|g| g.unwrap_or_else(|| CMat::zeros(self.rows, self.cols)))
            .collect())
    }
}

impl Hankel2Doc {
    /// Dense `γ` over `0..=K` squared, `K` the largest index present.
    pub fn square(&self) -> Result<(usize, PairMap), Failure> {
        if self.d == 0 {
            return Err(Failure::input("d must be positive".into()));
        }
        let pairs = collect_pairs(&self.gammas, self.d)?;
        if let Some(&(i, j)) = pairs.keys().find(|k| k.0 < 0 || k.1 < 0) {
            return Err(Failure::input(format!("γ({i}, {j}) has a negative index")));
        }
        let k = pairs.keys().map(|&(i, j)| i.max(j)).max().unwrap_or(0) as usize;
        Ok((k, pairs))
    }
}
