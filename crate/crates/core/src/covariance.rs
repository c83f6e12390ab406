//! Correlation grids on the two-variable band and the doubly Toeplitz
//! matrices assembled from them.
//!
//! Pair indices `(i, j)` always refer to the powers `z^i w^j`. Matrices whose
//! rows and columns are indexed by pairs use lexicographic order with the
//! first (`z`) coordinate major, so a rectangle `{0..n}×{0..m}` produces a
//! block Toeplitz matrix whose blocks are themselves Toeplitz.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

pub type Pair = (i64, i64);

/// Default relative threshold for positive definiteness decisions.
pub const DEFAULT_PD_TOL: f64 = 1e-10;

fn sub(a: Pair, b: Pair) -> Pair {
    (a.0 - b.0, a.1 - b.1)
}

/// Rectangle `(z_lo..=z_hi) × (w_lo..=w_hi)` of integer pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexRect {
    pub z_lo: i64,
    pub z_hi: i64,
    pub w_lo: i64,
    pub w_hi: i64,
}

impl IndexRect {
    pub fn new(z: std::ops::RangeInclusive<i64>, w: std::ops::RangeInclusive<i64>) -> Self {
        IndexRect {
            z_lo: *z.start(),
            z_hi: *z.end(),
            w_lo: *w.start(),
            w_hi: *w.end(),
        }
    }

    /// `{0..n} × {0..m}`.
    pub fn quarter(n: i64, m: i64) -> Self {
        Self::new(0..=n, 0..=m)
    }

    /// `{-n..n} × {-m..m}`.
    pub fn centered(n: i64, m: i64) -> Self {
        Self::new(-n..=n, -m..=m)
    }

    fn width(&self) -> i64 {
        (self.w_hi - self.w_lo + 1).max(0)
    }

    pub fn len(&self) -> usize {
        ((self.z_hi - self.z_lo + 1).max(0) * self.width()) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, k: Pair) -> bool {
        (self.z_lo..=self.z_hi).contains(&k.0) && (self.w_lo..=self.w_hi).contains(&k.1)
    }

    /// Lexicographic position, `z` major.
    pub fn position(&self, k: Pair) -> Option<usize> {
        self.contains(k)
            .then(|| ((k.0 - self.z_lo) * self.width() + (k.1 - self.w_lo)) as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = Pair> + '_ {
        (self.z_lo..=self.z_hi).flat_map(move |i| (self.w_lo..=self.w_hi).map(move |j| (i, j)))
    }

    pub fn to_set(&self) -> IndexSet {
        IndexSet(self.iter().collect())
    }

    /// The rectangle with the given pairs removed, order otherwise kept.
    pub fn without(&self, removed: &[Pair]) -> IndexSet {
        self.to_set().without(removed)
    }
}

/// Ordered finite list of distinct pairs; used for punctured rectangles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet(pub Vec<Pair>);

impl IndexSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, k: Pair) -> Option<usize> {
        self.0.iter().position(|&p| p == k)
    }

    pub fn without(&self, removed: &[Pair]) -> IndexSet {
        IndexSet(self.0.iter().copied().filter(|p| !removed.contains(p)).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = Pair> + '_ {
        self.0.iter().copied()
    }
}

impl From<IndexRect> for IndexSet {
    fn from(r: IndexRect) -> Self {
        r.to_set()
    }
}

/// Anything that can answer "what is `c_k`?" for pair indices.
pub trait Coefficients {
    /// Size `d` of each coefficient block.
    fn block_dim(&self) -> usize;
    fn coeff(&self, k: Pair) -> Option<&CMat>;
}

/// Correlation data `c_{ij}`, `(i, j) ∈ Λ`, where `Λ` is the band
/// `{-n..n} × {-m..m}` without its four corners.
///
/// The pair `c_{±(n,m)}` may optionally be supplied as well; it is the one
/// corner the band leaves free (`c_{±(n,-m)}` is forced by the band data).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationGrid {
    pub d: usize,
    pub n: i64,
    pub m: i64,
    pub entries: BTreeMap<Pair, CMat>,
}

impl CorrelationGrid {
    pub fn new(d: usize, n: i64, m: i64) -> Self {
        CorrelationGrid {
            d,
            n,
            m,
            entries: BTreeMap::new(),
        }
    }

    /// Fills every index of `Λ` from `f`.
    pub fn from_fn(d: usize, n: i64, m: i64, mut f: impl FnMut(Pair) -> CMat) -> Self {
        let mut grid = Self::new(d, n, m);
        for k in IndexRect::centered(n, m).iter() {
            if grid.in_band(k) {
                grid.entries.insert(k, f(k));
            }
        }
        grid
    }

    /// Restricts an arbitrary coefficient source to `Λ`.
    pub fn restrict<C: Coefficients>(src: &C, n: i64, m: i64) -> Result<Self> {
        let mut grid = Self::new(src.block_dim(), n, m);
        for k in IndexRect::centered(n, m).iter() {
            if grid.in_band(k) {
                let v = src.coeff(k).ok_or(Error::MissingIndex(k.0, k.1))?;
                grid.entries.insert(k, v.clone());
            }
        }
        Ok(grid)
    }

    pub fn is_corner(&self, k: Pair) -> bool {
        k.0.abs() == self.n && k.1.abs() == self.m
    }

    pub fn in_band(&self, k: Pair) -> bool {
        k.0.abs() <= self.n && k.1.abs() <= self.m && !self.is_corner(k)
    }

    /// `(n, m)` or `(-n, -m)`.
    pub fn is_free_corner(&self, k: Pair) -> bool {
        k == (self.n, self.m) || k == (-self.n, -self.m)
    }

    /// The supplied `c_{n,m}`, if any.
    pub fn free_corner(&self) -> Option<&CMat> {
        self.entries.get(&(self.n, self.m))
    }

    /// Copy without the optional `c_{±(n,m)}` pair.
    pub fn band_only(&self) -> CorrelationGrid {
        let mut g = self.clone();
        g.entries.remove(&(self.n, self.m));
        g.entries.remove(&(-self.n, -self.m));
        g
    }

    /// Sets `c_k` and its mirror `c_{-k} = c_k*`.
    pub fn insert_pair(&mut self, k: Pair, value: CMat) {
        self.entries.insert((-k.0, -k.1), value.adjoint());
        self.entries.insert(k, value);
    }

    /// Copy with the corner pair `c_k`, `c_{-k}` installed; the result is a
    /// [`CovarianceTable`] because corners lie outside `Λ`.
    pub fn with_corner(&self, k: Pair, value: CMat) -> CovarianceTable {
        let mut t = CovarianceTable::from(self);
        t.insert_pair(k, value);
        t
    }
}

impl Coefficients for CorrelationGrid {
    fn block_dim(&self) -> usize {
        self.d
    }

    fn coeff(&self, k: Pair) -> Option<&CMat> {
        self.entries.get(&k)
    }
}

/// Coefficients on an arbitrary finite support (installed corners, extensions).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceTable {
    pub d: usize,
    pub entries: BTreeMap<Pair, CMat>,
}

impl CovarianceTable {
    pub fn new(d: usize) -> Self {
        CovarianceTable {
            d,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert_pair(&mut self, k: Pair, value: CMat) {
        self.entries.insert((-k.0, -k.1), value.adjoint());
        self.entries.insert(k, value);
    }
}

impl From<&CorrelationGrid> for CovarianceTable {
    fn from(g: &CorrelationGrid) -> Self {
        CovarianceTable {
            d: g.d,
            entries: g.entries.clone(),
        }
    }
}

impl Coefficients for CovarianceTable {
    fn block_dim(&self) -> usize {
        self.d
    }

    fn coeff(&self, k: Pair) -> Option<&CMat> {
        self.entries.get(&k)
    }
}

/// Outcome of [`validate_grid`]; never an error by itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Largest entrywise `|c_{-k} - c_k*|`.
    pub symmetry_deviation: f64,
    /// Index attaining `symmetry_deviation` (the one with nonnegative leading coordinate).
    pub worst_symmetry_index: Option<Pair>,
    pub missing: Vec<Pair>,
    pub extra: Vec<Pair>,
    /// Entries whose shape is not `d × d`.
    pub bad_shape: Vec<Pair>,
    /// Smallest eigenvalue of the Hermitian part of `c_00` (NaN if absent).
    pub c00_min_eig: f64,
    pub c00_pd: bool,
    pub tol: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.symmetry_deviation <= self.tol
            && self.missing.is_empty()
            && self.extra.is_empty()
            && self.bad_shape.is_empty()
            && self.c00_pd
    }
}

pub fn validate_grid(grid: &CorrelationGrid, tol: f64) -> ValidationReport {
    let d = grid.d;
    let mut missing = Vec::new();
    let mut bad_shape = Vec::new();
    for k in IndexRect::centered(grid.n, grid.m).iter() {
        if !grid.in_band(k) {
            continue;
        }
        match grid.entries.get(&k) {
            None => missing.push(k),
            Some(v) if v.shape() != (d, d) => bad_shape.push(k),
            Some(_) => {}
        }
    }
    let extra: Vec<Pair> = grid
        .entries
        .keys()
        .copied()
        .filter(|&k| !grid.in_band(k) && !grid.is_free_corner(k))
        .collect();
    let (nm, mirror) = ((grid.n, grid.m), (-grid.n, -grid.m));
    match (grid.entries.get(&nm), grid.entries.get(&mirror)) {
        (Some(_), None) => missing.push(mirror),
        (None, Some(_)) => missing.push(nm),
        (Some(v), _) if v.shape() != (d, d) => bad_shape.push(nm),
        (_, Some(v)) if v.shape() != (d, d) => bad_shape.push(mirror),
        _ => {}
    }

    let mut symmetry_deviation: f64 = 0.0;
    let mut worst_symmetry_index = None;
    for (&k, v) in &grid.entries {
        if k < (0, 0) || v.shape() != (d, d) {
            continue;
        }
        if let Some(mirror) = grid.entries.get(&(-k.0, -k.1)) {
            if mirror.shape() != (d, d) {
                continue;
            }
            let dev = linalg::max_abs(&(mirror - v.adjoint()));
            if dev > symmetry_deviation {
                symmetry_deviation = dev;
                worst_symmetry_index = Some(k);
            }
        }
    }

    let (c00_min_eig, c00_pd) = match grid.entries.get(&(0, 0)) {
        Some(c00) if c00.shape() == (d, d) => {
            let herm = linalg::hermitian_deviation(c00) <= tol * linalg::spectral_norm(c00).max(1.0);
            let min_eig = linalg::min_hermitian_eigenvalue(c00);
            let pd = herm && min_eig > tol * linalg::spectral_norm(c00);
            (min_eig, pd)
        }
        _ => (f64::NAN, false),
    };

    ValidationReport {
        symmetry_deviation,
        worst_symmetry_index,
        missing,
        extra,
        bad_shape,
        c00_min_eig,
        c00_pd,
        tol,
    }
}

/// Dense matrix with rows and columns indexed by pairs; block `(k, l)` is the
/// `d × d` slab at `(pos(k)·d, pos(l)·d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    pub rows: IndexSet,
    pub cols: IndexSet,
    pub d: usize,
    pub data: CMat,
}

impl BlockMatrix {
    pub fn block(&self, k: Pair, l: Pair) -> Option<CMat> {
        let (pk, pl) = (self.rows.position(k)?, self.cols.position(l)?);
        Some(linalg::block(&self.data, pk, pl, self.d, self.d))
    }
}

/// Assembles `(c_{k-l})_{k ∈ rows, l ∈ cols}`.
pub fn build_doubly_toeplitz<C: Coefficients>(
    src: &C,
    rows: impl Into<IndexSet>,
    cols: impl Into<IndexSet>,
) -> Result<BlockMatrix> {
    let (rows, cols) = (rows.into(), cols.into());
    let d = src.block_dim();
    let mut data = linalg::zeros(d * rows.len(), d * cols.len());
    for (pk, k) in rows.iter().enumerate() {
        for (pl, l) in cols.iter().enumerate() {
            let diff = sub(k, l);
            let v = src.coeff(diff).ok_or(Error::MissingIndex(diff.0, diff.1))?;
            linalg::set_block(&mut data, pk, pl, v);
        }
    }
    Ok(BlockMatrix { rows, cols, d, data })
}

/// Returns `(is_pd, smallest eigenvalue)`; positive definite means the
/// smallest eigenvalue exceeds `tol·‖m‖₂`.
pub fn is_positive_definite(m: &CMat, tol: f64) -> Result<(bool, f64)> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let eigs = linalg::hermitian_eigenvalues(m);
    let norm = eigs.iter().fold(0.0_f64, |a, &e| a.max(e.abs()));
    let dev = linalg::hermitian_deviation(m);
    if dev > tol * norm.max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let min_eig = eigs.first().copied().unwrap_or(f64::INFINITY);
    Ok((min_eig > tol * norm, min_eig))
}
