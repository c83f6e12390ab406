//! Three-by-three positive definite completion and the two corner
//! coefficients `c_{-n,m}` and `c_{n,m}` forced by the band data.

use crate::covariance::{
    build_doubly_toeplitz, is_positive_definite, Coefficients, CorrelationGrid, CovarianceTable, IndexRect,
    IndexSet, DEFAULT_PD_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Partially specified matrix `M(X) = [[A, B, X], [B*, C, D], [X*, D*, E]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Corner3x3 {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
    pub d: CMat,
    pub e: CMat,
}

impl Corner3x3 {
    fn sizes(&self) -> (usize, usize, usize) {
        (self.a.nrows(), self.c.nrows(), self.e.nrows())
    }

    fn check_shapes(&self) -> Result<()> {
        let (p, q, r) = self.sizes();
        let ok = self.a.shape() == (p, p)
            && self.b.shape() == (p, q)
            && self.c.shape() == (q, q)
            && self.d.shape() == (q, r)
            && self.e.shape() == (r, r);
        if ok {
            Ok(())
        } else {
            Err(Error::Dimension("incompatible 3x3 corner blocks".into()))
        }
    }

    /// The full matrix `M(X)`.
    pub fn assemble(&self, x: &CMat) -> CMat {
        let (p, q, r) = self.sizes();
        let mut m = linalg::zeros(p + q + r, p + q + r);
        let mut put = |i0: usize, j0: usize, b: &CMat| m.view_mut((i0, j0), b.shape()).copy_from(b);
        put(0, 0, &self.a);
        put(0, p, &self.b);
        put(0, p + q, x);
        put(p, 0, &self.b.adjoint());
        put(p, p, &self.c);
        put(p, p + q, &self.d);
        put(p + q, 0, &x.adjoint());
        put(p + q, p, &self.d.adjoint());
        put(p + q, p + q, &self.e);
        m
    }

    /// The `(1,3)` block of `M(X)^{-1}`.
    pub fn inverse_corner(&self, x: &CMat) -> Option<CMat> {
        let (p, q, r) = self.sizes();
        let inv = self.assemble(x).try_inverse()?;
        Some(inv.view((0, p + q), (p, r)).into_owned())
    }

    fn upper_left(&self) -> CMat {
        let (p, q, _) = self.sizes();
        let mut m = linalg::zeros(p + q, p + q);
        m.view_mut((0, 0), (p, p)).copy_from(&self.a);
        m.view_mut((0, p), (p, q)).copy_from(&self.b);
        m.view_mut((p, 0), (q, p)).copy_from(&self.b.adjoint());
        m.view_mut((p, p), (q, q)).copy_from(&self.c);
        m
    }

    fn lower_right(&self) -> CMat {
        let (_, q, r) = self.sizes();
        let mut m = linalg::zeros(q + r, q + r);
        m.view_mut((0, 0), (q, q)).copy_from(&self.c);
        m.view_mut((0, q), (q, r)).copy_from(&self.d);
        m.view_mut((q, 0), (r, q)).copy_from(&self.d.adjoint());
        m.view_mut((q, q), (r, r)).copy_from(&self.e);
        m
    }
}

fn require_pd(m: &CMat, what: &str, tol: f64) -> Result<()> {
    let (pd, min_eig) = is_positive_definite(m, tol)?;
    if pd {
        Ok(())
    } else {
        Err(Error::NotPd {
            what: what.into(),
            min_eig,
        })
    }
}

/// Central completion `X₀ = B C⁻¹ D`, the unique `X` making the `(1,3)`
/// block of `M(X)^{-1}` vanish.
pub fn complete_center(corner: &Corner3x3) -> Result<CMat> {
    corner.check_shapes()?;
    require_pd(&corner.upper_left(), "[[A, B], [B*, C]]", DEFAULT_PD_TOL)?;
    require_pd(&corner.lower_right(), "[[C, D], [D*, E]]", DEFAULT_PD_TOL)?;
    let c_inv_d = linalg::solve_hpd(&corner.c, &corner.d, "C")?;
    Ok(&corner.b * c_inv_d)
}

fn lower_rect(n: i64, m: i64) -> IndexRect {
    IndexRect::new(0..=n - 1, 0..=m - 1)
}

/// `c_{-n,m}` from the band data: the `((0,m-1), (n-1,0))` entry of
/// `Φ₁ Φ⁻¹ Φ₂*`, where `Φ = (c_{k-l})` over `{0..n-1}×{0..m-1}`.
pub fn corner_c_minus_nm(grid: &CorrelationGrid) -> Result<CMat> {
    let (n, m) = (grid.n, grid.m);
    let rect = lower_rect(n, m);
    let phi = build_doubly_toeplitz(grid, rect, rect)?;
    require_pd(&phi.data, "Φ", DEFAULT_PD_TOL)?;

    let d = grid.d;
    let count = rect.len();
    let mut row = linalg::zeros(d, d * count);
    let mut col = linalg::zeros(d * count, d);
    for (pos, l) in rect.iter().enumerate() {
        // row (0, m-1) of Φ₁, columns l + (1, 0)
        let rk = (-(l.0 + 1), m - 1 - l.1);
        let rv = grid.coeff(rk).ok_or(Error::MissingIndex(rk.0, rk.1))?;
        linalg::set_block(&mut row, 0, pos, rv);
        // column (n-1, 0) of Φ₂*, rows l + (0, 1)
        let ck = (l.0 - (n - 1), l.1 + 1);
        let cv = grid.coeff(ck).ok_or(Error::MissingIndex(ck.0, ck.1))?;
        linalg::set_block(&mut col, pos, 0, cv);
    }
    let x = linalg::solve_hpd(&phi.data, &col, "Φ")?;
    Ok(row * x)
}

fn punctured(n: i64, m: i64) -> IndexSet {
    IndexRect::quarter(n, m).without(&[(0, 0), (n, m)])
}

/// The unique `c_{n,m}` that makes the designed `p_{n,m}` vanish. `src` must
/// already carry `c_{±(n,-m)}` (see [`corner_c_minus_nm`]).
pub fn corner_c_nm<C: Coefficients>(src: &C, n: i64, m: i64) -> Result<CMat> {
    let mid_set = punctured(n, m);
    let d = src.block_dim();
    let mid = build_doubly_toeplitz(src, mid_set.clone(), mid_set.clone())?;
    let row = build_doubly_toeplitz(src, IndexSet(vec![(n, m)]), mid_set.clone())?;
    let col = build_doubly_toeplitz(src, mid_set, IndexSet(vec![(0, 0)]))?;
    debug_assert_eq!(row.data.nrows(), d);
    let x = linalg::solve_hpd(&mid.data, &col.data, "punctured doubly Toeplitz matrix")?;
    Ok(row.data * x)
}

/// The natural `{(0,0)} | middle | {(n,m)}` partition of the quarter rect as a
/// [`Corner3x3`], with the unknown `X = c_{-n,-m}`.
pub fn quarter_corner_partition<C: Coefficients>(src: &C, n: i64, m: i64) -> Result<Corner3x3> {
    let mid_set = punctured(n, m);
    let first = IndexSet(vec![(0, 0)]);
    let last = IndexSet(vec![(n, m)]);
    Ok(Corner3x3 {
        a: build_doubly_toeplitz(src, first.clone(), first.clone())?.data,
        b: build_doubly_toeplitz(src, first, mid_set.clone())?.data,
        c: build_doubly_toeplitz(src, mid_set.clone(), mid_set.clone())?.data,
        d: build_doubly_toeplitz(src, mid_set, last.clone())?.data,
        e: build_doubly_toeplitz(src, last.clone(), last)?.data,
    })
}

/// Installs both corner pairs: `c_{-n,m}` from the forced formula, then
/// `c_{n,m}`, either as supplied with the grid or as the unique value with
/// `p_{n,m} = 0`.
pub fn install_corners(grid: &CorrelationGrid) -> Result<CovarianceTable> {
    let (n, m) = (grid.n, grid.m);
    let cmn = corner_c_minus_nm(grid)?;
    let mut table = grid.with_corner((-n, m), cmn);
    if grid.free_corner().is_none() {
        let cnm = corner_c_nm(&table, n, m)?;
        table.insert_pair((n, m), cnm);
    }
    Ok(table)
}
