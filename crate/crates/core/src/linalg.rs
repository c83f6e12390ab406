//! Dense complex matrix helpers shared by the solvers.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Relative tolerance used when a symmetric input should be Hermitian up to rounding.
pub const HERMITIAN_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Square complex matrix from row-major real entries.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> CMat {
    assert_eq!(data.len(), rows * cols);
    CMat::from_fn(rows, cols, |i, j| real(data[i * cols + j]))
}

pub fn scalar(x: f64) -> CMat {
    CMat::from_element(1, 1, real(x))
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise deviation of `m` from its conjugate transpose.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Average of `m` and its conjugate transpose.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |a, &s| a.max(s))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

pub fn min_hermitian_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(f64::INFINITY)
}

/// Reverses the order of rows and columns.
pub fn flip(m: &CMat) -> CMat {
    let (r, c) = m.shape();
    CMat::from_fn(r, c, |i, j| m[(r - 1 - i, c - 1 - j)])
}

/// Lower Cholesky factor `L` with `m = L L*` and a positive real diagonal.
pub fn cholesky_lower(m: &CMat, what: &str) -> Result<CMat> {
    Cholesky::new(hermitian_part(m))
        .map(|ch| ch.unpack())
        .ok_or_else(|| Error::NotPd {
            what: what.to_string(),
            min_eig: min_hermitian_eigenvalue(m),
        })
}

/// Upper Cholesky factor `U` with `m = U U*` and a positive real diagonal.
pub fn cholesky_upper(m: &CMat, what: &str) -> Result<CMat> {
    cholesky_lower(&flip(m), what).map(|l| flip(&l))
}

/// Solves `a x = b` for Hermitian positive definite `a`.
pub fn solve_hpd(a: &CMat, b: &CMat, what: &str) -> Result<CMat> {
    let ch: Cholesky<C64, Dyn> =
        Cholesky::new(hermitian_part(a)).ok_or_else(|| Error::NotPd {
            what: what.to_string(),
            min_eig: min_hermitian_eigenvalue(a),
        })?;
    Ok(ch.solve(b))
}

/// General square solve via LU.
pub fn solve_general(a: &CMat, b: &CMat) -> Option<CMat> {
    a.clone().lu().solve(b)
}

/// `p · t^{-*}` for a lower or upper triangular invertible `t`.
pub fn mul_inv_adjoint(p: &CMat, t: &CMat, lower: bool) -> CMat {
    // p t^{-*} = x  <=>  t x* = p*
    let rhs = p.adjoint();
    let xs = if lower {
        t.solve_lower_triangular(&rhs)
    } else {
        t.solve_upper_triangular(&rhs)
    }
    .expect("triangular factor with positive diagonal is invertible");
    xs.adjoint()
}

/// `p · t^{-*}` for any invertible `t`.
pub fn mul_inv_adjoint_general(p: &CMat, t: &CMat) -> Option<CMat> {
    solve_general(t, &p.adjoint()).map(|x| x.adjoint())
}

/// Block lower triangular `L` with Hermitian positive definite `block × block`
/// diagonal blocks and `m = L L*`.
pub fn block_cholesky_lower(m: &CMat, block: usize, what: &str) -> Result<CMat> {
    let mut l = cholesky_lower(m, what)?;
    let count = m.nrows() / block;
    let mut rot = zeros(m.nrows(), m.ncols());
    for k in 0..count {
        let lk = self::block(&l, k, k, block, block);
        let h = hpd_sqrt(&(&lk * lk.adjoint()));
        let v = h.try_inverse().expect("Cholesky diagonal block is invertible") * &lk;
        set_block(&mut rot, k, k, &v.adjoint());
    }
    l *= rot;
    // clean the strictly upper block triangle and symmetrize diagonal blocks
    for bi in 0..count {
        for bj in bi + 1..count {
            set_block(&mut l, bi, bj, &zeros(block, block));
        }
        let dk = hermitian_part(&self::block(&l, bi, bi, block, block));
        set_block(&mut l, bi, bi, &dk);
    }
    Ok(l)
}

/// Block upper triangular `U` with Hermitian positive definite diagonal
/// blocks and `m = U U*`.
pub fn block_cholesky_upper(m: &CMat, block: usize, what: &str) -> Result<CMat> {
    block_cholesky_lower(&flip(m), block, what).map(|l| flip(&l))
}

/// Extracts the `(bi, bj)` block of size `br × bc`.
pub fn block(m: &CMat, bi: usize, bj: usize, br: usize, bc: usize) -> CMat {
    m.view((bi * br, bj * bc), (br, bc)).into_owned()
}

pub fn set_block(m: &mut CMat, bi: usize, bj: usize, b: &CMat) {
    let (br, bc) = b.shape();
    m.view_mut((bi * br, bj * bc), (br, bc)).copy_from(b);
}

/// Stacks equally sized blocks vertically.
pub fn vstack(blocks: &[CMat]) -> CMat {
    let (br, bc) = blocks[0].shape();
    let mut out = zeros(br * blocks.len(), bc);
    for (i, b) in blocks.iter().enumerate() {
        out.view_mut((i * br, 0), (br, bc)).copy_from(b);
    }
    out
}

/// Splits a tall matrix into `count` equal vertical blocks.
pub fn vsplit(m: &CMat, count: usize) -> Vec<CMat> {
    let br = m.nrows() / count;
    (0..count)
        .map(|i| m.view((i * br, 0), (br, m.ncols())).into_owned())
        .collect()
}

/// Positive definite square root of a Hermitian positive definite matrix.
pub fn hpd_sqrt(m: &CMat) -> CMat {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let d = eig.eigenvalues.map(|v| real(v.max(0.0).sqrt()));
    let u = &eig.eigenvectors;
    u * CMat::from_diagonal(&d) * u.adjoint()
}

/// Relative Frobenius distance `‖a − b‖ / max(‖a‖, ‖b‖, tiny)`.
pub fn relative_frobenius(a: &CMat, b: &CMat) -> f64 {
    let scale = a.norm().max(b.norm()).max(f64::MIN_POSITIVE);
    (a - b).norm() / scale
}
