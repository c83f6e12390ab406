mod common;

use bidisk_ar::ar1d::{extend_covariance_1d, solve_yule_walker_left, BlockToeplitz1D};
use bidisk_ar::completion::{complete_center, corner_c_minus_nm, corner_c_nm, Corner3x3};
use bidisk_ar::covariance::{
    build_doubly_toeplitz, is_positive_definite, validate_grid, CorrelationGrid, IndexRect, DEFAULT_PD_TOL,
};
use bidisk_ar::linalg::{self, CMat, C64};
use bidisk_ar::nehari::{nehari_2d_unchecked, LittleHankelData};
use bidisk_ar::poly::MatrixPolynomial;
use bidisk_ar::spectral_factor::{left_stable_factor, FactorOptions, TrigMatrixPolynomial};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize, scale: f64) -> CMat {
    DMatrix::from_fn(r, c, |_, _| {
        C64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
    })
}

fn random_pd(rng: &mut ChaCha8Rng, size: usize) -> CMat {
    let b = random_matrix(rng, size, size, 1.0);
    &b * b.adjoint() + linalg::identity(size).scale(0.1)
}

/// Hermitian symmetric band with arbitrary (not necessarily PD) entries.
fn random_band(rng: &mut ChaCha8Rng, d: usize, n: i64, m: i64) -> CorrelationGrid {
    let mut g = CorrelationGrid::new(d, n, m);
    for k in IndexRect::centered(n, m).iter() {
        if g.in_band(k) && k >= (0, 0) {
            let v = if k == (0, 0) {
                linalg::hermitian_part(&random_matrix(rng, d, d, 1.0)) + linalg::identity(d).scale(4.0)
            } else {
                random_matrix(rng, d, d, 1.0)
            };
            g.insert_pair(k, v);
        }
    }
    g
}

/// `Σ_k c_k z^k` on the circle from samples, by direct summation.
fn dft_coefficient(samples: &[CMat], k: i64) -> CMat {
    let n = samples.len();
    let mut acc = samples[0].clone() * C64::new(0.0, 0.0);
    for (t, s) in samples.iter().enumerate() {
        acc += s * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (k * t as i64) as f64 / n as f64);
    }
    acc / C64::new(n as f64, 0.0)
}

/// Textbook Cholesky; fails on the first pivot that is not positive.
fn cholesky_succeeds(m: &CMat) -> bool {
    let n = m.nrows();
    let mut l = linalg::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if pivot <= 0.0 {
            return false;
        }
        l[(j, j)] = C64::new(pivot.sqrt(), 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / l[(j, j)];
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn doubly_toeplitz_blocks_depend_on_differences(seed in any::<u64>(), d in 1usize..3, n in 1i64..3, m in 1i64..3) {
        let g = random_band(&mut common::rng(seed), d, n, m);
        prop_assert!(validate_grid(&g, DEFAULT_PD_TOL).is_valid());
        // every difference of this rect stays inside the band
        let rect = IndexRect::quarter(n, m - 1);
        let big = build_doubly_toeplitz(&g, rect, rect).unwrap();
        prop_assert!(linalg::hermitian_deviation(&big.data) <= 1e-15);
        let labels: Vec<_> = rect.iter().collect();
        for &k in &labels {
            for &l in &labels {
                for &e in &labels {
                    let (ks, ls) = ((k.0 + e.0, k.1 + e.1), (l.0 + e.0, l.1 + e.1));
                    if rect.contains(ks) && rect.contains(ls) {
                        prop_assert_eq!(big.block(k, l).unwrap(), big.block(ks, ls).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn central_completion_zeroes_the_inverse_corner(seed in any::<u64>(), p in 1usize..3, q in 1usize..3, r in 1usize..3) {
        let mut rng = common::rng(seed);
        let full = random_pd(&mut rng, p + q + r);
        let blk = |i0: usize, j0: usize, h: usize, w: usize| full.view((i0, j0), (h, w)).into_owned();
        let corner = Corner3x3 {
            a: blk(0, 0, p, p),
            b: blk(0, p, p, q),
            c: blk(p, p, q, q),
            d: blk(p, p + q, q, r),
            e: blk(p + q, p + q, r, r),
        };
        let x0 = complete_center(&corner).unwrap();
        let inv = corner.assemble(&x0).try_inverse().unwrap();
        let corner13 = corner.inverse_corner(&x0).unwrap();
        prop_assert!(corner13.norm() <= 1e-9 * inv.norm());
    }

    #[test]
    fn corner_formulas_reproduce_fourier_coefficients(seed in any::<u64>(), d in 1usize..3) {
        // bidegree (1, 1) from a single factor, so p_11 = 0 and both corners are forced
        let p = common::random_stable(&mut common::rng(seed), d, 1, 1);
        let coeffs = common::fourier_direct(128, 1, 1, |z, w| {
            let v = common::eval(&p, z, w);
            (&v * v.adjoint()).try_inverse().unwrap()
        });
        let truth = |i: i64, j: i64| coeffs[((i + 1) * 3 + (j + 1)) as usize].clone();
        let g = common::grid_from_filter_window(&p, 1, 1, 128, false);
        let cmn = corner_c_minus_nm(&g).unwrap();
        prop_assert!((&cmn - truth(-1, 1)).norm() <= 1e-10);
        let table = g.with_corner((-1, 1), cmn);
        prop_assert!((corner_c_nm(&table, 1, 1).unwrap() - truth(1, 1)).norm() <= 1e-10);
    }

    #[test]
    fn factorization_identity_for_random_ar_data(seed in any::<u64>(), d in 1usize..3, n in 1usize..4) {
        let mut rng = common::rng(seed);
        let mut a = vec![linalg::identity(d).scale(3.0)];
        a.extend((0..n).map(|_| random_matrix(&mut rng, d, d, 0.35 / n as f64)));
        let t = BlockToeplitz1D::from_nonnegative(a.clone());
        let left = solve_yule_walker_left(&t).unwrap();
        let mut all = a;
        all.extend(extend_covariance_1d(&t, 30).unwrap());
        let samples: Vec<CMat> = (0..256)
            .map(|k| left.spectral_density(C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 256.0)).unwrap())
            .collect();
        for (k, ak) in all.iter().enumerate() {
            prop_assert!((dft_coefficient(&samples, k as i64) - ak).norm() <= 1e-8, "k = {}", k);
        }
    }

    #[test]
    fn factor_is_unique_and_normalized(seed in any::<u64>(), d in 1usize..3, deg in 1usize..4) {
        let mut rng = common::rng(seed);
        let b = MatrixPolynomial::new((0..=deg).map(|_| random_matrix(&mut rng, d, d, 1.0)).collect());
        let mut a = TrigMatrixPolynomial::from_left_factor(&b);
        a.blocks[deg] += linalg::identity(d).scale(0.2);
        let small = left_stable_factor(&a, FactorOptions { bauer_size: Some(64 * (deg + 1)), ..FactorOptions::default() }).unwrap();
        let large = left_stable_factor(&a, FactorOptions { bauer_size: Some(160 * (deg + 1)), ..FactorOptions::default() }).unwrap();
        prop_assert!(small.max_coeff_distance(&large) <= 10.0 * FactorOptions::default().tol);
        let m0 = &small.coeffs[0];
        for i in 0..d {
            prop_assert!(m0[(i, i)].im == 0.0 && m0[(i, i)].re > 0.0);
            for j in i + 1..d {
                prop_assert!(m0[(i, j)] == C64::new(0.0, 0.0));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn positive_definiteness_matches_cholesky(seed in any::<u64>(), size in 1usize..13) {
        let mut rng = common::rng(seed);
        let b = random_matrix(&mut rng, size, size, 1.0);
        let shift = rng.random_range(0.0..2.0);
        let m = linalg::hermitian_part(&(&b * b.adjoint())) - linalg::identity(size).scale(shift);
        // stay away from the decision boundary
        prop_assume!(linalg::min_hermitian_eigenvalue(&m).abs() > 1e-6);
        prop_assert_eq!(is_positive_definite(&m, DEFAULT_PD_TOL).unwrap().0, cholesky_succeeds(&m));
    }
}

#[test]
fn separable_hankel_deviation_shrinks_with_the_section() {
    let deviation = |n: usize| {
        let g = LittleHankelData::from_fn(1, 2 * n, n, n, |i, j| linalg::scalar(0.3 * 0.4f64.powi((i + j) as i32))).unwrap();
        nehari_2d_unchecked(&g, 4).unwrap().hankel_deviation
    };
    let (coarse, fine) = (deviation(5), deviation(10));
    assert!(fine <= coarse.max(1e-14), "{coarse} {fine}");
    assert!(fine <= 1e-10);
}
