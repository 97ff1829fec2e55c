//! Cross-checks against nalgebra.

use anyon_core::linalg::{
    determinant, hermitian_eigenvalues, singular_values, ComplexMatrix,
};
use anyon_core::metrics::unitarity_measure;
use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let v: Vec<Complex64> = (0..dim * dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::from_row_major(dim, &v).unwrap()
}

fn to_na(m: &ComplexMatrix) -> DMatrix<Complex<f64>> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| Complex::new(m[(i, j)].re, m[(i, j)].im))
}

#[test]
fn singular_values_match() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for dim in [2, 4, 6] {
        for _ in 0..50 {
            let m = random(dim, &mut rng);
            let ours = singular_values(&m).unwrap();
            let mut theirs: Vec<f64> = to_na(&m).singular_values().iter().copied().collect();
            theirs.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn nuclear_norm_of_gram_defect_matches() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let a = random(4, &mut rng);
        let na = to_na(&a);
        let x = na.adjoint() * &na - DMatrix::identity(4, 4);
        let oracle: f64 = x.singular_values().iter().sum();
        assert!((unitarity_measure(&a).unwrap() - oracle).abs() < 1e-9);
    }
}

#[test]
fn determinants_match() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for dim in [2, 4, 6] {
        for _ in 0..50 {
            let m = random(dim, &mut rng);
            let d = determinant(&m);
            let o = to_na(&m).determinant();
            assert!((d - Complex64::new(o.re, o.im)).norm() < 1e-10 * (1.0 + o.norm()));
        }
    }
}

#[test]
fn hermitian_spectra_match() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for dim in [4, 6] {
        for _ in 0..50 {
            let a = random(dim, &mut rng);
            let h = a.add(&anyon_core::linalg::adjoint(&a)).unwrap();
            let ours = hermitian_eigenvalues(&h).unwrap();
            let mut theirs: Vec<f64> = to_na(&h)
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect();
            theirs.sort_by(|a, b| b.total_cmp(a));
            let mut ours_sorted = ours.clone();
            ours_sorted.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in ours_sorted.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn inverses_match() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let m = random(6, &mut rng);
        let inv = m.inverse().unwrap();
        let o = to_na(&m).try_inverse().unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let e = o[(i, j)];
                assert!((inv[(i, j)] - Complex64::new(e.re, e.im)).norm() < 1e-9 * (1.0 + e.norm()));
            }
        }
    }
}
