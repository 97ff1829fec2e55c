//! Distances between braid-word matrices and target gates.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, adjoint, determinant, trace, ComplexMatrix, LinalgError};

/// Below this `|det|` the local invariants are not computed.
pub const DET_GUARD: f64 = 1e-12;

/// A matrix counts as unitary for the `g₃` realness check below this defect.
const UNITARY_FOR_G3: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("invariants undefined: |det| = {0:e}")]
    InvariantsUndefined(f64),
    #[error("g3 has imaginary part {0:e} for a unitary input")]
    ComplexG3(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn expect_dim(m: &ComplexMatrix, dim: usize) -> Result<(), MetricError> {
    if m.dim() != dim {
        return Err(MetricError::WrongDimension {
            expected: dim,
            got: m.dim(),
        });
    }
    Ok(())
}

/// Global-phase-invariant distance `√(1 − |Tr(U₀U†)|/2)` between 2×2 matrices.
pub fn phase_distance(u0: &ComplexMatrix, u: &ComplexMatrix) -> Result<f64, MetricError> {
    expect_dim(u0, 2)?;
    expect_dim(u, 2)?;
    // Tr(U₀U†) = Σ_ij U₀[i,j]·conj(U[i,j])
    let t: Complex64 = u0
        .entries()
        .iter()
        .zip(u.entries())
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok((1.0 - t.norm() / 2.0).max(0.0).sqrt())
}

/// The fixed Bell-basis change `Q`.
#[derive(Debug, Clone, Copy)]
pub struct BellTransform {
    pub q_matrix: ComplexMatrix,
}

impl BellTransform {
    pub fn new() -> Self {
        let s = FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let r = Complex64::new(s, 0.0);
        let i = Complex64::new(0.0, s);
        let q_matrix = ComplexMatrix::from_rows([
            [r, z, z, i],
            [z, i, r, z],
            [z, i, -r, z],
            [r, z, z, -i],
        ])
        .expect("static 4x4");
        Self { q_matrix }
    }

    /// `Q†·U·Q`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<ComplexMatrix, MetricError> {
        expect_dim(u, 4)?;
        Ok(adjoint(&self.q_matrix) * *u * self.q_matrix)
    }
}

impl Default for BellTransform {
    fn default() -> Self {
        Self::new()
    }
}

pub fn bell_conjugate(u: &ComplexMatrix) -> Result<ComplexMatrix, MetricError> {
    BellTransform::new().conjugate(u)
}

/// Makhlin's local invariants `(g₁, g₂, g₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalInvariants {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

impl LocalInvariants {
    pub const CNOT: LocalInvariants = LocalInvariants {
        g1: 0.0,
        g2: 0.0,
        g3: 1.0,
    };
}

/// Local invariants of a 4×4 matrix.
///
/// For non-unitary input (leaky computational blocks) `g₃` is complex and only
/// its real part is kept.
pub fn makhlin_invariants(u: &ComplexMatrix) -> Result<LocalInvariants, MetricError> {
    expect_dim(u, 4)?;
    let det = determinant(u);
    if det.norm() <= DET_GUARD {
        return Err(MetricError::InvariantsUndefined(det.norm()));
    }
    let ub = bell_conjugate(u)?;
    let m = ub.transpose() * ub;
    let tr = trace(&m);
    let tr2 = tr * tr;
    let g12 = tr2 / (det * 16.0);
    let g3 = (tr2 - trace(&(m * m))) / (det * 4.0);
    if g3.im.abs() > 1e-9 && u.unitarity_defect() < UNITARY_FOR_G3 {
        return Err(MetricError::ComplexG3(g3.im));
    }
    Ok(LocalInvariants {
        g1: g12.re,
        g2: g12.im,
        g3: g3.re,
    })
}

/// `Σ Δgᵢ²` against the invariants of CNOT, `(0, 0, 1)`.
pub fn cnot_class_distance(a: &ComplexMatrix) -> Result<f64, MetricError> {
    let g = makhlin_invariants(a)?;
    let t = LocalInvariants::CNOT;
    Ok((g.g1 - t.g1).powi(2) + (g.g2 - t.g2).powi(2) + (g.g3 - t.g3).powi(2))
}

/// `Tr √(x†x)` with `x = A†A − I`, i.e. the nuclear norm of `x`.
pub fn unitarity_measure(a: &ComplexMatrix) -> Result<f64, MetricError> {
    expect_dim(a, 4)?;
    let x = (adjoint(a) * *a).sub(&ComplexMatrix::identity(4)?)?;
    Ok(linalg::singular_values(&x)?.iter().sum())
}

/// Splits a 6×6 braid matrix into its computational 4×4 block and the 2×2
/// non-computational block. The off-diagonal leakage blocks are dropped.
pub fn computational_block(
    b: &ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix), MetricError> {
    expect_dim(b, 6)?;
    Ok((b.block(0, 0, 4)?, b.block(4, 4, 2)?))
}

/// Standard gates used as targets and in tests.
pub mod gates {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    pub fn hadamard() -> ComplexMatrix {
        let s = FRAC_1_SQRT_2;
        ComplexMatrix::from_rows([[r(s), r(s)], [r(s), r(-s)]]).expect("2x2")
    }

    pub fn t_gate() -> ComplexMatrix {
        ComplexMatrix::diag(&[r(1.0), Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)])
            .expect("2x2")
    }

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows([[r(0.0), r(1.0)], [r(1.0), r(0.0)]]).expect("2x2")
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::diag(&[r(1.0), r(-1.0)]).expect("2x2")
    }

    fn permutation(p: [usize; 4]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4).expect("4x4");
        for (col, row) in p.into_iter().enumerate() {
            m[(row, col)] = r(1.0);
        }
        m
    }

    pub fn cnot() -> ComplexMatrix {
        permutation([0, 1, 3, 2])
    }

    pub fn swap() -> ComplexMatrix {
        permutation([0, 2, 1, 3])
    }

    pub fn cz() -> ComplexMatrix {
        ComplexMatrix::diag(&[r(1.0), r(1.0), r(1.0), r(-1.0)]).expect("4x4")
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;
    use crate::linalg::{frobenius_distance, kron};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn phase_distance_basics() {
        let h = hadamard();
        assert!(phase_distance(&h, &h).unwrap() < 1e-7);
        let shifted = h.scale(Complex64::from_polar(1.0, 0.7));
        assert!(phase_distance(&shifted, &h).unwrap() < 1e-7);
        assert!(close(phase_distance(&pauli_x(), &pauli_z()).unwrap(), 1.0, 1e-15));
        let i4 = ComplexMatrix::identity(4).unwrap();
        assert!(matches!(
            phase_distance(&i4, &i4),
            Err(MetricError::WrongDimension { .. })
        ));
    }

    #[test]
    fn q_is_unitary_with_expected_pattern() {
        let q = BellTransform::new().q_matrix;
        assert!(q.unitarity_defect() < 1e-15);
        let s = FRAC_1_SQRT_2;
        assert_eq!(q[(0, 3)], Complex64::new(0.0, s));
        assert_eq!(q[(2, 2)], Complex64::new(-s, 0.0));
        assert_eq!(q[(3, 3)], Complex64::new(0.0, -s));
    }

    #[test]
    fn bell_conjugation_properties() {
        let i4 = ComplexMatrix::identity(4).unwrap();
        assert!(frobenius_distance(&bell_conjugate(&i4).unwrap(), &i4).unwrap() < 1e-15);
        let c = cnot();
        let cb = bell_conjugate(&c).unwrap();
        assert!(close(cb.frobenius_norm(), c.frobenius_norm(), 1e-12));
    }

    #[test]
    fn invariants_of_standard_gates() {
        let g = makhlin_invariants(&cnot()).unwrap();
        assert!(close(g.g1, 0.0, 1e-12) && close(g.g2, 0.0, 1e-12) && close(g.g3, 1.0, 1e-12));
        let g = makhlin_invariants(&ComplexMatrix::identity(4).unwrap()).unwrap();
        assert!(close(g.g1, 1.0, 1e-12) && close(g.g2, 0.0, 1e-12) && close(g.g3, 3.0, 1e-12));
        let g = makhlin_invariants(&swap()).unwrap();
        assert!(close(g.g1, -1.0, 1e-12) && close(g.g2, 0.0, 1e-12) && close(g.g3, -3.0, 1e-12));
        assert!(cnot_class_distance(&cz()).unwrap() < 1e-12);
    }

    #[test]
    fn singular_input_is_rejected() {
        let z = ComplexMatrix::zeros(4).unwrap();
        assert!(matches!(
            makhlin_invariants(&z),
            Err(MetricError::InvariantsUndefined(_))
        ));
        assert!(cnot_class_distance(&z).is_err());
    }

    #[test]
    fn unitarity_measure_cases() {
        assert!(unitarity_measure(&cnot()).unwrap() < 1e-10);
        let two = ComplexMatrix::identity(4).unwrap().scale(Complex64::new(2.0, 0.0));
        assert!(close(unitarity_measure(&two).unwrap(), 12.0, 1e-12));
        let product = cnot() * kron(&hadamard(), &t_gate()).unwrap();
        assert!(unitarity_measure(&product).unwrap() < 1e-10);
    }

    #[test]
    fn block_split() {
        let i6 = ComplexMatrix::identity(6).unwrap();
        let (a, m) = computational_block(&i6).unwrap();
        assert_eq!(a, ComplexMatrix::identity(4).unwrap());
        assert_eq!(m, ComplexMatrix::identity(2).unwrap());
        let a4 = cnot();
        let m2 = hadamard();
        let (a, m) = computational_block(&crate::linalg::direct_sum(&a4, &m2).unwrap()).unwrap();
        assert_eq!((a, m), (a4, m2));
    }
}
