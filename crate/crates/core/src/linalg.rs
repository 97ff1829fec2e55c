//! Small dense complex matrices (dimension 2, 4 or 6).
//!
//! Everything in this crate is built from products of a handful of tiny
//! matrices, so storage is inline and `ComplexMatrix` is `Copy`. No heap
//! allocation happens on the hot paths of the searches.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use thiserror::Error;

/// Largest supported dimension.
pub const MAX_DIM: usize = 6;

const CAP: usize = MAX_DIM * MAX_DIM;

/// Off-diagonal threshold for the Jacobi eigensolver, relative to the
/// Frobenius norm of the input.
pub const JACOBI_TOLERANCE: f64 = 1e-14;

/// Sweep cap for the Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported dimension {0} (expected 2, 4 or 6)")]
    UnsupportedDimension(usize),
    #[error("matrix entry ({0}, {1}) is not finite")]
    NonFinite(usize, usize),
    #[error("expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
}

fn check_dim(dim: usize) -> Result<(), LinalgError> {
    match dim {
        2 | 4 | 6 => Ok(()),
        d => Err(LinalgError::UnsupportedDimension(d)),
    }
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [Complex64; CAP],
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: [Complex64::new(0.0, 0.0); CAP],
        })
    }

    pub fn identity(dim: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(LinalgError::ShapeMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let mut m = Self::zeros(dim)?;
        for (k, z) in entries.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(LinalgError::NonFinite(k / dim, k % dim));
            }
            m.data[k] = *z;
        }
        Ok(m)
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Result<Self, LinalgError> {
        let flat: Vec<Complex64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_row_major(N, &flat)
    }

    pub fn diag(entries: &[Complex64]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(entries.len())?;
        for (i, z) in entries.iter().enumerate() {
            m[(i, i)] = *z;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major view of the entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.entries()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for z in &mut out.data[..self.dim * self.dim] {
            *z *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        same_dim(self, other)?;
        let mut out = *self;
        for (z, w) in out.data.iter_mut().zip(other.data.iter()) {
            *z += w;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        same_dim(self, other)?;
        let mut out = *self;
        for (z, w) in out.data.iter_mut().zip(other.data.iter()) {
            *z -= w;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖M†M − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = adjoint(self) * *self;
        let id = Self::identity(self.dim).expect("dim already validated");
        frobenius_distance(&g, &id).expect("same dimension")
    }

    /// Copies the square block starting at `(row, col)` with side `size`.
    pub fn block(&self, row: usize, col: usize, size: usize) -> Result<Self, LinalgError> {
        let mut out = Self::zeros(size)?;
        if row + size > self.dim || col + size > self.dim {
            return Err(LinalgError::DimensionMismatch(self.dim, row.max(col) + size));
        }
        for i in 0..size {
            for j in 0..size {
                out[(i, j)] = self[(row + i, col + j)];
            }
        }
        Ok(out)
    }

    /// Matrix inverse by LU decomposition with partial pivoting.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        let n = self.dim;
        let lu = Lu::factor(self);
        if lu.singular {
            return Err(LinalgError::Singular);
        }
        let mut inv = Self::zeros(n)?;
        for col in 0..n {
            let mut rhs = [Complex64::new(0.0, 0.0); MAX_DIM];
            rhs[col] = Complex64::new(1.0, 0.0);
            let x = lu.solve(&rhs);
            for row in 0..n {
                inv[(row, col)] = x[row];
            }
        }
        Ok(inv)
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self {
            dim: n,
            data: [Complex64::new(0.0, 0.0); CAP],
        };
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

/// Panics on dimension mismatch; use [`mat_mul`] for the checked form.
impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        self.mul_unchecked(&rhs)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

fn same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(), LinalgError> {
    if a.dim != b.dim {
        return Err(LinalgError::DimensionMismatch(a.dim, b.dim));
    }
    Ok(())
}

pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    same_dim(a, b)?;
    Ok(a.mul_unchecked(b))
}

/// Conjugate transpose.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    let mut out = *a;
    for i in 0..a.dim {
        for j in 0..a.dim {
            out[(i, j)] = a[(j, i)].conj();
        }
    }
    out
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    (0..a.dim).map(|i| a[(i, i)]).sum()
}

/// Determinant via LU with partial pivoting. Singular input gives zero.
pub fn determinant(a: &ComplexMatrix) -> Complex64 {
    let lu = Lu::factor(a);
    if lu.singular {
        return Complex64::new(0.0, 0.0);
    }
    let mut det = Complex64::new(lu.sign, 0.0);
    for i in 0..a.dim {
        det *= lu.m[(i, i)];
    }
    det
}

/// Kronecker product with entry `[(i·bd+k),(j·bd+l)] = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let (ad, bd) = (a.dim, b.dim);
    let n = ad * bd;
    if n != 4 && n != 6 {
        return Err(LinalgError::UnsupportedDimension(n));
    }
    let mut out = ComplexMatrix::zeros(n)?;
    for i in 0..ad {
        for j in 0..ad {
            for k in 0..bd {
                for l in 0..bd {
                    out[(i * bd + k, j * bd + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Block-diagonal `[a 0; 0 b]`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let n = a.dim + b.dim;
    if n != 4 && n != 6 {
        return Err(LinalgError::UnsupportedDimension(n));
    }
    let mut out = ComplexMatrix::zeros(n)?;
    for i in 0..a.dim {
        for j in 0..a.dim {
            out[(i, j)] = a[(i, j)];
        }
    }
    for i in 0..b.dim {
        for j in 0..b.dim {
            out[(a.dim + i, a.dim + j)] = b[(i, j)];
        }
    }
    Ok(out)
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64, LinalgError> {
    same_dim(a, b)?;
    Ok(a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Singular values in descending order, from the eigenvalues of `a†a`.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    let gram = adjoint(a) * *a;
    let mut values: Vec<f64> = hermitian_eigenvalues(&gram)?
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Only the Hermitian part of the input is used.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    let n = h.dim;
    let mut a = *h;
    // symmetrise so rounding noise in the input cannot stall convergence
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let threshold = JACOBI_TOLERANCE * scale;

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            return Ok((0..n).map(|i| a[(i, i)].re).collect());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, p, q);
            }
        }
    }
    if off_diagonal_norm(&a) <= threshold {
        return Ok((0..n).map(|i| a[(i, i)].re).collect());
    }
    Err(LinalgError::NoConvergence(JACOBI_MAX_SWEEPS))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]` of a Hermitian matrix.
fn rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.dim;
    let eneg = phase.conj(); // e^{-iφ}

    // A <- A J with J_pp = c, J_pq = s, J_qp = -s e^{-iφ}, J_qq = c e^{-iφ}
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * eneg * s;
        a[(k, q)] = akp * s + akq * eneg * c;
    }
    // A <- J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

struct Lu {
    m: ComplexMatrix,
    perm: [usize; MAX_DIM],
    sign: f64,
    singular: bool,
}

impl Lu {
    fn factor(a: &ComplexMatrix) -> Self {
        let n = a.dim;
        let mut m = *a;
        let mut perm = [0usize; MAX_DIM];
        for (i, p) in perm.iter_mut().enumerate().take(n) {
            *p = i;
        }
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let mut piv = k;
            let mut best = m[(k, k)].norm();
            for i in (k + 1)..n {
                let v = m[(i, k)].norm();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                singular = true;
                continue;
            }
            if piv != k {
                for j in 0..n {
                    let tmp = m[(k, j)];
                    m[(k, j)] = m[(piv, j)];
                    m[(piv, j)] = tmp;
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let pivot = m[(k, k)];
            for i in (k + 1)..n {
                let f = m[(i, k)] / pivot;
                m[(i, k)] = f;
                for j in (k + 1)..n {
                    let v = m[(k, j)];
                    m[(i, j)] -= f * v;
                }
            }
        }
        Lu {
            m,
            perm,
            sign,
            singular,
        }
    }

    fn solve(&self, rhs: &[Complex64; MAX_DIM]) -> [Complex64; MAX_DIM] {
        let n = self.m.dim;
        let mut y = [Complex64::new(0.0, 0.0); MAX_DIM];
        for i in 0..n {
            let mut s = rhs[self.perm[i]];
            for j in 0..i {
                s -= self.m[(i, j)] * y[j];
            }
            y[i] = s;
        }
        let mut x = [Complex64::new(0.0, 0.0); MAX_DIM];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= self.m[(i, j)] * x[j];
            }
            x[i] = s / self.m[(i, i)];
        }
        x
    }
}
