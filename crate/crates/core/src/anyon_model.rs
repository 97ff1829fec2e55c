//! Elementary braiding matrices of the non-semisimple Ising model.
//!
//! A one-qubit register is the fusion tree `α ⊗ σ ⊗ σ → α` with the
//! intermediate charge `α+1` encoding `|0⟩` and `α−1` encoding `|1⟩`. The
//! two-qubit register adds two more `σ` and uses the basis
//! `{|00⟩, |01⟩, |10⟩, |11⟩, |NC₁⟩, |NC₂⟩}` in that order, the first qubit
//! being the first intermediate charge.
//!
//! All phases are powers of the eighth root of unity `q = e^{iπ/4}`. Powers are
//! evaluated with the exponent reduced modulo 8 first ([`qpow`]); without
//! that, `q^{2(α+1)}` loses about three digits near `α = 3` where the
//! F-matrix denominators vanish.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, adjoint, direct_sum, kron, ComplexMatrix, LinalgError};

/// Tolerance on `‖J₄ − J₄_expected‖_F` accepted when building two-qubit generators.
pub const J4_TOLERANCE: f64 = 1e-9;

/// Unitarity defect above which the one-qubit `b₂` is rejected.
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

/// Exponent of `q` in the vacuum-channel R-symbol `R_I^{σσ}`.
pub const R_VACUUM_EXPONENT: f64 = 2.5;
/// Exponent of `q` in the fermion-channel R-symbol `R_ψ^{σσ}`.
pub const R_PSI_EXPONENT: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("alpha = {0} is outside the open interval (2, 3)")]
    AlphaOutOfRange(f64),
    #[error("unknown fusion channel {0:?} x {1:?}")]
    UnknownFusion(Anyon, Anyon),
    #[error("no bubble coefficient for B_{0:?}^({1:?},{2:?})")]
    UnknownBubble(Anyon, Anyon, Anyon),
    #[error("degenerate alpha: bubble coefficient {0} vanishes or diverges")]
    DegenerateAlpha(&'static str),
    #[error("model construction failure: {0}")]
    Construction(String),
    #[error("Appendix A convention failure: J4 defect {0:e} exceeds tolerance")]
    J4Defect(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `q^x` for real `x`, with the exponent reduced into `[-4, 4]` before scaling.
pub fn qpow(x: f64) -> Complex64 {
    let r = x - 8.0 * (x / 8.0).round();
    Complex64::from_polar(1.0, FRAC_PI_4 * r)
}

/// `cot(πx/4)`, using the period 4 in `x` to keep the argument small.
fn cot_quarter_pi(x: f64) -> f64 {
    let r = x - 4.0 * (x / 4.0).round();
    1.0 / (FRAC_PI_4 * r).tan()
}

fn tan_quarter_pi(x: f64) -> f64 {
    let r = x - 4.0 * (x / 4.0).round();
    (FRAC_PI_4 * r).tan()
}

fn csqrt(x: f64) -> Complex64 {
    Complex64::new(x, 0.0).sqrt()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Model parameter `α ∈ (2, 3)`; `q = e^{iπ/4}` is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnyonParams {
    alpha: f64,
}

impl AnyonParams {
    pub fn new(alpha: f64) -> Result<Self, ModelError> {
        if !(alpha > 2.0 && alpha < 3.0) {
            return Err(ModelError::AlphaOutOfRange(alpha));
        }
        Ok(Self { alpha })
    }

    /// Grid point `α = k / 1000`, built from the integer so grid endpoints
    /// are the same doubles as the parsed decimals.
    pub fn from_milli(k: u32) -> Result<Self, ModelError> {
        Self::new(f64::from(k) / 1000.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn q(&self) -> Complex64 {
        qpow(1.0)
    }
}

/// Anyon labels appearing in the fusion rules. Neglectons carry their real index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Anyon {
    Vacuum,
    Sigma,
    Psi,
    P2,
    S32,
    Neglecton(f64),
}

const INDEX_EPS: f64 = 1e-9;

fn neglecton_offset(d: Anyon, a: Anyon) -> Option<(f64, f64)> {
    match (d, a) {
        (Anyon::Neglecton(y), Anyon::Neglecton(x)) => Some((x, y - x)),
        _ => None,
    }
}

fn offset_is(off: f64, k: f64) -> bool {
    (off - k).abs() < INDEX_EPS
}

/// Fusion outcomes of `a ⊗ b`, in a fixed order. Both argument orders are accepted.
pub fn fuse(a: Anyon, b: Anyon) -> Result<Vec<Anyon>, ModelError> {
    use Anyon::*;
    let out = match (a, b) {
        (v, Vacuum) | (Vacuum, v) => vec![v],
        (Sigma, Sigma) => vec![Vacuum, Psi],
        (Sigma, Psi) | (Psi, Sigma) => vec![Sigma, S32],
        (Sigma, S32) | (S32, Sigma) => vec![P2],
        (Psi, Psi) => vec![Vacuum, P2],
        (Neglecton(x), Sigma) | (Sigma, Neglecton(x)) => vec![Neglecton(x + 1.0), Neglecton(x - 1.0)],
        (Neglecton(x), Psi) | (Psi, Neglecton(x)) => {
            vec![Neglecton(x + 2.0), Neglecton(x), Neglecton(x - 2.0)]
        }
        _ => return Err(ModelError::UnknownFusion(a, b)),
    };
    Ok(out)
}

/// Bubble-pop coefficient `B_d^{ab}`.
///
/// Neglecton entries are families in their real index, so e.g.
/// `B_{x−1}^{xσ}` is available for any `x`, not only for the model's `α`.
pub fn bubble(d: Anyon, a: Anyon, b: Anyon) -> Result<f64, ModelError> {
    use Anyon::*;
    let unknown = || ModelError::UnknownBubble(d, a, b);
    let value = match (d, a, b) {
        (Psi, Sigma, Sigma) => 1.0,
        (S32, Psi, Sigma) | (S32, Sigma, Psi) => 1.0,
        (Vacuum, Sigma, Sigma) => -SQRT_2,
        (Sigma, Psi, Sigma) => -1.0 / SQRT_2,
        (Sigma, Sigma, Psi) => -SQRT_2,
        (Neglecton(_), Neglecton(_), _) => {
            let (x, off) = neglecton_offset(d, a).ok_or_else(unknown)?;
            match b {
                Vacuum if offset_is(off, 0.0) => 1.0,
                Sigma if offset_is(off, 1.0) => 1.0,
                Sigma if offset_is(off, -1.0) => SQRT_2 / (-1.0 + cot_quarter_pi(x)),
                Psi if offset_is(off, 2.0) => 1.0,
                Psi if offset_is(off, 0.0) => {
                    let h = PI * x / 2.0;
                    SQRT_2 * h.cos() / (1.0 - h.sin())
                }
                // B_x^{(x+2)ψ} is tabulated in terms of the lower index x = d
                Psi if offset_is(off, -2.0) => 2.0 * cot_quarter_pi(x - 2.0),
                S32 if offset_is(off, 1.0) => SQRT_2 / (1.0 - tan_quarter_pi(x)),
                S32 if offset_is(off, -1.0) => {
                    (2.0 + 2.0 * tan_quarter_pi(x)) / (-1.0 + cot_quarter_pi(x))
                }
                _ => return Err(unknown()),
            }
        }
        _ => return Err(unknown()),
    };
    Ok(value)
}

/// The coefficients `B_{α+1}` and `B_{α−1}` entering the one-qubit `b₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbmCoefficients {
    pub b_alpha_plus_1: f64,
    pub b_alpha_minus_1: f64,
}

pub fn ebm_coefficients(p: &AnyonParams) -> EbmCoefficients {
    let a = p.alpha();
    EbmCoefficients {
        b_alpha_plus_1: SQRT_2 / (-1.0 + cot_quarter_pi(a + 1.0)),
        b_alpha_minus_1: SQRT_2 / (-1.0 + cot_quarter_pi(a)),
    }
}

/// Number of qubits a generator set acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arity {
    One,
    Two,
}

impl Arity {
    pub fn alphabet(self) -> &'static str {
        match self {
            Arity::One => "ABCD",
            Arity::Two => "ABCDEFGH",
        }
    }

    pub fn letter_count(self) -> usize {
        self.alphabet().len()
    }

    pub fn dim(self) -> usize {
        match self {
            Arity::One => 2,
            Arity::Two => 6,
        }
    }

    pub fn qubits(self) -> u8 {
        match self {
            Arity::One => 1,
            Arity::Two => 2,
        }
    }

    /// Index of a letter in this alphabet.
    pub fn index_of(self, letter: char) -> Option<usize> {
        self.alphabet().find(letter)
    }

    pub fn letter(self, index: usize) -> char {
        self.alphabet().as_bytes()[index] as char
    }

    /// Inverse partner: A↔C, B↔D, E↔G, F↔H.
    pub fn inverse_index(index: usize) -> usize {
        index ^ 2
    }
}

impl TryFrom<u8> for Arity {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(Arity::One),
            2 => Ok(Arity::Two),
            other => Err(format!("arity must be 1 or 2, got {other}")),
        }
    }
}

/// Letter-indexed generators and their inverses, immutable after construction.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    arity: Arity,
    alpha: f64,
    matrices: Vec<ComplexMatrix>,
}

impl GeneratorSet {
    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.arity.dim()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// Matrix for the letter at `index` in alphabet order.
    pub fn by_index(&self, index: usize) -> &ComplexMatrix {
        &self.matrices[index]
    }

    pub fn matrix(&self, letter: char) -> Option<&ComplexMatrix> {
        self.arity.index_of(letter).map(|i| &self.matrices[i])
    }

    pub fn inverse_of(&self, letter: char) -> Option<char> {
        self.arity
            .index_of(letter)
            .map(|i| self.arity.letter(Arity::inverse_index(i)))
    }

    /// `(letter, matrix)` pairs in alphabet order.
    pub fn letters(&self) -> impl Iterator<Item = (char, &ComplexMatrix)> {
        self.arity.alphabet().chars().zip(self.matrices.iter())
    }
}

/// `(b₁⁽³⁾)²` and `b₂⁽³⁾`.
fn one_qubit_pair(p: &AnyonParams) -> Result<(ComplexMatrix, ComplexMatrix), ModelError> {
    let a = p.alpha();
    let double_exchange = ComplexMatrix::diag(&[qpow(3.0 + a), qpow(3.0 - a)])?;

    let coeffs = ebm_coefficients(p);
    // both coefficients are negative on (2, 3); the ratio of principal roots is real positive
    let ratio = csqrt(coeffs.b_alpha_plus_1) / csqrt(coeffs.b_alpha_minus_1);
    if !(ratio.re > 0.0 && ratio.im.abs() <= 1e-12 * ratio.re) {
        return Err(ModelError::Construction(format!(
            "sqrt(B_a+1)/sqrt(B_a-1) = {ratio} is not real positive"
        )));
    }
    let one_plus_q2 = c(1.0, 0.0) + qpow(2.0);
    let off = qpow(-1.0) * ratio;
    let exchange = ComplexMatrix::from_rows([
        [one_plus_q2 / (c(1.0, 0.0) - qpow(2.0 * a)), off],
        [off, one_plus_q2 / (c(1.0, 0.0) - qpow(-2.0 * a))],
    ])?
    .scale(qpow(0.5));
    Ok((double_exchange, exchange))
}

/// One-qubit alphabet `{A, B, C, D} = {(b₁)², b₂, (b₁)²⁻¹, b₂⁻¹}`.
pub fn one_qubit_generators(p: &AnyonParams) -> Result<GeneratorSet, ModelError> {
    let (a, b) = one_qubit_pair(p)?;
    let mut matrices = Vec::with_capacity(4);
    matrices.push(a);
    matrices.push(b);
    for m in [a, b] {
        let defect = m.unitarity_defect();
        if defect > UNITARITY_TOLERANCE {
            return Err(ModelError::Construction(format!(
                "one-qubit generator not unitary (defect {defect:e})"
            )));
        }
        matrices.push(adjoint(&m));
    }
    Ok(GeneratorSet {
        arity: Arity::One,
        alpha: p.alpha(),
        matrices,
    })
}

/// The pair `(R_I^{σσ}, R_ψ^{σσ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RSymbols {
    pub vacuum: Complex64,
    pub psi: Complex64,
}

impl RSymbols {
    pub fn from_exponents(vacuum: f64, psi: f64) -> Self {
        Self {
            vacuum: qpow(vacuum),
            psi: qpow(psi),
        }
    }
}

impl Default for RSymbols {
    fn default() -> Self {
        Self::from_exponents(R_VACUUM_EXPONENT, R_PSI_EXPONENT)
    }
}

/// F-matrices, R-symbols and bubble data needed for `b₃⁽⁵⁾`.
#[derive(Debug, Clone)]
pub struct AppendixAData {
    pub r_vacuum: Complex64,
    pub r_psi: Complex64,
    /// Normalised `F^{(α+1)σσ}_{(α+1)}`; rows `(I, ψ)`, columns `(α+2, α)`.
    pub f_plus: ComplexMatrix,
    /// Normalised `F^{(α−1)σσ}_{(α−1)}`; rows `(I, ψ)`, columns `(α, α−2)`.
    pub f_minus: ComplexMatrix,
    /// Every bubble coefficient consulted by the normalisation.
    pub bubble: Vec<((Anyon, Anyon, Anyon), f64)>,
}

/// Unnormalised `F^{xσσ}_x` for neglecton index `x`.
pub fn raw_f_matrix(x: f64) -> Result<ComplexMatrix, ModelError> {
    // Q = q^{2x} = e^{iθ}
    let r = 2.0 * x - 8.0 * (x / 4.0).round();
    let theta = FRAC_PI_4 * r;
    let q = qpow(1.0);
    let q2 = qpow(2.0);
    let big_q = Complex64::from_polar(1.0, theta);
    // e^{iθ} − 1 and e^{iθ} − e^{iπ/2} without cancellation
    let q_minus_1 = c(0.0, 2.0 * (theta / 2.0).sin()) * Complex64::from_polar(1.0, theta / 2.0);
    let half = (theta - std::f64::consts::FRAC_PI_2) / 2.0;
    let q_minus_q2 =
        c(0.0, 2.0 * half.sin()) * Complex64::from_polar(1.0, (theta + std::f64::consts::FRAC_PI_2) / 2.0);
    if q_minus_1.norm() == 0.0 {
        return Err(ModelError::DegenerateAlpha("F-matrix prefactor"));
    }
    let pref = c(1.0, 0.0) / (q_minus_1 * SQRT_2);
    Ok(ComplexMatrix::from_rows([
        [q * (big_q + q2) * pref, -q_minus_1 * pref],
        [q_minus_q2 * pref, q * q_minus_1 * pref],
    ])?)
}

fn checked_bubble(
    d: Anyon,
    a: Anyon,
    b: Anyon,
    used: &mut Vec<((Anyon, Anyon, Anyon), f64)>,
) -> Result<Complex64, ModelError> {
    let v = bubble(d, a, b)?;
    if !v.is_finite() || v == 0.0 {
        return Err(ModelError::DegenerateAlpha("bubble"));
    }
    if !used.iter().any(|(k, _)| *k == (d, a, b)) {
        used.push(((d, a, b), v));
    }
    Ok(csqrt(v))
}

/// `F^{xσσ}_x` rescaled entrywise by `√B_d^{an} √B_n^{bc} / (√B_d^{mc} √B_m^{ab})`.
fn normalized_f_matrix(
    x: f64,
    used: &mut Vec<((Anyon, Anyon, Anyon), f64)>,
) -> Result<ComplexMatrix, ModelError> {
    use Anyon::*;
    let raw = raw_f_matrix(x)?;
    let d = Neglecton(x);
    let a = Neglecton(x);
    let fusion_channels = [Vacuum, Psi];
    let intermediates = [Neglecton(x + 1.0), Neglecton(x - 1.0)];
    let mut out = raw;
    for (i, &n) in fusion_channels.iter().enumerate() {
        let row = checked_bubble(d, a, n, used)? * checked_bubble(n, Sigma, Sigma, used)?;
        for (j, &m) in intermediates.iter().enumerate() {
            let col = checked_bubble(d, m, Sigma, used)? * checked_bubble(m, a, Sigma, used)?;
            out[(i, j)] = raw[(i, j)] * row / col;
        }
    }
    Ok(out)
}

pub fn appendix_a_data(p: &AnyonParams) -> Result<AppendixAData, ModelError> {
    appendix_a_data_with(p, RSymbols::default())
}

pub fn appendix_a_data_with(p: &AnyonParams, r: RSymbols) -> Result<AppendixAData, ModelError> {
    let a = p.alpha();
    let mut used = Vec::new();
    let f_plus = normalized_f_matrix(a + 1.0, &mut used)?;
    let f_minus = normalized_f_matrix(a - 1.0, &mut used)?;
    Ok(AppendixAData {
        r_vacuum: r.vacuum,
        r_psi: r.psi,
        f_plus,
        f_minus,
        bubble: used,
    })
}

fn inverse_2x2(m: &ComplexMatrix) -> Result<ComplexMatrix, ModelError> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det.norm() == 0.0 {
        return Err(ModelError::Linalg(LinalgError::Singular));
    }
    Ok(ComplexMatrix::from_rows([
        [m[(1, 1)] / det, -m[(0, 1)] / det],
        [-m[(1, 0)] / det, m[(0, 0)] / det],
    ])?)
}

/// `F⁻¹ · diag(R_I, R_ψ) · F` in the intermediate-charge basis.
fn exchange_block(f: &ComplexMatrix, r: &AppendixAData) -> Result<ComplexMatrix, ModelError> {
    let rdiag = ComplexMatrix::diag(&[r.r_vacuum, r.r_psi])?;
    Ok(inverse_2x2(f)? * rdiag * *f)
}

/// Index of each two-qubit basis state.
pub mod basis {
    pub const S00: usize = 0;
    pub const S01: usize = 1;
    pub const S10: usize = 2;
    pub const S11: usize = 3;
    pub const NC1: usize = 4;
    pub const NC2: usize = 5;
}

/// `b₃⁽⁵⁾`, the exchange of the second and third `σ`.
pub fn b3_matrix(data: &AppendixAData) -> Result<ComplexMatrix, ModelError> {
    use basis::*;
    let plus = exchange_block(&data.f_plus, data)?;
    let minus = exchange_block(&data.f_minus, data)?;
    let mut e = ComplexMatrix::zeros(6)?;
    // columns of f_plus are middle charges (α+2, α) -> (NC1, 00)
    let plus_idx = [NC1, S00];
    // columns of f_minus are middle charges (α, α−2) -> (11, NC2)
    let minus_idx = [S11, NC2];
    for i in 0..2 {
        for j in 0..2 {
            e[(plus_idx[i], plus_idx[j])] = plus[(i, j)];
            e[(minus_idx[i], minus_idx[j])] = minus[(i, j)];
        }
    }
    // mixed sectors only admit the ψ channel
    e[(S01, S01)] = data.r_psi;
    e[(S10, S10)] = data.r_psi;
    Ok(e)
}

/// Raw two-qubit generators `[(b₁)², b₂, b₃, b₄]` before inversion.
fn two_qubit_raw(p: &AnyonParams, r: RSymbols) -> Result<[ComplexMatrix; 4], ModelError> {
    let (a1, b1) = one_qubit_pair(p)?;
    let i2 = ComplexMatrix::identity(2)?;
    let half = ComplexMatrix::identity(2)?.scale(qpow(0.5));
    let a = direct_sum(&kron(&a1, &i2)?, &a1)?;
    let b = direct_sum(&kron(&b1, &i2)?, &half)?;
    let f = direct_sum(&kron(&i2, &b1)?, &half)?;
    let e = b3_matrix(&appendix_a_data_with(p, r)?)?;
    Ok([a, b, e, f])
}

/// Right-hand side of the J₄ identity: `I₂ ⊗ (b₁⁽³⁾)² ⊕ diag(q^{1−α}, q^{1+α})`.
pub fn j4_expected(p: &AnyonParams) -> Result<ComplexMatrix, ModelError> {
    let (a1, _) = one_qubit_pair(p)?;
    let i2 = ComplexMatrix::identity(2)?;
    let nc = ComplexMatrix::diag(&[qpow(1.0 - p.alpha()), qpow(1.0 + p.alpha())])?;
    Ok(direct_sum(&kron(&i2, &a1)?, &nc)?)
}

fn j4_defect_of(p: &AnyonParams, raw: &[ComplexMatrix; 4]) -> Result<f64, ModelError> {
    let [a, b, e, _] = raw;
    let product = *e * *b * *a * *b * *e;
    Ok(linalg::frobenius_distance(&product, &j4_expected(p)?)?)
}

/// `‖b₃ b₂ (b₁)² b₂ b₃ − J₄‖_F` for the given R-symbols.
pub fn j4_defect_with(p: &AnyonParams, r: RSymbols) -> Result<f64, ModelError> {
    j4_defect_of(p, &two_qubit_raw(p, r)?)
}

pub fn j4_defect(p: &AnyonParams) -> Result<f64, ModelError> {
    j4_defect_with(p, RSymbols::default())
}

/// Two-qubit alphabet `{A..H} = {(b₁)², b₂, (b₁)²⁻¹, b₂⁻¹, b₃, b₄, b₃⁻¹, b₄⁻¹}`.
pub fn two_qubit_generators(p: &AnyonParams) -> Result<GeneratorSet, ModelError> {
    two_qubit_generators_with(p, RSymbols::default())
}

pub fn two_qubit_generators_with(p: &AnyonParams, r: RSymbols) -> Result<GeneratorSet, ModelError> {
    let raw = two_qubit_raw(p, r)?;
    let defect = j4_defect_of(p, &raw)?;
    if defect.is_nan() || defect > J4_TOLERANCE {
        return Err(ModelError::J4Defect(defect));
    }
    let [a, b, e, f] = raw;
    let matrices = vec![a, b, a.inverse()?, b.inverse()?, e, f, e.inverse()?, f.inverse()?];
    Ok(GeneratorSet {
        arity: Arity::Two,
        alpha: p.alpha(),
        matrices,
    })
}

/// Generators for the given arity.
pub fn generators(p: &AnyonParams, arity: Arity) -> Result<GeneratorSet, ModelError> {
    match arity {
        Arity::One => one_qubit_generators(p),
        Arity::Two => two_qubit_generators(p),
    }
}
