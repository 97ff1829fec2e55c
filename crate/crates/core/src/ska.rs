//! SU(2) geometry, balanced group commutators and the recursive
//! Solovay–Kitaev compiler with a Monte Carlo base approximator.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::anyon_model::{Arity, GeneratorSet};
use crate::linalg::{adjoint, determinant, trace, ComplexMatrix};
use crate::metrics::{self, MetricError};
use crate::search::{self, substream_seed, word_inverse, Braidword, Objective, SearchConfig, SearchError};

/// Determinants below this modulus cannot be projected.
pub const SINGULAR_DET: f64 = 1e-12;
/// Allowed `|det − 1|` for inputs documented as special unitary.
pub const SU2_DET_TOLERANCE: f64 = 1e-10;
/// Bisection width for the commutator angle.
pub const BISECTION_TOLERANCE: f64 = 1e-14;
/// Memo keys round each entry to this resolution.
pub const MEMO_RESOLUTION: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkaError {
    #[error("matrix is near-singular: |det| = {0:e}")]
    NearSingular(f64),
    #[error("expected det = 1, got |det - 1| = {0:e}")]
    NotSpecialUnitary(f64),
    #[error("commutator angle overflow: rotation angle {0} is not below pi/2")]
    CommutatorAngleOverflow(f64),
    #[error("expected a 2x2 matrix, got {0}x{0}")]
    WrongDimension(usize),
    #[error("SKA needs a one-qubit generator set")]
    NotOneQubit,
    #[error("base approximator failed: {0}")]
    Base(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

fn expect_2x2(u: &ComplexMatrix) -> Result<(), SkaError> {
    if u.dim() != 2 {
        return Err(SkaError::WrongDimension(u.dim()));
    }
    Ok(())
}

/// `u / √det(u)` with the principal square root.
pub fn project_su2(u: &ComplexMatrix) -> Result<ComplexMatrix, SkaError> {
    expect_2x2(u)?;
    let det = determinant(u);
    if det.norm() <= SINGULAR_DET {
        return Err(SkaError::NearSingular(det.norm()));
    }
    Ok(u.scale(det.sqrt().inv()))
}

/// Rotation `cos(θ/2)·I − i·sin(θ/2)·(n·σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    pub axis: [f64; 3],
    pub angle: f64,
}

impl AxisAngle {
    pub fn to_matrix(&self) -> ComplexMatrix {
        from_axis_angle(self)
    }
}

fn check_su2(u: &ComplexMatrix) -> Result<(), SkaError> {
    expect_2x2(u)?;
    let off = (determinant(u) - 1.0).norm();
    if off > SU2_DET_TOLERANCE {
        return Err(SkaError::NotSpecialUnitary(off));
    }
    Ok(())
}

/// Half-angle cosine and the vector `sin(θ/2)·n` of an SU(2) matrix.
fn quaternion(u: &ComplexMatrix) -> (f64, [f64; 3]) {
    let (a, b, c, d) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let w = (a + d).re / 2.0;
    let x = -(b + c).im / 2.0;
    let y = (c - b).re / 2.0;
    let z = -(a - d).im / 2.0;
    (w, [x, y, z])
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Rotation angle in `[0, 2π]` of an SU(2) matrix.
fn su2_angle(u: &ComplexMatrix) -> f64 {
    let (w, v) = quaternion(u);
    2.0 * norm3(v).atan2(w)
}

/// Axis and angle of `u ∈ SU(2)`.
///
/// The angle is folded into `[0, π]`; when `Re Tr u < 0` the result
/// describes `−u`, which is the same rotation.
/// The identity gets the axis `ẑ`.
pub fn axis_angle(u: &ComplexMatrix) -> Result<AxisAngle, SkaError> {
    check_su2(u)?;
    let (mut w, mut v) = quaternion(u);
    if w < 0.0 {
        w = -w;
        v = v.map(|x| -x);
    }
    let s = norm3(v);
    if s == 0.0 {
        return Ok(AxisAngle {
            axis: [0.0, 0.0, 1.0],
            angle: 0.0,
        });
    }
    Ok(AxisAngle {
        axis: v.map(|x| x / s),
        angle: 2.0 * s.atan2(w),
    })
}

pub fn from_axis_angle(r: &AxisAngle) -> ComplexMatrix {
    let (s, c) = (r.angle / 2.0).sin_cos();
    let [x, y, z] = r.axis;
    ComplexMatrix::from_rows([
        [Complex64::new(c, -s * z), Complex64::new(-s * y, -s * x)],
        [Complex64::new(s * y, -s * x), Complex64::new(c, s * z)],
    ])
    .expect("2x2")
}

fn rotation(axis: [f64; 3], angle: f64) -> ComplexMatrix {
    from_axis_angle(&AxisAngle { axis, angle })
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Rotation taking unit vector `from` onto unit vector `to`.
fn align(from: [f64; 3], to: [f64; 3]) -> ComplexMatrix {
    let dot = (from[0] * to[0] + from[1] * to[1] + from[2] * to[2]).clamp(-1.0, 1.0);
    let c = cross(from, to);
    let s = norm3(c);
    if s < 1e-15 {
        if dot > 0.0 {
            return ComplexMatrix::identity(2).expect("2x2");
        }
        // antiparallel: half turn about any axis orthogonal to `from`
        let helper = if from[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let p = cross(from, helper);
        let n = norm3(p);
        return rotation(p.map(|x| x / n), PI);
    }
    rotation(c.map(|x| x / s), s.atan2(dot))
}

/// `sin(θ/2)` reached by the balanced commutator of two φ-rotations.
fn commutator_half_sine(phi: f64) -> f64 {
    let s = (phi / 2.0).sin().powi(2);
    2.0 * s * (1.0 - s * s).max(0.0).sqrt()
}

/// Group-commutator factors: `v·w·v†·w† = delta`.
///
/// `delta` must lie in SU(2) with rotation angle below `π/2`.
pub fn gc_decompose(delta: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix), SkaError> {
    check_su2(delta)?;
    let theta = su2_angle(delta);
    if theta >= FRAC_PI_2 {
        return Err(SkaError::CommutatorAngleOverflow(theta));
    }
    let i2 = ComplexMatrix::identity(2).expect("2x2");
    if theta == 0.0 {
        return Ok((i2, i2));
    }
    let goal = (theta / 2.0).sin();
    // f is increasing on [0, φ*] with f(φ*) = 1, sin²(φ*/2) = 1/√2
    let (mut lo, mut hi) = (0.0_f64, 2.0 * std::f64::consts::FRAC_1_SQRT_2.sqrt().asin());
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if commutator_half_sine(mid) < goal {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi = 0.5 * (lo + hi);
    let v0 = rotation([1.0, 0.0, 0.0], phi);
    let w0 = rotation([0.0, 1.0, 0.0], phi);
    let comm = v0 * w0 * adjoint(&v0) * adjoint(&w0);
    let from = axis_angle(&comm)?.axis;
    let to = axis_angle(delta)?.axis;
    let s = align(from, to);
    let sd = adjoint(&s);
    Ok((s * v0 * sd, s * w0 * sd))
}

/// Level-0 approximator: any SU(2) target to a word and its matrix.
pub trait Approximator {
    fn approximate(&mut self, target: &ComplexMatrix)
        -> Result<(Braidword, ComplexMatrix), SkaError>;
}

impl<F> Approximator for F
where
    F: FnMut(&ComplexMatrix) -> Result<(Braidword, ComplexMatrix), SkaError>,
{
    fn approximate(
        &mut self,
        target: &ComplexMatrix,
    ) -> Result<(Braidword, ComplexMatrix), SkaError> {
        self(target)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkaLevel {
    pub level: usize,
    pub matrix: ComplexMatrix,
    pub word: Braidword,
    pub length: usize,
    pub distance: f64,
}

/// Approximations of one target at levels `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkaTrace {
    pub levels: Vec<SkaLevel>,
}

impl SkaTrace {
    pub fn last(&self) -> &SkaLevel {
        self.levels.last().expect("trace has level 0")
    }

    pub fn distances(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.distance).collect()
    }
}

struct Approx {
    word: Braidword,
    matrix: ComplexMatrix,
}

fn sk_rec<A: Approximator>(
    target: &ComplexMatrix,
    n: usize,
    base: &mut A,
    chain: &mut Option<&mut Vec<Approx>>,
) -> Result<Approx, SkaError> {
    let target = project_su2(target)?;
    if n == 0 {
        let (word, matrix) = base.approximate(&target)?;
        let a = Approx { word, matrix };
        if let Some(c) = chain.as_deref_mut() {
            c.push(Approx {
                word: a.word.clone(),
                matrix: a.matrix,
            });
        }
        return Ok(a);
    }
    let prev = sk_rec(&target, n - 1, base, chain)?;
    let mut delta = target * adjoint(&project_su2(&prev.matrix)?);
    if trace(&delta).re < 0.0 {
        delta = delta.scale(Complex64::new(-1.0, 0.0));
    }
    let (v, w) = gc_decompose(&delta)?;
    let va = sk_rec(&v, n - 1, base, &mut None)?;
    let wa = sk_rec(&w, n - 1, base, &mut None)?;
    let matrix = va.matrix * wa.matrix * adjoint(&va.matrix) * adjoint(&wa.matrix) * prev.matrix;
    let word = prev
        .word
        .then(&word_inverse(&wa.word))
        .then(&word_inverse(&va.word))
        .then(&wa.word)
        .then(&va.word);
    let a = Approx { word, matrix };
    if let Some(c) = chain.as_deref_mut() {
        c.push(Approx {
            word: a.word.clone(),
            matrix: a.matrix,
        });
    }
    Ok(a)
}

/// Recursive Solovay–Kitaev approximation of `target` to level `n`.
///
/// `Uₙ = Vₙ₋₁·Wₙ₋₁·Vₙ₋₁†·Wₙ₋₁†·Uₙ₋₁`; the word is built so that
/// [`search::evaluate`] reproduces this product.
pub fn solovay_kitaev<A: Approximator>(
    target: &ComplexMatrix,
    n: usize,
    base: &mut A,
) -> Result<SkaTrace, SkaError> {
    expect_2x2(target)?;
    let mut chain = Vec::with_capacity(n + 1);
    sk_rec(target, n, base, &mut Some(&mut chain))?;
    let levels = chain
        .into_iter()
        .enumerate()
        .map(|(level, a)| {
            Ok(SkaLevel {
                level,
                distance: metrics::phase_distance(&a.matrix, target)?,
                length: a.word.len(),
                matrix: a.matrix,
                word: a.word,
            })
        })
        .collect::<Result<Vec<_>, SkaError>>()?;
    Ok(SkaTrace { levels })
}

fn memo_key(m: &ComplexMatrix) -> [i64; 8] {
    let mut k = [0i64; 8];
    for (i, z) in m.entries().iter().enumerate() {
        k[2 * i] = (z.re / MEMO_RESOLUTION).round() as i64;
        k[2 * i + 1] = (z.im / MEMO_RESOLUTION).round() as i64;
    }
    k
}

/// Memoised best-of-`restarts` [`search::mc_search`] base.
///
/// Each fresh target consumes the next substream of `cfg.seed`; restart `r`
/// of that invocation uses substream `r` of the invocation seed.
pub struct McBase<'a> {
    g: &'a GeneratorSet,
    cfg: SearchConfig,
    restarts: usize,
    invocations: u64,
    memo: HashMap<[i64; 8], (Braidword, ComplexMatrix)>,
}

impl<'a> McBase<'a> {
    pub fn new(g: &'a GeneratorSet, cfg: SearchConfig, restarts: usize) -> Result<Self, SkaError> {
        if g.arity() != Arity::One {
            return Err(SkaError::NotOneQubit);
        }
        if restarts == 0 {
            return Err(SkaError::Base("restarts must be at least 1".into()));
        }
        Ok(Self {
            g,
            cfg,
            restarts,
            invocations: 0,
            memo: HashMap::new(),
        })
    }

    /// Number of distinct targets sent to the Monte Carlo search.
    pub fn invocations(&self) -> u64 {
        self.invocations
    }
}

impl Approximator for McBase<'_> {
    fn approximate(
        &mut self,
        target: &ComplexMatrix,
    ) -> Result<(Braidword, ComplexMatrix), SkaError> {
        let key = memo_key(target);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let seed = substream_seed(self.cfg.seed, self.invocations);
        self.invocations += 1;
        let runs = (0..self.restarts as u64)
            .into_par_iter()
            .map(|r| {
                let cfg = SearchConfig {
                    seed: substream_seed(seed, r),
                    objective: Objective::OneQubit { target: *target },
                    ..self.cfg.clone()
                };
                search::mc_search(self.g, &cfg)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let best = runs
            .into_iter()
            .reduce(|a, b| if b.best_score < a.best_score { b } else { a })
            .expect("restarts >= 1");
        let matrix = search::evaluate(&best.best_word, self.g)?;
        let out = (best.best_word, matrix);
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// [`solovay_kitaev`] with a single-run Monte Carlo base.
pub fn mc_enhanced_ska(
    target: &ComplexMatrix,
    n: usize,
    g: &GeneratorSet,
    base_cfg: &SearchConfig,
) -> Result<SkaTrace, SkaError> {
    mc_enhanced_ska_with(target, n, g, base_cfg, 1)
}

/// [`solovay_kitaev`] whose base keeps the best of `restarts` Monte Carlo runs.
pub fn mc_enhanced_ska_with(
    target: &ComplexMatrix,
    n: usize,
    g: &GeneratorSet,
    base_cfg: &SearchConfig,
    restarts: usize,
) -> Result<SkaTrace, SkaError> {
    base_cfg.validate()?;
    let mut base = McBase::new(g, base_cfg.clone(), restarts)?;
    solovay_kitaev(target, n, &mut base)
}
