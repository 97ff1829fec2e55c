//! Braid words and the two searches over them: exhaustive enumeration and
//! the position-sweep Monte Carlo walk.
//!
//! Composition convention: the first letter is applied first, so the word
//! `m₁m₂…mₙ` evaluates to `M(mₙ)···M(m₂)·M(m₁)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::anyon_model::{Arity, GeneratorSet};
use crate::linalg::ComplexMatrix;
use crate::metrics::{self, MetricError};

/// `d^CNOT` below which a word counts as reaching the [CNOT] class.
pub const CNOT_CLASS_THRESHOLD: f64 = 1e-9;
/// `d^CNOT` below which an approximation is flagged as low-error.
pub const CNOT_LOW_ERROR: f64 = 1e-10;

/// Per-run seed increment (64-bit golden ratio).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of the `index`-th independent run derived from a master seed.
pub fn substream_seed(master: u64, index: u64) -> u64 {
    master ^ GOLDEN_GAMMA.wrapping_mul(index)
}

/// The generator used by every seeded routine. ChaCha8 output is fixed by
/// its specification, so runs reproduce across platforms.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("letter '{letter}' is not in the {qubits}-qubit alphabet")]
    UnknownLetter { letter: char, qubits: u8 },
    #[error("word arity does not match the generator set")]
    ArityMismatch,
    #[error("infeasible under unitarity cap {0}")]
    Infeasible(f64),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A sequence of generator letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Braidword {
    arity: Arity,
    letters: Vec<u8>,
}

impl Braidword {
    pub fn empty(arity: Arity) -> Self {
        Self {
            arity,
            letters: Vec::new(),
        }
    }

    pub fn parse(s: &str, arity: Arity) -> Result<Self, SearchError> {
        let letters = s
            .chars()
            .map(|ch| {
                arity
                    .index_of(ch)
                    .map(|i| i as u8)
                    .ok_or(SearchError::UnknownLetter {
                        letter: ch,
                        qubits: arity.qubits(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { arity, letters })
    }

    /// Builds a word from alphabet indices. Panics on an out-of-range index.
    pub fn from_indices(arity: Arity, letters: Vec<u8>) -> Self {
        assert!(letters.iter().all(|&l| (l as usize) < arity.letter_count()));
        Self { arity, letters }
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn indices(&self) -> &[u8] {
        &self.letters
    }

    /// Concatenation; `self` is applied first.
    pub fn then(&self, other: &Braidword) -> Braidword {
        assert_eq!(self.arity, other.arity);
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Braidword {
            arity: self.arity,
            letters,
        }
    }

    /// Whether any adjacent pair is a letter followed by its inverse.
    pub fn has_adjacent_inverse(&self) -> bool {
        self.letters
            .windows(2)
            .any(|w| Arity::inverse_index(w[0] as usize) == w[1] as usize)
    }
}

impl fmt::Display for Braidword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", self.arity.letter(l as usize))?;
        }
        Ok(())
    }
}

impl FromStr for Braidword {
    type Err = SearchError;

    /// Infers the arity: one-qubit unless a letter beyond `D` appears.
    fn from_str(s: &str) -> Result<Self, SearchError> {
        let arity = if s.chars().all(|c| Arity::One.index_of(c).is_some()) {
            Arity::One
        } else {
            Arity::Two
        };
        Braidword::parse(s, arity)
    }
}

/// Evaluates a word; the empty word is the identity.
pub fn evaluate(w: &Braidword, g: &GeneratorSet) -> Result<ComplexMatrix, SearchError> {
    if w.arity != g.arity() {
        return Err(SearchError::ArityMismatch);
    }
    let mut m = ComplexMatrix::identity(g.dim()).expect("generator dims are valid");
    for &l in &w.letters {
        m = *g.by_index(l as usize) * m;
    }
    Ok(m)
}

/// Reversed word with every letter replaced by its inverse partner.
pub fn word_inverse(w: &Braidword) -> Braidword {
    Braidword {
        arity: w.arity,
        letters: w
            .letters
            .iter()
            .rev()
            .map(|&l| Arity::inverse_index(l as usize) as u8)
            .collect(),
    }
}

/// What a search minimises.
#[derive(Debug, Clone)]
pub enum Objective {
    /// Phase-invariant distance to a 2×2 target.
    OneQubit { target: ComplexMatrix },
    /// Distance of the computational block to the [CNOT] class, subject to `d^U ≤ du_cap`.
    CnotClass { du_cap: f64 },
}

/// Score of one candidate. `None` marks a candidate that cannot enter the ranking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub value: f64,
    pub d_u: Option<f64>,
}

impl Objective {
    pub fn arity(&self) -> Arity {
        match self {
            Objective::OneQubit { .. } => Arity::One,
            Objective::CnotClass { .. } => Arity::Two,
        }
    }

    /// Scores an evaluated braid matrix.
    pub fn score(&self, m: &ComplexMatrix) -> Option<Score> {
        match self {
            Objective::OneQubit { target } => metrics::phase_distance(m, target)
                .ok()
                .map(|value| Score { value, d_u: None }),
            Objective::CnotClass { du_cap } => {
                let (a, _) = metrics::computational_block(m).ok()?;
                let d_u = metrics::unitarity_measure(&a).ok()?;
                if d_u > *du_cap {
                    return None;
                }
                let value = metrics::cnot_class_distance(&a).ok()?;
                Some(Score {
                    value,
                    d_u: Some(d_u),
                })
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub length: usize,
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub seed: u64,
    pub objective: Objective,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.length == 0 {
            return Err(SearchError::InvalidConfig("length must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(SearchError::InvalidConfig("tolerance must be positive"));
        }
        if self.max_sweeps == 0 {
            return Err(SearchError::InvalidConfig("max_sweeps must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_word: Braidword,
    pub best_score: f64,
    pub d_u: Option<f64>,
    pub evaluations: u64,
    pub sweeps_used: usize,
    pub seed: u64,
    /// Best score after initialisation and after each completed sweep.
    pub history: Vec<f64>,
}

/// Best-so-far candidate with lexicographic tie-break on the word.
#[derive(Debug, Clone)]
struct Best {
    score: Score,
    letters: Vec<u8>,
}

fn better(a: &Best, b: &Best) -> bool {
    match a.score.value.total_cmp(&b.score.value) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.letters < b.letters,
    }
}

fn pick(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if better(&y, &x) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Depth-first enumeration of reduced words below a fixed prefix.
struct Enumerator<'a> {
    g: &'a GeneratorSet,
    objective: &'a Objective,
    length: usize,
    prune: bool,
    letters: Vec<u8>,
    best: Option<Best>,
    evaluations: u64,
}

impl Enumerator<'_> {
    fn descend(&mut self, m: &ComplexMatrix) {
        if self.letters.len() == self.length {
            self.evaluations += 1;
            if let Some(score) = self.objective.score(m) {
                let cand = Best {
                    score,
                    letters: self.letters.clone(),
                };
                if self.best.as_ref().is_none_or(|b| better(&cand, b)) {
                    self.best = Some(cand);
                }
            }
            return;
        }
        for l in 0..self.g.len() {
            if self.prune {
                if let Some(&last) = self.letters.last() {
                    if Arity::inverse_index(last as usize) == l {
                        continue;
                    }
                }
            }
            let next = *self.g.by_index(l) * *m;
            self.letters.push(l as u8);
            self.descend(&next);
            self.letters.pop();
        }
    }
}

fn enumerate_prefix(
    g: &GeneratorSet,
    objective: &Objective,
    length: usize,
    prune: bool,
    prefix: &[u8],
) -> (Option<Best>, u64) {
    let w = Braidword::from_indices(g.arity(), prefix.to_vec());
    if prune && w.has_adjacent_inverse() {
        return (None, 0);
    }
    let m = evaluate(&w, g).expect("arity checked by caller");
    let mut e = Enumerator {
        g,
        objective,
        length,
        prune,
        letters: prefix.to_vec(),
        best: None,
        evaluations: 0,
    };
    e.descend(&m);
    (e.best, e.evaluations)
}

fn prefixes(count: usize, depth: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..depth {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..count as u8).map(move |l| {
                    let mut q = p.clone();
                    q.push(l);
                    q
                })
            })
            .collect();
    }
    out
}

/// Whether a [CNOT]-class search result reaches the class under its cap.
pub fn cnot_feasible(r: &Result<SearchResult, SearchError>) -> bool {
    matches!(r, Ok(res) if res.best_score < CNOT_CLASS_THRESHOLD)
}

/// Execution mode for [`brute_force_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Serial,
    Parallel,
}

/// Exact minimiser over all reduced words of length `cfg.length`.
///
/// Words containing a letter next to its inverse equal shorter words and are
/// skipped. Ties go to the lexicographically smallest word (alphabet order).
pub fn brute_force(g: &GeneratorSet, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    brute_force_with(g, cfg, true, Parallelism::Parallel)
}

/// [`brute_force`] with explicit pruning and scheduling choices.
pub fn brute_force_with(
    g: &GeneratorSet,
    cfg: &SearchConfig,
    prune: bool,
    mode: Parallelism,
) -> Result<SearchResult, SearchError> {
    if g.arity() != cfg.objective.arity() {
        return Err(SearchError::ArityMismatch);
    }
    let length = cfg.length;
    let depth = length.min(2);
    let roots = prefixes(g.len(), depth);
    let run = |p: &Vec<u8>| enumerate_prefix(g, &cfg.objective, length, prune, p);
    let (best, evaluations) = match mode {
        Parallelism::Serial => roots
            .iter()
            .map(run)
            .fold((None, 0), |(b, n), (c, k)| (pick(b, c), n + k)),
        Parallelism::Parallel => roots
            .par_iter()
            .map(run)
            .collect::<Vec<_>>()
            .into_iter()
            .fold((None, 0), |(b, n), (c, k)| (pick(b, c), n + k)),
    };
    let best = best.ok_or(match cfg.objective {
        Objective::CnotClass { du_cap } => SearchError::Infeasible(du_cap),
        Objective::OneQubit { .. } => SearchError::InvalidConfig("no candidate words"),
    })?;
    Ok(SearchResult {
        best_word: Braidword::from_indices(g.arity(), best.letters),
        best_score: best.score.value,
        d_u: best.score.d_u,
        evaluations,
        sweeps_used: 0,
        seed: cfg.seed,
        history: vec![best.score.value],
    })
}

/// Probability of accepting a move from score `d` to `d_prime`.
///
/// With `Δ = |d′ − d|` and `T = 10^⌊log₁₀ Δ⌋`, `p = min(1, e^{−Δ/T})`; `Δ = 0` gives 1.
pub fn acceptance_probability(d: f64, d_prime: f64) -> f64 {
    let delta = (d_prime - d).abs();
    if delta == 0.0 {
        return 1.0;
    }
    if !delta.is_finite() {
        return 0.0;
    }
    let temperature = 10f64.powf(delta.log10().floor());
    (-delta / temperature).exp().min(1.0)
}

/// Monte Carlo local search over words of fixed length.
///
/// Each sweep visits positions left to right. At a position the other
/// letters are tried in alphabet order; an improvement is taken and the
/// sweep moves on, a worsening move is taken with
/// [`acceptance_probability`]. The run stops as soon as the best score drops
/// below `cfg.tolerance`, or after `cfg.max_sweeps` sweeps.
pub fn mc_search(g: &GeneratorSet, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    cfg.validate()?;
    if g.arity() != cfg.objective.arity() {
        return Err(SearchError::ArityMismatch);
    }
    let n = cfg.length;
    let k = g.len();
    let mut rng = rng_from_seed(cfg.seed);
    let mut word: Vec<u8> = (0..n).map(|_| rng.random_range(0..k) as u8).collect();

    let score_of = |m: &ComplexMatrix| -> (f64, Option<f64>) {
        match cfg.objective.score(m) {
            Some(s) => (s.value, s.d_u),
            None => (f64::INFINITY, None),
        }
    };

    let dim = g.dim();
    let identity = ComplexMatrix::identity(dim).expect("valid dim");
    let full = |w: &[u8]| {
        w.iter()
            .fold(identity, |m, &l| *g.by_index(l as usize) * m)
    };

    let (mut d, mut du) = score_of(&full(&word));
    let mut evaluations = 1u64;
    let mut best_d = d;
    let mut best_du = du;
    let mut best_word = word.clone();
    let mut history = vec![best_d];

    let finish = |best_word: Vec<u8>, best_d: f64, best_du, evaluations, sweeps_used, history| {
        SearchResult {
            best_word: Braidword::from_indices(g.arity(), best_word),
            best_score: best_d,
            d_u: best_du,
            evaluations,
            sweeps_used,
            seed: cfg.seed,
            history,
        }
    };

    if best_d < cfg.tolerance {
        return Ok(finish(best_word, best_d, best_du, evaluations, 0, history));
    }

    // suffix[l] = M(w_{n-1})···M(w_{l}) ; suffix[n] = I
    let mut suffix = vec![identity; n + 1];
    for sweep in 1..=cfg.max_sweeps {
        for l in (0..n).rev() {
            suffix[l] = suffix[l + 1] * *g.by_index(word[l] as usize);
        }
        // prefix = M(w_{l-1})···M(w_0), kept current as letters change
        let mut prefix = identity;
        for l in 0..n {
            let after = suffix[l + 1];
            for cand in 0..k as u8 {
                if cand == word[l] {
                    continue;
                }
                let m = after * *g.by_index(cand as usize) * prefix;
                let (d_new, du_new) = score_of(&m);
                evaluations += 1;
                let improved = d_new < d;
                let accept = if improved {
                    true
                } else if d_new.is_finite() {
                    rng.random::<f64>() < acceptance_probability(d, d_new)
                } else {
                    false
                };
                if !accept {
                    continue;
                }
                word[l] = cand;
                d = d_new;
                du = du_new;
                if d < best_d {
                    best_d = d;
                    best_du = du;
                    best_word.clone_from(&word);
                    if best_d < cfg.tolerance {
                        history.push(best_d);
                        return Ok(finish(best_word, best_d, best_du, evaluations, sweep, history));
                    }
                }
                if improved {
                    break;
                }
            }
            prefix = *g.by_index(word[l] as usize) * prefix;
        }
        history.push(best_d);
    }
    Ok(finish(
        best_word,
        best_d,
        best_du,
        evaluations,
        cfg.max_sweeps,
        history,
    ))
}
