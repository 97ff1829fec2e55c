//! Published braid words and the values they must reproduce.

use std::fmt;
use std::path::Path;

use anyon_core::anyon_model::{generators, AnyonParams, Arity};
use anyon_core::metrics::{self, gates};
use anyon_core::search::{evaluate, Braidword};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// The fixture file shipped with the crate.
pub const SHIPPED: &str = include_str!("../fixtures/tables.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Table {
    I,
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixtureTarget {
    H,
    T,
    CNOT,
}

fn default_d_cnot_tolerance() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub table: Table,
    pub alpha: f64,
    pub target: FixtureTarget,
    pub word: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_d_cnot: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_d_u: Option<f64>,
    /// Absolute tolerance on `d` (one-qubit) or `d^U` (two-qubit).
    pub tolerance: f64,
    /// Absolute tolerance on `d^CNOT`.
    #[serde(default = "default_d_cnot_tolerance")]
    pub d_cnot_tolerance: f64,
    /// Reported but never counted as a failure.
    #[serde(default)]
    pub informational: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureFile {
    pub fixtures: Vec<FixtureRecord>,
}

impl FixtureFile {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::Usage(format!("fixture file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let s = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&s)
    }

    pub fn shipped() -> Self {
        Self::parse(SHIPPED).expect("shipped fixtures parse")
    }
}

/// Word-to-matrix composition order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convention {
    /// `m₁…mₙ ↦ M(mₙ)···M(m₁)`, the order used throughout the library.
    FirstLetterFirst,
    /// `m₁…mₙ ↦ M(m₁)···M(mₙ)`.
    LastLetterFirst,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::FirstLetterFirst => "first-letter-first",
            Convention::LastLetterFirst => "last-letter-first",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Measured {
    OneQubit { d: f64 },
    TwoQubit { d_cnot: f64, d_u: f64 },
}

impl fmt::Display for Measured {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measured::OneQubit { d } => write!(f, "d={d:.8}"),
            Measured::TwoQubit { d_cnot, d_u } => write!(f, "d_cnot={d_cnot:.3e} d_u={d_u:.5}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureOutcome {
    pub record: FixtureRecord,
    pub forward: Measured,
    pub reversed: Measured,
    pub pass_forward: bool,
    pub pass_reversed: bool,
}

impl FixtureOutcome {
    pub fn passes(&self, c: Convention) -> bool {
        match c {
            Convention::FirstLetterFirst => self.pass_forward,
            Convention::LastLetterFirst => self.pass_reversed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub outcomes: Vec<FixtureOutcome>,
    /// Conventions under which every non-informational fixture passes.
    pub conventions: Vec<Convention>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        !self.conventions.is_empty()
    }

    /// The matching convention when exactly one matches.
    pub fn unique_convention(&self) -> Option<Convention> {
        match self.conventions.as_slice() {
            [c] => Some(*c),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        if self.outcomes.is_empty() {
            s.push_str("warning: 0 fixtures\n");
        }
        for o in &self.outcomes {
            let r = &o.record;
            let status = match (o.record.informational, o.pass_forward || o.pass_reversed) {
                (true, _) => "INFO",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            s.push_str(&format!(
                "{status} table {:?} {:?} alpha={} L={} | {}: {} ({}) | {}: {} ({})\n",
                r.table,
                r.target,
                r.alpha,
                r.word.len(),
                Convention::FirstLetterFirst,
                o.forward,
                if o.pass_forward { "match" } else { "no match" },
                Convention::LastLetterFirst,
                o.reversed,
                if o.pass_reversed { "match" } else { "no match" },
            ));
        }
        let summary = match self.conventions.as_slice() {
            [] => "no single convention reproduces every fixture".to_string(),
            [c] => format!("convention: {c}"),
            _ => "convention: ambiguous, both orders reproduce every fixture".to_string(),
        };
        s.push_str(&summary);
        s.push('\n');
        s
    }
}

fn measure(r: &FixtureRecord, word: &Braidword) -> Result<Measured, CliError> {
    let p = AnyonParams::new(r.alpha).map_err(|e| CliError::Usage(e.to_string()))?;
    let g = generators(&p, word.arity()).map_err(CliError::numeric)?;
    let m = evaluate(word, &g).map_err(CliError::numeric)?;
    match r.target {
        FixtureTarget::H | FixtureTarget::T => {
            let t = if r.target == FixtureTarget::H {
                gates::hadamard()
            } else {
                gates::t_gate()
            };
            Ok(Measured::OneQubit {
                d: metrics::phase_distance(&m, &t).map_err(CliError::numeric)?,
            })
        }
        FixtureTarget::CNOT => {
            let (a, _) = metrics::computational_block(&m).map_err(CliError::numeric)?;
            Ok(Measured::TwoQubit {
                d_cnot: metrics::cnot_class_distance(&a).map_err(CliError::numeric)?,
                d_u: metrics::unitarity_measure(&a).map_err(CliError::numeric)?,
            })
        }
    }
}

fn matches(r: &FixtureRecord, m: &Measured) -> bool {
    match *m {
        Measured::OneQubit { d } => r.expected_d.is_some_and(|e| (d - e).abs() <= r.tolerance),
        Measured::TwoQubit { d_cnot, d_u } => {
            r.expected_d_cnot
                .is_some_and(|e| (d_cnot - e).abs() <= r.d_cnot_tolerance)
                && r.expected_d_u.is_some_and(|e| (d_u - e).abs() <= r.tolerance)
        }
    }
}

pub fn verify_record(r: &FixtureRecord) -> Result<FixtureOutcome, CliError> {
    let arity = match r.target {
        FixtureTarget::CNOT => Arity::Two,
        _ => Arity::One,
    };
    let word = Braidword::parse(&r.word, arity).map_err(|e| CliError::Usage(e.to_string()))?;
    let rev = Braidword::from_indices(arity, word.indices().iter().rev().copied().collect());
    let forward = measure(r, &word)?;
    let reversed = measure(r, &rev)?;
    Ok(FixtureOutcome {
        pass_forward: matches(r, &forward),
        pass_reversed: matches(r, &reversed),
        record: r.clone(),
        forward,
        reversed,
    })
}

pub fn verify(file: &FixtureFile) -> Result<VerifyReport, CliError> {
    let outcomes = file
        .fixtures
        .iter()
        .map(verify_record)
        .collect::<Result<Vec<_>, _>>()?;
    let conventions = [Convention::FirstLetterFirst, Convention::LastLetterFirst]
        .into_iter()
        .filter(|&c| {
            outcomes
                .iter()
                .filter(|o| !o.record.informational)
                .all(|o| o.passes(c))
        })
        .collect();
    Ok(VerifyReport {
        outcomes,
        conventions,
    })
}
