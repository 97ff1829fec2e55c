//! Subcommand bodies.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};

use anyon_core::anyon_model::{generators, j4_defect, Arity, GeneratorSet, ModelError};
use anyon_core::linalg::ComplexMatrix;
use anyon_core::metrics::{self, gates};
use anyon_core::search::{
    brute_force, evaluate, CNOT_CLASS_THRESHOLD, CNOT_LOW_ERROR, mc_search, substream_seed, Braidword, Objective, SearchConfig,
    SearchError, SearchResult,
};
use anyon_core::ska::{self, SkaError};
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::Alpha;
use crate::fixtures::{self, FixtureFile};
use crate::output::{self, num, opt_num};
use crate::{
    CliError, CnotArgs, EbmArgs, McArgs, Method, SkaArgs, SweepArgs, Target, VerifyArgs,
    WordEvalArgs,
};

pub const SWEEP_HEADER: [&str; 5] = ["alpha", "length", "target", "best_d", "best_word"];
pub const MC_HEADER: [&str; 8] = [
    "alpha",
    "length",
    "target",
    "seed",
    "run",
    "sweeps_used",
    "best_d",
    "best_word",
];
pub const CNOT_HEADER: [&str; 7] = ["alpha", "length", "du_cap", "d_cnot", "d_u", "word", "flag"];

/// Longest one-qubit brute-force length before a warning.
pub const SWEEP_WARN_LENGTH: usize = 13;
/// Longest two-qubit brute-force length accepted.
pub const CNOT_BF_MAX_LENGTH: usize = 7;
pub const SKA_MAX_LEVEL: usize = 4;

fn model_err(e: ModelError) -> CliError {
    match e {
        ModelError::AlphaOutOfRange(_) => CliError::Usage(e.to_string()),
        e => CliError::numeric(e),
    }
}

fn search_err(e: SearchError) -> CliError {
    match e {
        SearchError::InvalidConfig(_) | SearchError::UnknownLetter { .. } => {
            CliError::Usage(e.to_string())
        }
        e => CliError::numeric(e),
    }
}

fn ska_err(e: SkaError) -> CliError {
    match e {
        SkaError::Search(e) => search_err(e),
        e => CliError::numeric(e),
    }
}

fn generator_set(a: &Alpha, arity: Arity) -> Result<GeneratorSet, CliError> {
    generators(&a.params()?, arity).map_err(model_err)
}

fn one_qubit_target(t: Target) -> Result<ComplexMatrix, CliError> {
    match t {
        Target::H => Ok(gates::hadamard()),
        Target::T => Ok(gates::t_gate()),
        Target::CNOT => Err(CliError::Usage(
            "CNOT is a two-qubit target; use the cnot subcommand".into(),
        )),
    }
}

fn sorted_lengths(v: &[usize]) -> Result<Vec<usize>, CliError> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.is_empty() {
        return Err(CliError::Usage("no lengths given".into()));
    }
    Ok(v)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct EbmJson {
    alpha: f64,
    arity: u8,
    letters: BTreeMap<char, Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j4_defect: Option<f64>,
}

fn matrix_json(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    let n = m.dim();
    (0..n)
        .map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn ebm(a: &EbmArgs) -> Result<(), CliError> {
    let alpha = a.alpha.single()?;
    let p = alpha.params()?;
    let arity = Arity::try_from(a.arity).map_err(|e| CliError::Usage(e.to_string()))?;
    let g = generators(&p, arity).map_err(model_err)?;
    let j4 = match arity {
        Arity::Two => Some(j4_defect(&p).map_err(model_err)?),
        Arity::One => None,
    };
    let doc = EbmJson {
        alpha: alpha.value,
        arity: a.arity,
        letters: g.letters().map(|(c, m)| (c, matrix_json(m))).collect(),
        j4_defect: j4,
    };
    output::write_json(&a.out, &doc)?;
    output::write_manifest(&a.out, "ebm", a)
}

fn parts_dir(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".parts");
    PathBuf::from(s)
}

/// Completed rows of a partial file, keyed by length. A torn last line is dropped.
fn read_part(path: &Path, alpha_field: &str, target: &str) -> BTreeMap<usize, Vec<String>> {
    let mut done = BTreeMap::new();
    let Ok(mut r) = csv::Reader::from_path(path) else {
        return done;
    };
    for rec in r.records() {
        let Ok(rec) = rec else { break };
        if rec.len() != SWEEP_HEADER.len() || &rec[0] != alpha_field || &rec[2] != target {
            break;
        }
        let Ok(length) = rec[1].parse::<usize>() else {
            break;
        };
        if rec[4].len() != length || rec[3].parse::<f64>().is_err() {
            break;
        }
        done.insert(length, rec.iter().map(str::to_owned).collect());
    }
    done
}

fn sweep_alpha(
    alpha: &Alpha,
    lengths: &[usize],
    target: Target,
    parts: &Path,
) -> Result<Vec<Vec<String>>, CliError> {
    let alpha_field = num(alpha.value);
    let path = parts.join(format!("alpha_{alpha_field}.csv"));
    let mut done = read_part(&path, &alpha_field, target.name());
    let kept: Vec<Vec<String>> = done.values().cloned().collect();
    output::write_csv(&path, &SWEEP_HEADER, &kept)?;

    let todo: Vec<usize> = lengths
        .iter()
        .copied()
        .filter(|l| !done.contains_key(l))
        .collect();
    if !todo.is_empty() {
        let g = generator_set(alpha, Arity::One)?;
        let objective = Objective::OneQubit {
            target: one_qubit_target(target)?,
        };
        let file = OpenOptions::new()
            .append(true)
            .open(&path)
            .map_err(|e| CliError::io(&path, e))?;
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(file);
        for length in todo {
            let cfg = SearchConfig {
                length,
                tolerance: f64::MIN_POSITIVE,
                max_sweeps: 1,
                seed: 0,
                objective: objective.clone(),
            };
            let r = brute_force(&g, &cfg).map_err(search_err)?;
            let row = vec![
                alpha_field.clone(),
                length.to_string(),
                target.name().to_owned(),
                num(r.best_score),
                r.best_word.to_string(),
            ];
            w.write_record(&row).map_err(|e| CliError::io(&path, e))?;
            w.flush().map_err(|e| CliError::io(&path, e))?;
            done.insert(length, row);
        }
    }
    Ok(lengths.iter().map(|l| done[l].clone()).collect())
}

pub fn sweep(a: &SweepArgs) -> Result<(), CliError> {
    if a.method != Method::Bf {
        return Err(CliError::Usage("sweep supports --method bf only".into()));
    }
    one_qubit_target(a.target)?;
    let alphas = a.alpha.resolve()?;
    for al in &alphas {
        al.params()?;
    }
    let lengths = sorted_lengths(&a.lengths)?;
    if lengths.iter().any(|&l| l > SWEEP_WARN_LENGTH) {
        eprintln!("warning: brute force beyond L = {SWEEP_WARN_LENGTH} is a long job");
    }
    let parts = parts_dir(&a.out);
    fs::create_dir_all(&parts).map_err(|e| CliError::io(&parts, e))?;
    let per_alpha = alphas
        .par_iter()
        .map(|al| sweep_alpha(al, &lengths, a.target, &parts))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<String>> = per_alpha.into_iter().flatten().collect();
    output::write_csv(&a.out, &SWEEP_HEADER, &rows)?;
    output::write_manifest(&a.out, "sweep", a)?;
    fs::remove_dir_all(&parts).map_err(|e| CliError::io(&parts, e))
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn check_runs(runs: usize) -> Result<(), CliError> {
    if runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    Ok(())
}

pub fn mc(a: &McArgs) -> Result<(), CliError> {
    check_runs(a.mc.runs)?;
    let target = one_qubit_target(a.target)?;
    let alphas = a.alpha.resolve()?;
    let mut rows = Vec::new();
    for al in &alphas {
        let g = generator_set(al, Arity::One)?;
        let results = (0..a.mc.runs as u64)
            .into_par_iter()
            .map(|run| {
                let cfg = SearchConfig {
                    length: a.length,
                    tolerance: a.mc.tol,
                    max_sweeps: a.mc.num,
                    seed: substream_seed(a.mc.seed, run),
                    objective: Objective::OneQubit { target },
                };
                mc_search(&g, &cfg)
            })
            .collect::<Result<Vec<SearchResult>, _>>()
            .map_err(search_err)?;
        for (run, r) in results.iter().enumerate() {
            rows.push(vec![
                num(al.value),
                a.length.to_string(),
                a.target.name().to_owned(),
                r.seed.to_string(),
                run.to_string(),
                r.sweeps_used.to_string(),
                num(r.best_score),
                r.best_word.to_string(),
            ]);
        }
        let best = results
            .iter()
            .reduce(|x, y| if y.best_score < x.best_score { y } else { x })
            .expect("runs >= 1");
        rows.push(vec![
            num(al.value),
            a.length.to_string(),
            a.target.name().to_owned(),
            a.mc.seed.to_string(),
            "min".to_owned(),
            String::new(),
            num(best.best_score),
            best.best_word.to_string(),
        ]);
        let mut scores: Vec<f64> = results.iter().map(|r| r.best_score).collect();
        eprintln!(
            "alpha {} {} L={}: min {:.8} median {:.8} over {} runs",
            al.value,
            a.target.name(),
            a.length,
            best.best_score,
            median(&mut scores),
            results.len()
        );
    }
    emit(a.out.as_deref(), &output::csv_string(&MC_HEADER, &rows))?;
    if let Some(out) = &a.out {
        output::write_manifest(out, "mc", a)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SkaLevelJson {
    pub n: usize,
    pub d: f64,
    pub word_length: usize,
    pub word: String,
}

#[derive(Debug, Serialize)]
pub struct SkaJson {
    pub target: &'static str,
    pub alpha: f64,
    pub level: usize,
    pub base_length: usize,
    pub seed: u64,
    pub num: usize,
    pub tol: f64,
    pub restarts: usize,
    pub levels: Vec<SkaLevelJson>,
}

pub fn ska(a: &SkaArgs) -> Result<(), CliError> {
    if a.level > SKA_MAX_LEVEL {
        return Err(CliError::Usage(format!(
            "--level is limited to {SKA_MAX_LEVEL}"
        )));
    }
    check_runs(a.mc.runs)?;
    let alpha = a.alpha.single()?;
    let target = one_qubit_target(a.target)?;
    let g = generator_set(&alpha, Arity::One)?;
    let cfg = SearchConfig {
        length: a.length,
        tolerance: a.mc.tol,
        max_sweeps: a.mc.num,
        seed: a.mc.seed,
        objective: Objective::OneQubit { target },
    };
    let trace =
        ska::mc_enhanced_ska_with(&target, a.level, &g, &cfg, a.mc.runs).map_err(ska_err)?;
    let doc = SkaJson {
        target: a.target.name(),
        alpha: alpha.value,
        level: a.level,
        base_length: a.length,
        seed: a.mc.seed,
        num: a.mc.num,
        tol: a.mc.tol,
        restarts: a.mc.runs,
        levels: trace
            .levels
            .iter()
            .map(|l| SkaLevelJson {
                n: l.level,
                d: l.distance,
                word_length: l.length,
                word: l.word.to_string(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    emit(a.out.as_deref(), &text)?;
    if let Some(out) = &a.out {
        output::write_manifest(out, "ska", a)?;
    }
    Ok(())
}

fn cnot_cell(
    g: &GeneratorSet,
    length: usize,
    du_cap: f64,
    method: Method,
    mc: &crate::McOptions,
) -> Result<Option<SearchResult>, CliError> {
    let cfg = |seed| SearchConfig {
        length,
        tolerance: mc.tol,
        max_sweeps: mc.num,
        seed,
        objective: Objective::CnotClass { du_cap },
    };
    match method {
        Method::Bf => match brute_force(g, &cfg(mc.seed)) {
            Ok(r) => Ok(Some(r)),
            Err(SearchError::Infeasible(_)) => Ok(None),
            Err(e) => Err(search_err(e)),
        },
        Method::Mc => {
            let best = (0..mc.runs as u64)
                .into_par_iter()
                .map(|run| mc_search(g, &cfg(substream_seed(mc.seed, run))))
                .collect::<Result<Vec<_>, _>>()
                .map_err(search_err)?
                .into_iter()
                .reduce(|x, y| if y.best_score < x.best_score { y } else { x })
                .expect("runs >= 1");
            Ok(best.best_score.is_finite().then_some(best))
        }
    }
}

/// `low_error` below 1e-10, `infeasible` when the class is not reached.
pub fn cnot_flag(d_cnot: f64) -> &'static str {
    if d_cnot < CNOT_LOW_ERROR {
        "low_error"
    } else if d_cnot < CNOT_CLASS_THRESHOLD {
        ""
    } else {
        "infeasible"
    }
}

pub fn cnot(a: &CnotArgs) -> Result<(), CliError> {
    check_runs(a.mc.runs)?;
    let lengths = sorted_lengths(&a.lengths)?;
    if a.method == Method::Bf && lengths.iter().any(|&l| l > CNOT_BF_MAX_LENGTH) {
        return Err(CliError::Usage(format!(
            "two-qubit brute force is limited to L <= {CNOT_BF_MAX_LENGTH}"
        )));
    }
    if a.du_cap.iter().any(|c| !(*c >= 0.0)) {
        return Err(CliError::Usage("--du-cap must be non-negative".into()));
    }
    let mut caps = a.du_cap.clone();
    caps.sort_by(f64::total_cmp);
    caps.dedup();
    let alphas = a.alpha.resolve()?;
    let mut rows = Vec::new();
    for al in &alphas {
        let g = generator_set(al, Arity::Two)?;
        for &length in &lengths {
            for &cap in &caps {
                let r = cnot_cell(&g, length, cap, a.method, &a.mc)?;
                rows.push(match r {
                    Some(r) => vec![
                        num(al.value),
                        length.to_string(),
                        num(cap),
                        num(r.best_score),
                        opt_num(r.d_u),
                        r.best_word.to_string(),
                        cnot_flag(r.best_score).to_owned(),
                    ],
                    None => vec![
                        num(al.value),
                        length.to_string(),
                        num(cap),
                        String::new(),
                        String::new(),
                        String::new(),
                        "infeasible".to_owned(),
                    ],
                });
            }
        }
    }
    emit(a.out.as_deref(), &output::csv_string(&CNOT_HEADER, &rows))?;
    if let Some(out) = &a.out {
        output::write_manifest(out, "cnot", a)?;
    }
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let file = match &a.fixtures {
        Some(p) => FixtureFile::load(p)?,
        None => FixtureFile::shipped(),
    };
    let report = fixtures::verify(&file)?;
    print!("{}", report.render());
    if report.all_pass() {
        Ok(())
    } else {
        Err(CliError::FixtureFailure)
    }
}

pub fn word_eval(a: &WordEvalArgs) -> Result<(), CliError> {
    let alpha = a.alpha.single()?;
    let two_qubit = a.target == Some(Target::CNOT)
        || (a.target.is_none() && a.word.parse::<Braidword>().is_ok_and(|w| w.arity() == Arity::Two));
    let arity = if two_qubit { Arity::Two } else { Arity::One };
    let word = Braidword::parse(&a.word, arity).map_err(search_err)?;
    let g = generator_set(&alpha, arity)?;
    let m = evaluate(&word, &g).map_err(search_err)?;
    if two_qubit {
        let (block, _) = metrics::computational_block(&m).map_err(CliError::numeric)?;
        let d_cnot = metrics::cnot_class_distance(&block).map_err(CliError::numeric)?;
        let d_u = metrics::unitarity_measure(&block).map_err(CliError::numeric)?;
        println!("{},{}", num(d_cnot), num(d_u));
    } else {
        let target = one_qubit_target(a.target.unwrap_or(Target::H))?;
        let d = metrics::phase_distance(&m, &target).map_err(CliError::numeric)?;
        println!("{}", num(d));
    }
    Ok(())
}
