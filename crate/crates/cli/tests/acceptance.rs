//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use anyon_cli::fixtures::{self, Convention, FixtureFile, FixtureTarget, Measured, Table};
use anyon_core::anyon_model::{
    j4_defect, one_qubit_generators, two_qubit_generators, AnyonParams,
};
use anyon_core::linalg::{kron, ComplexMatrix};
use anyon_core::metrics::{
    cnot_class_distance, computational_block, gates, makhlin_invariants, unitarity_measure,
    LocalInvariants,
};
use anyon_core::search::{
    brute_force, brute_force_with, cnot_feasible, mc_search, rng_from_seed, substream_seed,
    Objective, Parallelism, SearchConfig,
};
use anyon_core::ska::{from_axis_angle, mc_enhanced_ska_with, AxisAngle};
use num_complex::Complex64;
use rand::Rng;

type Outcome = Result<String, String>;

const ALPHA_STAR: f64 = 2.063;
const MASTER_SEED: u64 = 1;
const MC_SWEEPS: usize = 500;
const MC_TOL: f64 = 1e-4;
const BEST_OF: usize = 10;

fn grid() -> impl Iterator<Item = AnyonParams> {
    (2001..=2999u32).map(|k| AnyonParams::from_milli(k).unwrap())
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn model_construction() -> Outcome {
    let start = Instant::now();
    let mut worst_unitarity = 0.0f64;
    let mut worst_j4 = 0.0f64;
    for p in grid() {
        let g = one_qubit_generators(&p).map_err(|e| e.to_string())?;
        for (_, m) in g.letters() {
            worst_unitarity = worst_unitarity.max(m.unitarity_defect());
        }
        worst_j4 = worst_j4.max(j4_defect(&p).map_err(|e| e.to_string())?);
    }
    let elapsed = start.elapsed();
    check(
        worst_unitarity < 1e-9 && worst_j4 < 1e-9 && elapsed < Duration::from_secs(30),
        format!(
            "max unitarity defect {worst_unitarity:.2e}, max j4 defect {worst_j4:.2e}, {elapsed:.1?}"
        ),
    )
}

fn table_iii() -> Outcome {
    let rows = [
        (2.031, 6.184e-13, 0.09758),
        (2.047, 1.730e-11, 0.14833),
        (2.063, 1.808e-10, 0.19955),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (alpha, d_cnot, d_u) in rows {
        let g = two_qubit_generators(&AnyonParams::new(alpha).unwrap()).map_err(|e| e.to_string())?;
        let (a, _) = computational_block(g.matrix('G').unwrap()).unwrap();
        let got_cnot = cnot_class_distance(&a).unwrap();
        let got_u = unitarity_measure(&a).unwrap();
        ok &= (got_cnot - d_cnot).abs() < 1e-9 && (got_u - d_u).abs() < 1e-4;
        detail.push(format!("{alpha}: ({got_cnot:.3e}, {got_u:.5})"));
    }
    check(ok, detail.join("; "))
}

fn table_i() -> Outcome {
    let file = FixtureFile::shipped();
    let record = file
        .fixtures
        .iter()
        .find(|r| {
            r.table == Table::I && r.target == FixtureTarget::T && r.alpha == 2.063 && !r.informational
        })
        .ok_or("fixture missing")?;
    let report = fixtures::verify(&FixtureFile {
        fixtures: vec![record.clone()],
    })
    .map_err(|e| e.to_string())?;
    let o = &report.outcomes[0];
    let (Measured::OneQubit { d: fwd }, Measured::OneQubit { d: rev }) = (o.forward, o.reversed)
    else {
        return Err("unexpected measurement kind".into());
    };
    let within = |d: f64| (d - 0.00333869).abs() <= 1e-6;
    let matching: Vec<Convention> = [Convention::FirstLetterFirst, Convention::LastLetterFirst]
        .into_iter()
        .filter(|&c| o.passes(c))
        .collect();
    check(
        record.word.len() == 30 && within(fwd) && matching.len() == 1,
        format!(
            "{}: d = {fwd:.8}, {}: d = {rev:.8}; conventions reproducing 0.00333869: {}",
            Convention::FirstLetterFirst,
            Convention::LastLetterFirst,
            matching.len()
        ),
    )
}

/// `Q†·U·Q` and the invariants, computed with plain arrays.
fn oracle_invariants(u: &[[Complex64; 4]; 4]) -> (Complex64, Complex64) {
    let s = FRAC_1_SQRT_2;
    let (o, r, i) = (Complex64::new(0.0, 0.0), Complex64::new(s, 0.0), Complex64::new(0.0, s));
    let q = [[r, o, o, i], [o, i, r, o], [o, i, -r, o], [r, o, o, -i]];
    let mul = |a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4]| {
        let mut c = [[o; 4]; 4];
        for x in 0..4 {
            for y in 0..4 {
                for z in 0..4 {
                    c[x][y] += a[x][z] * b[z][y];
                }
            }
        }
        c
    };
    let mut qd = [[o; 4]; 4];
    let mut ubt = [[o; 4]; 4];
    for x in 0..4 {
        for y in 0..4 {
            qd[x][y] = q[y][x].conj();
        }
    }
    let ub = mul(&mul(&qd, u), &q);
    for x in 0..4 {
        for y in 0..4 {
            ubt[x][y] = ub[y][x];
        }
    }
    let m = mul(&ubt, &ub);
    let m2 = mul(&m, &m);
    let tr = (0..4).map(|k| m[k][k]).sum::<Complex64>();
    let tr2 = (0..4).map(|k| m2[k][k]).sum::<Complex64>();
    // determinant by cofactor expansion
    let det3 = |a: [[Complex64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let mut det = o;
    for col in 0..4 {
        let mut minor = [[o; 3]; 3];
        for x in 1..4 {
            let mut yy = 0;
            for y in 0..4 {
                if y != col {
                    minor[x - 1][yy] = u[x][y];
                    yy += 1;
                }
            }
        }
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        det += u[0][col] * det3(minor) * sign;
    }
    (tr * tr / (det * 16.0), (tr * tr - tr2) / (det * 4.0))
}

fn rows(m: &ComplexMatrix) -> [[Complex64; 4]; 4] {
    let mut a = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = m[(i, j)];
        }
    }
    a
}

fn random_u2<R: Rng>(rng: &mut R) -> ComplexMatrix {
    let z: f64 = rng.random_range(-1.0..1.0);
    let t: f64 = rng.random_range(0.0..2.0 * PI);
    let rr = (1.0 - z * z).sqrt();
    from_axis_angle(&AxisAngle {
        axis: [rr * t.cos(), rr * t.sin(), z],
        angle: rng.random_range(0.0..PI),
    })
    .scale(Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)))
}

fn makhlin() -> Outcome {
    let close = |g: LocalInvariants, e: (f64, f64, f64), tol: f64| {
        (g.g1 - e.0).abs() <= tol && (g.g2 - e.1).abs() <= tol && (g.g3 - e.2).abs() <= tol
    };
    let cnot = makhlin_invariants(&gates::cnot()).unwrap();
    let id = makhlin_invariants(&ComplexMatrix::identity(4).unwrap()).unwrap();
    let swap = makhlin_invariants(&gates::swap()).unwrap();
    let (g12, g3) = oracle_invariants(&rows(&gates::swap()));
    let swap_oracle = (g12.re, g12.im, g3.re);
    let (g12, g3) = oracle_invariants(&rows(&gates::cnot()));
    let cnot_oracle_ok = close(cnot, (g12.re, g12.im, g3.re), 1e-12);

    let mut rng = rng_from_seed(substream_seed(MASTER_SEED, 4));
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut u = ComplexMatrix::identity(4).unwrap();
        for _ in 0..3 {
            u = kron(&random_u2(&mut rng), &random_u2(&mut rng)).unwrap() * gates::cnot() * u;
        }
        let k1 = kron(&random_u2(&mut rng), &random_u2(&mut rng)).unwrap();
        let k2 = kron(&random_u2(&mut rng), &random_u2(&mut rng)).unwrap();
        let a = makhlin_invariants(&u).unwrap();
        let b = makhlin_invariants(&(k1 * u * k2)).unwrap();
        worst = worst
            .max((a.g1 - b.g1).abs())
            .max((a.g2 - b.g2).abs())
            .max((a.g3 - b.g3).abs());
    }
    check(
        close(cnot, (0.0, 0.0, 1.0), 1e-12)
            && cnot_oracle_ok
            && close(id, (1.0, 0.0, 3.0), 1e-12)
            && close(swap, (-1.0, 0.0, -3.0), 1e-12)
            && close(swap, swap_oracle, 1e-12)
            && worst < 1e-9,
        format!(
            "CNOT ({:.1e}, {:.1e}, {:.12}); I ({}, {}, {}); SWAP ({}, {}, {}); max local drift {worst:.1e}",
            cnot.g1, cnot.g2, cnot.g3, id.g1, id.g2, id.g3, swap.g1, swap.g2, swap.g3
        ),
    )
}

fn fig3_spot_claims() -> Outcome {
    let mut mins = [[f64::INFINITY; 6]; 2];
    for p in grid() {
        let g = one_qubit_generators(&p).map_err(|e| e.to_string())?;
        for (t, target) in [gates::hadamard(), gates::t_gate()].into_iter().enumerate() {
            for length in 1..=5 {
                let cfg = SearchConfig {
                    length,
                    tolerance: MC_TOL,
                    max_sweeps: 1,
                    seed: 0,
                    objective: Objective::OneQubit { target },
                };
                let r = brute_force(&g, &cfg).map_err(|e| e.to_string())?;
                mins[t][length] = mins[t][length].min(r.best_score);
            }
        }
    }
    let [h, t] = mins;
    let ok = h[1] >= 0.1
        && h[3] >= 0.1
        && [2, 4, 5].iter().all(|&l| h[l] < 0.1)
        && t[1] >= 0.1
        && (2..=5).all(|l| t[l] < 0.1);
    let fmt = |v: &[f64; 6]| {
        (1..=5)
            .map(|l| format!("L{l} {:.4}", v[l]))
            .collect::<Vec<_>>()
            .join(" ")
    };
    check(ok, format!("H: {}; T: {}", fmt(&h), fmt(&t)))
}

fn best_of_mc(target: ComplexMatrix, length: usize) -> Result<(f64, String), String> {
    let g = one_qubit_generators(&AnyonParams::new(ALPHA_STAR).unwrap()).map_err(|e| e.to_string())?;
    let mut best = (f64::INFINITY, String::new());
    for run in 0..BEST_OF as u64 {
        let cfg = SearchConfig {
            length,
            tolerance: MC_TOL,
            max_sweeps: MC_SWEEPS,
            seed: substream_seed(MASTER_SEED, run),
            objective: Objective::OneQubit { target },
        };
        let r = mc_search(&g, &cfg).map_err(|e| e.to_string())?;
        if r.best_score < best.0 {
            best = (r.best_score, r.best_word.to_string());
        }
    }
    Ok(best)
}

fn mc_search_criterion() -> Outcome {
    let (h, _) = best_of_mc(gates::hadamard(), 40)?;
    let (t, _) = best_of_mc(gates::t_gate(), 30)?;
    check(h <= 0.06 && t <= 0.05, format!("H L=40 d = {h:.6}; T L=30 d = {t:.6}"))
}

fn ska_criterion() -> Outcome {
    let start = Instant::now();
    let g = one_qubit_generators(&AnyonParams::new(ALPHA_STAR).unwrap()).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, target, l0) in [("H", gates::hadamard(), 40), ("T", gates::t_gate(), 30)] {
        let cfg = SearchConfig {
            length: l0,
            tolerance: MC_TOL,
            max_sweeps: MC_SWEEPS,
            seed: MASTER_SEED,
            objective: Objective::OneQubit { target },
        };
        let trace = mc_enhanced_ska_with(&target, 3, &g, &cfg, BEST_OF).map_err(|e| e.to_string())?;
        let d = trace.distances();
        let monotone = d.windows(2).all(|w| w[1] <= w[0]);
        let length = trace.last().length;
        ok &= monotone && d[3] < 0.01 && length == 125 * l0;
        detail.push(format!(
            "{name}: d = [{}], level-3 length {length}",
            d.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>().join(", ")
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(600);
    detail.push(format!("{elapsed:.1?}"));
    check(ok, detail.join("; "))
}

fn feasibility_windows() -> Outcome {
    let cases = [(2.031, 0.1, true), (2.047, 0.15, true), (2.063, 0.2, true), (2.5, 0.1, false)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (alpha, cap, expected) in cases {
        let g = two_qubit_generators(&AnyonParams::new(alpha).unwrap()).map_err(|e| e.to_string())?;
        let cfg = SearchConfig {
            length: 1,
            tolerance: MC_TOL,
            max_sweeps: 1,
            seed: 0,
            objective: Objective::CnotClass { du_cap: cap },
        };
        let r = brute_force(&g, &cfg);
        let feasible = cnot_feasible(&r);
        ok &= feasible == expected;
        detail.push(format!(
            "alpha {alpha} cap {cap}: {}",
            if feasible { "feasible" } else { "infeasible" }
        ));
    }
    check(ok, detail.join("; "))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_anyon"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("{args:?} exited {:?}", o.status.code()));
    }
    Ok(o.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let file = |n: &str| dir.path().join(n).to_str().unwrap().to_owned();
    let (s1, s2) = (file("s1.csv"), file("s2.csv"));
    let commands: Vec<Vec<&str>> = vec![
        vec!["mc", "--target", "T", "--alpha", "2.063", "--length", "20", "--runs", "4", "--num", "60", "--seed", "7"],
        vec!["ska", "--target", "H", "--alpha", "2.063", "--level", "2", "--length", "12", "--runs", "3", "--num", "40", "--seed", "7"],
        vec!["cnot", "--alpha-start", "2.02", "--alpha-end", "2.07", "--alpha-step", "0.01", "--lengths", "1,2", "--du-cap", "0.1,0.2"],
        vec!["cnot", "--alpha", "2.04", "--lengths", "6", "--method", "mc", "--du-cap", "0.15", "--runs", "3", "--num", "20", "--seed", "7"],
        vec!["word-eval", "--alpha", "2.063", "--word", "BADDDCBBADCBCCCBCCBADCBABBCDDC", "--target", "T"],
    ];
    let mut ok = true;
    let mut checked = 0;
    for c in &commands {
        ok &= run_cli(c)? == run_cli(c)?;
        checked += 1;
    }
    let sweep = |out: &str| {
        let args = ["sweep", "--target", "H", "--alpha-start", "2.3", "--alpha-end", "2.4", "--alpha-step", "0.01", "--lengths", "1,2,3,4", "--out", out];
        run_cli(&args)
    };
    sweep(&s1)?;
    sweep(&s2)?;
    ok &= std::fs::read(&s1).map_err(|e| e.to_string())? == std::fs::read(&s2).map_err(|e| e.to_string())?;
    checked += 1;

    let mut bf_pairs = 0;
    for alpha in [2.031, 2.5, 2.97] {
        let p = AnyonParams::new(alpha).unwrap();
        let one = one_qubit_generators(&p).unwrap();
        let two = two_qubit_generators(&p).unwrap();
        for length in 1..=6 {
            let cfg = SearchConfig {
                length,
                tolerance: MC_TOL,
                max_sweeps: 1,
                seed: 0,
                objective: Objective::OneQubit { target: gates::t_gate() },
            };
            ok &= brute_force_with(&one, &cfg, true, Parallelism::Serial)
                == brute_force_with(&one, &cfg, true, Parallelism::Parallel);
            bf_pairs += 1;
        }
        for length in 1..=3 {
            let cfg = SearchConfig {
                length,
                tolerance: MC_TOL,
                max_sweeps: 1,
                seed: 0,
                objective: Objective::CnotClass { du_cap: 0.2 },
            };
            ok &= brute_force_with(&two, &cfg, true, Parallelism::Serial)
                == brute_force_with(&two, &cfg, true, Parallelism::Parallel);
            bf_pairs += 1;
        }
    }
    check(
        ok,
        format!("{checked} commands byte-identical on rerun; {bf_pairs} serial/parallel BF pairs identical"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("model construction over the alpha grid", model_construction),
        ("two-qubit word G reproduces the d_CNOT / d_U table", table_iii),
        ("30-letter T word at alpha 2.063 under exactly one convention", table_i),
        ("Makhlin invariants and local invariance", makhlin),
        ("brute-force minima over the alpha grid, L <= 5", fig3_spot_claims),
        ("Monte Carlo best-of-10 at alpha 2.063", mc_search_criterion),
        ("MC-enhanced SKA to level 3 at alpha 2.063", ska_criterion),
        ("two-qubit feasibility windows under d_U caps", feasibility_windows),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {}: {status} | {name} | {detail} | {:.1?}",
            i + 1,
            start.elapsed()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
