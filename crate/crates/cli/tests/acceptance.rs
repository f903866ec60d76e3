//! Acceptance checks, one PASS/FAIL line per criterion.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use l1lab_core::audit::run_audit;
use l1lab_core::empirical::{
    empirical_transition_alpha, generate_instance, k_subsets, place_on, sectional_nonneg_nullspace_holds,
    sectional_nullspace_holds, solve_basis_pursuit, strong_nullspace_holds,
};
use l1lab_core::general::weak_alpha_of_beta;
use l1lab_core::nonneg::weak_nonneg_alpha_of_beta;
use l1lab_core::par::{par_map, Exec};
use l1lab_core::tables::{compute_table, sweep, Column};
use l1lab_core::{Kind, Method};

const TABLE_TOL: f64 = 5e-4;
const DOMINANCE_SLACK: f64 = 5e-4;
const PARITY_TOL: f64 = 1e-6;
const TRANSITION_TOL: f64 = 0.05;
const BETA_TOL: f64 = 1e-5;

// Reference values for the computed columns, rows in table order.
const SECTIONAL_DIRECT_LOW: [f64; 7] = [0.00069, 0.00471, 0.0112, 0.0276, 0.0481, 0.0728, 0.1022];
const SECTIONAL_LIFTED_LOW: [f64; 7] = [0.00070, 0.00483, 0.0115, 0.0283, 0.0491, 0.0744, 0.1045];
const SECTIONAL_DIRECT_HIGH: [f64; 8] = [0.1373, 0.1800, 0.2337, 0.3079, 0.3626, 0.4378, 0.4802, 0.4937];
const SECTIONAL_LIFTED_HIGH: [f64; 8] = [0.1401, 0.1832, 0.2373, 0.3113, 0.3654, 0.4394, 0.4807, 0.4937];
const STRONG_LIFTED_LOW: [f64; 7] = [0.00030, 0.00206, 0.00492, 0.01225, 0.02154, 0.03285, 0.04645];
const STRONG_LIFTED_HIGH: [f64; 8] = [0.06287, 0.08298, 0.1085, 0.1443, 0.1710, 0.2080, 0.2291, 0.2359];
const NONNEG_LIFTED_LOW: [f64; 7] = [0.00033, 0.0024, 0.0060, 0.0158, 0.0291, 0.0461, 0.0680];
const NONNEG_LIFTED_HIGH: [f64; 8] = [0.0959, 0.1323, 0.1820, 0.2577, 0.3188, 0.4113, 0.4694, 0.4895];

struct Outcome {
    pass: bool,
    detail: String,
}

fn check_table(id: u8, expected: &[&[f64]]) -> Outcome {
    let t = match compute_table(id, BETA_TOL, Exec::Parallel) {
        Ok(t) => t,
        Err(e) => return Outcome { pass: false, detail: format!("table {id}: {e}") },
    };
    let def = l1lab_core::tables::table_def(id).unwrap();
    let computed: Vec<usize> =
        def.columns.iter().enumerate().filter(|(_, c)| matches!(c, Column::Computed { .. })).map(|(i, _)| i).collect();
    let mut worst = (0.0f64, 0.0, String::new());
    let mut literature_ok = true;
    for (ri, row) in t.rows.iter().enumerate() {
        for (ci, &col) in computed.iter().enumerate() {
            let got = row.cells[col].beta;
            let want = expected[ci][ri];
            let d = (got - want).abs();
            if !(d <= worst.0) {
                worst = (d, row.alpha, format!("{} {got:.5} vs {want}", t.columns[col]));
            }
        }
        for (col, c) in def.columns.iter().enumerate() {
            if let Column::Literature { values, .. } = c {
                literature_ok &= row.cells[col].literature && row.cells[col].beta == values[ri];
            }
        }
    }
    Outcome {
        pass: worst.0 <= TABLE_TOL && literature_ok,
        detail: format!(
            "table {id}: max |diff| {:.2e} at alpha {} ({}){}",
            worst.0,
            worst.1,
            worst.2,
            if literature_ok { "" } else { "; literature column altered" }
        ),
    }
}

fn criterion_1() -> Outcome {
    check_table(1, &[&SECTIONAL_DIRECT_LOW, &SECTIONAL_LIFTED_LOW])
}

fn criterion_2() -> Outcome {
    check_table(2, &[&SECTIONAL_DIRECT_HIGH, &SECTIONAL_LIFTED_HIGH])
}

fn both(a: Outcome, b: Outcome) -> Outcome {
    Outcome { pass: a.pass && b.pass, detail: format!("{}; {}", a.detail, b.detail) }
}

fn criterion_3() -> Outcome {
    both(check_table(3, &[&STRONG_LIFTED_LOW]), check_table(4, &[&STRONG_LIFTED_HIGH]))
}

fn criterion_4() -> Outcome {
    both(check_table(5, &[&NONNEG_LIFTED_LOW]), check_table(6, &[&NONNEG_LIFTED_HIGH]))
}

fn criterion_5() -> Outcome {
    let r = match run_audit(100, 2024) {
        Ok(r) => r,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let mut pass = r.samples_per_kind >= 100 && r.tolerance <= PARITY_TOL && r.passed();
    let mut notes = Vec::new();
    for e in &r.entries {
        match &e.warning {
            None => notes.push(format!("{} {:.1e}", e.form, e.max_rel_dev)),
            Some(w) => {
                let fixed = r.entries.iter().find(|x| x.form == w.corrected_by);
                let ok = fixed.is_some_and(|f| f.warning.is_none() && f.passed());
                pass &= ok;
                notes.push(format!("{} excluded ({}), corrected form {} passes: {ok}", e.form, w.description, w.corrected_by));
            }
        }
    }
    Outcome { pass, detail: notes.join("; ") }
}

fn criterion_6() -> Outcome {
    let alphas: Vec<f64> = (1..=19).map(|i| (i as f64 * 0.05 * 1e6).round() / 1e6).collect();
    let kinds = [Kind::Sectional, Kind::Strong, Kind::StrongNonneg];
    let jobs: Vec<(Kind, Method)> =
        kinds.iter().flat_map(|&k| [(k, Method::Direct), (k, Method::Lifted)]).collect();
    let curves = par_map(&jobs, |&(k, m)| sweep(k, m, &alphas, BETA_TOL, Exec::Sequential));
    let mut beta = std::collections::HashMap::new();
    for (&(k, m), c) in jobs.iter().zip(curves) {
        let mut v = Vec::new();
        for r in c {
            match r {
                Ok(r) => v.push(r.beta),
                Err(e) => return Outcome { pass: false, detail: format!("{k} {m}: {e}") },
            }
        }
        beta.insert((k, m), v);
    }
    let mut violations = Vec::new();
    for (i, &a) in alphas.iter().enumerate() {
        for m in [Method::Direct, Method::Lifted] {
            let (sec, st, nn) = (beta[&(Kind::Sectional, m)][i], beta[&(Kind::Strong, m)][i], beta[&(Kind::StrongNonneg, m)][i]);
            if st > sec {
                violations.push(format!("strong > sectional ({m}) at {a}"));
            }
            if nn < st {
                violations.push(format!("strong-nonneg < strong ({m}) at {a}"));
            }
        }
        for k in kinds {
            if beta[&(k, Method::Lifted)][i] < beta[&(k, Method::Direct)][i] - DOMINANCE_SLACK {
                violations.push(format!("{k} lifted < direct at {a}"));
            }
        }
    }
    for (&(k, m), v) in &beta {
        if let Some(w) = v.windows(2).position(|w| w[1] < w[0] - 2.0 * BETA_TOL) {
            violations.push(format!("{k} {m} decreases after alpha {}", alphas[w]));
        }
    }
    Outcome {
        pass: violations.is_empty(),
        detail: if violations.is_empty() {
            format!("{} curves x {} alphas, no violations", jobs.len(), alphas.len())
        } else {
            violations.join("; ")
        },
    }
}

fn criterion_7() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for nonneg in [false, true] {
        for beta in [0.05, 0.1, 0.2] {
            let theory = if nonneg { weak_nonneg_alpha_of_beta(beta) } else { weak_alpha_of_beta(beta) }.unwrap();
            match empirical_transition_alpha(beta, 200, 100, nonneg, 7, 0.02) {
                Ok(emp) => {
                    let ok = (emp - theory).abs() <= TRANSITION_TOL;
                    pass &= ok;
                    notes.push(format!("{}{beta}: {emp:.3} vs {theory:.3}", if nonneg { "+" } else { "" }));
                }
                Err(e) => {
                    pass = false;
                    notes.push(format!("beta {beta}: {e}"));
                }
            }
        }
    }
    Outcome { pass, detail: notes.join(", ") }
}

fn criterion_8() -> Outcome {
    let (n, m, k) = (16, 12, 2);
    let seeds: Vec<u64> = (0..50).collect();
    let per_matrix = par_map(&seeds, |&seed| -> Result<(usize, usize, usize, Vec<String>), String> {
        let a = generate_instance(n, m, 0, false, 1000 + seed).map_err(|e| e.to_string())?.a;
        let mut bad = Vec::new();
        let mut checked = 0;
        let strong = strong_nullspace_holds(&a, k, false).map_err(|e| e.to_string())?;
        let strong_nn = strong_nullspace_holds(&a, k, true).map_err(|e| e.to_string())?;
        if strong {
            if !strong_nn {
                bad.push(format!("matrix {seed}: general strong without nonneg strong"));
            }
            for s in k_subsets(n, k) {
                if !sectional_nullspace_holds(&a, &s).map_err(|e| e.to_string())? {
                    bad.push(format!("matrix {seed}: strong but sectional fails on {s:?}"));
                }
            }
        }
        for t in 0..10u64 {
            for nonneg in [false, true] {
                let inst = place_on(&a, k, nonneg, seed * 100 + t).map_err(|e| e.to_string())?;
                let sec = if nonneg {
                    sectional_nonneg_nullspace_holds(&a, &inst.support)
                } else {
                    sectional_nullspace_holds(&a, &inst.support)
                }
                .map_err(|e| e.to_string())?;
                let st = if nonneg { strong_nn } else { strong };
                if st && !sec {
                    bad.push(format!("matrix {seed}: strong but sectional fails on {:?}", inst.support));
                }
                if sec {
                    checked += 1;
                    let rec = solve_basis_pursuit(&inst, nonneg, 1e-9).map_err(|e| e.to_string())?;
                    if !rec.recovered {
                        bad.push(format!("matrix {seed}: sectional holds but recovery failed ({:?})", inst.support));
                    }
                }
            }
        }
        Ok((strong as usize, strong_nn as usize, checked, bad))
    });
    let (mut strong, mut strong_nn, mut checked, mut bad) = (0, 0, 0, Vec::new());
    for r in per_matrix {
        match r {
            Ok((s, sn, c, b)) => {
                strong += s;
                strong_nn += sn;
                checked += c;
                bad.extend(b);
            }
            Err(e) => bad.push(e),
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "n={n} m={m} k={k}, 50 matrices: strong {strong}, strong-nonneg {strong_nn}, {checked} recoveries certified; violations: {}",
            if bad.is_empty() { "none".to_string() } else { bad.join("; ") }
        ),
    }
}

fn run_twice(args: &[&str], file: Option<&std::path::Path>) -> Result<bool, String> {
    let mut outputs = Vec::new();
    for _ in 0..2 {
        if let Some(f) = file {
            let _ = std::fs::remove_file(f);
        }
        let o = Command::new(env!("CARGO_BIN_EXE_l1lab"))
            .args(args)
            .env_remove("L1LAB_CONFIG")
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(format!("{args:?} exited with {:?}", o.status.code()));
        }
        let mut bytes = o.stdout;
        if let Some(f) = file {
            bytes.extend(std::fs::read(f).map_err(|e| e.to_string())?);
        }
        outputs.push(bytes);
    }
    Ok(outputs[0] == outputs[1])
}

fn criterion_9() -> Outcome {
    let dir = std::env::temp_dir().join(format!("l1lab-acceptance-{}", std::process::id()));
    let _ = std::fs::create_dir_all(&dir);
    let curve = dir.join("curve.json");
    let cp = curve.to_str().unwrap().to_string();
    let runs: Vec<(Vec<&str>, Option<&std::path::Path>)> = vec![
        (vec!["threshold", "--alpha", "0.6", "--kind", "strong-nonneg", "--out", "json"], None),
        (vec!["table", "--which", "1", "--out", "csv"], None),
        (vec!["curve", "--kind", "sectional", "--alpha-grid", "0.1:0.5:0.1", "--out-file", &cp], Some(&curve)),
        (vec!["verify", "--mode", "weak", "--alpha", "0.5", "--beta", "0.12", "--n", "100", "--trials", "20", "--seed", "5"], None),
        (vec!["--jobs", "2", "verify", "--mode", "strong", "--alpha", "0.75", "--beta", "0.125", "--n", "16", "--trials", "6", "--seed", "5"], None),
        (vec!["verify", "--mode", "sectional", "--alpha", "0.6", "--beta", "0.2", "--n", "20", "--trials", "6", "--nonneg"], None),
        (vec!["audit", "--samples", "100", "--seed", "11", "--out", "json"], None),
    ];
    let mut bad = Vec::new();
    for (args, file) in &runs {
        match run_twice(args, *file) {
            Ok(true) => {}
            Ok(false) => bad.push(format!("{} differs between runs", args.join(" "))),
            Err(e) => bad.push(e),
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() { format!("{} commands byte-identical on rerun", runs.len()) } else { bad.join("; ") },
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("1 sectional table, alpha <= 0.5", criterion_1, Duration::from_secs(120)),
        ("2 sectional table, alpha > 0.5", criterion_2, Duration::from_secs(120)),
        ("3 strong tables, lifted column", criterion_3, Duration::from_secs(300)),
        ("4 nonnegative strong tables, lifted column", criterion_4, Duration::from_secs(300)),
        ("5 closed-form parity audit", criterion_5, Duration::from_secs(60)),
        ("6 ordering and dominance", criterion_6, Duration::from_secs(300)),
        ("7 empirical weak transition", criterion_7, Duration::from_secs(1200)),
        ("8 exhaustive null-space implications", criterion_8, Duration::from_secs(600)),
        ("9 determinism", criterion_9, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let t = Instant::now();
        let mut o = run();
        let dt = t.elapsed();
        if dt > budget {
            o.pass = false;
            o.detail.push_str(&format!("; exceeded the {}s budget", budget.as_secs()));
        }
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {name} ({:.1}s): {}", if o.pass { "PASS" } else { "FAIL" }, dt.as_secs_f64(), o.detail);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
