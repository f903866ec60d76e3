use std::fmt::Write as _;
use std::path::Path;

use l1lab_core::audit::{run_audit, AuditReport};
use l1lab_core::empirical::nullspace::{SECTIONAL_MAX_K, SECTIONAL_MAX_N, STRONG_MAX_K, STRONG_MAX_N};
use l1lab_core::empirical::{dims_for, nullspace_survey, weak_recovery, WeakSummary};
use l1lab_core::par::{par_map, Exec};
use l1lab_core::tables::{compute_table, Table};
use l1lab_core::{threshold_bisect, Kind, Method, ThresholdResult};
use serde_json::{json, Value};

use crate::config::Config;
use crate::curve::{CurveFile, CurvePoint, Format, Grid, Header};
use crate::failure::{CliResult, Failure, EXIT_AUDIT};
use crate::fmt::{jnum, json_text, num};
use crate::{Command, Mode, Out};

pub const DEFAULT_TOL: f64 = 1e-5;
const MAX_WEAK_N: usize = 5000;

pub fn dispatch(cmd: Command, cfg: &Config) -> CliResult<String> {
    match cmd {
        Command::Threshold { alpha, kind, method, tol, out } => {
            let method = cfg.pick(method, "method", Method::Lifted)?;
            let tol = check_tol(cfg.pick(tol, "tol", DEFAULT_TOL)?)?;
            let out = cfg.pick(out, "out", Out::Text)?;
            cmd_threshold(alpha, kind, method, tol, out)
        }
        Command::Table { which, tol, out } => {
            let tol = check_tol(cfg.pick(tol, "tol", DEFAULT_TOL)?)?;
            let out = cfg.pick(out, "out", Out::Text)?;
            cmd_table(which, tol, out)
        }
        Command::Curve { kind, method, alpha_grid, out_file, format, tol } => {
            let method = cfg.pick(method, "method", Method::Lifted)?;
            let tol = check_tol(cfg.pick(tol, "tol", DEFAULT_TOL)?)?;
            let format = match format {
                Some(f) => f,
                None => match cfg.get::<Format>("format")? {
                    Some(f) => f,
                    None => guess_format(&out_file),
                },
            };
            cmd_curve(kind, method, alpha_grid, &out_file, format, tol)
        }
        Command::Verify { mode, alpha, beta, n, trials, seed, nonneg } => {
            let n = cfg.pick(n, "n", if mode == Mode::Weak { 200 } else { 16 })?;
            let trials = cfg.pick(trials, "trials", if mode == Mode::Weak { 100 } else { 20 })?;
            let seed = cfg.pick(seed, "seed", 0)?;
            cmd_verify(mode, alpha, beta, n, trials, seed, nonneg)
        }
        Command::Audit { samples, seed, out } => {
            let samples = cfg.pick(samples, "samples", 100)?;
            let seed = cfg.pick(seed, "seed", 0)?;
            let out = cfg.pick(out, "out", Out::Text)?;
            cmd_audit(samples, seed, out)
        }
    }
}

fn guess_format(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    }
}

fn check_tol(tol: f64) -> CliResult<f64> {
    if !(1e-5..=0.1).contains(&tol) {
        return Err(Failure::usage(format!("--tol must lie in [1e-5, 0.1], got {tol}")));
    }
    Ok(tol)
}

fn check_alpha(alpha: f64, kind: Kind) -> CliResult<()> {
    let ok = if kind.is_weak() { alpha > 0.0 && alpha < 1.0 } else { alpha > 0.0 && alpha <= 1.0 };
    if !ok {
        let range = if kind.is_weak() { "(0, 1)" } else { "(0, 1]" };
        return Err(Failure::usage(format!("--alpha must lie in {range} for {kind}, got {alpha}")));
    }
    Ok(())
}

fn effective_method(kind: Kind, method: Method) -> Method {
    if kind.is_weak() {
        Method::Direct
    } else {
        method
    }
}

fn result_json(r: &ThresholdResult) -> Value {
    let p = &r.params_at_optimum;
    json!({
        "alpha": jnum(r.alpha),
        "beta": jnum(r.beta),
        "kind": r.kind.name(),
        "method": r.method.name(),
        "condition_margin": jnum(r.condition_margin),
        "params_at_optimum": { "c3": jnum(p.c3), "gamma": jnum(p.gamma), "nu1": jnum(p.nu1), "nu2": jnum(p.nu2) },
        "warnings": r.warnings,
    })
}

pub fn cmd_threshold(alpha: f64, kind: Kind, method: Method, tol: f64, out: Out) -> CliResult<String> {
    check_alpha(alpha, kind)?;
    let method = effective_method(kind, method);
    let r = threshold_bisect(alpha, kind, method, tol).map_err(|e| {
        let f = Failure::from(e);
        Failure { code: f.code, message: format!("{kind} {method} threshold at alpha = {alpha}: {}", f.message) }
    })?;
    let p = &r.params_at_optimum;
    Ok(match out {
        Out::Json => json_text(&result_json(&r)),
        Out::Csv => {
            let mut s = String::from("kind,method,alpha,beta,condition_margin,c3,gamma,nu1,nu2,warnings\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                r.kind,
                r.method,
                num(r.alpha),
                num(r.beta),
                num(r.condition_margin),
                num(p.c3),
                num(p.gamma),
                num(p.nu1),
                num(p.nu2),
                r.warnings.join(";").replace(',', " ")
            );
            s
        }
        Out::Text => {
            let mut s = format!(
                "{} {}: alpha = {}  beta = {}\n  margin = {}  c3 = {}  gamma = {}  nu1 = {}  nu2 = {}\n",
                r.kind,
                r.method,
                num(r.alpha),
                num(r.beta),
                num(r.condition_margin),
                num(p.c3),
                num(p.gamma),
                num(p.nu1),
                num(p.nu2)
            );
            for w in &r.warnings {
                let _ = writeln!(s, "  warning: {w}");
            }
            s
        }
    })
}

pub fn cmd_table(which: u8, tol: f64, out: Out) -> CliResult<String> {
    let t: Table = compute_table(which, tol, Exec::Parallel)?;
    Ok(match out {
        Out::Json => {
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| json!({ "alpha": jnum(r.alpha), "values": r.cells.iter().map(|c| jnum(c.beta)).collect::<Vec<_>>() }))
                .collect();
            json_text(&json!({ "table": t.id, "caption": t.caption, "columns": t.columns, "rows": rows }))
        }
        Out::Csv => {
            let mut s = String::from("alpha");
            for c in &t.columns {
                let _ = write!(s, ",{}", c.replace(',', " "));
            }
            s.push('\n');
            for r in &t.rows {
                s.push_str(&num(r.alpha));
                for c in &r.cells {
                    let _ = write!(s, ",{}", num(c.beta));
                }
                s.push('\n');
            }
            s
        }
        Out::Text => {
            let mut s = format!("Table {}: {}\n{:>8}", t.id, t.caption, "alpha");
            for c in &t.columns {
                let _ = write!(s, "  {c:>28}");
            }
            s.push('\n');
            for r in &t.rows {
                let _ = write!(s, "{:>8}", num(r.alpha));
                for c in &r.cells {
                    let _ = write!(s, "  {:>28}", num(c.beta));
                }
                s.push('\n');
            }
            s.push_str("literature columns are published values and are not recomputed\n");
            s
        }
    })
}

fn curve_batch() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads().max(1)
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

pub fn cmd_curve(kind: Kind, method: Method, grid: Grid, path: &Path, format: Format, tol: f64) -> CliResult<String> {
    let alphas = grid.points().map_err(Failure::usage)?;
    for &a in &alphas {
        check_alpha(a, kind)?;
    }
    let header = Header {
        kind,
        method: effective_method(kind, method),
        version: env!("CARGO_PKG_VERSION").to_string(),
        grid: grid.to_string(),
        tol_beta: crate::fmt::round_sig(tol),
    };

    let mut done: Vec<Option<CurvePoint>> = vec![None; alphas.len()];
    if path.exists() {
        let prev = CurveFile::read(path, format)
            .map_err(|e| Failure::usage(format!("existing {} cannot be resumed: {e:#}", path.display())))?;
        if prev.header != header {
            return Err(Failure::usage(format!(
                "{} was written with different settings; remove it or change --out-file",
                path.display()
            )));
        }
        for p in prev.points {
            if let Some(i) = alphas.iter().position(|&a| a == p.alpha) {
                if !p.is_failed() {
                    done[i] = Some(p);
                }
            }
        }
        let reused = done.iter().filter(|d| d.is_some()).count();
        log::info!("resuming {}: {reused} of {} points present", path.display(), alphas.len());
    }

    let todo: Vec<usize> = (0..alphas.len()).filter(|&i| done[i].is_none()).collect();
    let mut failures = Vec::new();
    for chunk in todo.chunks(curve_batch()) {
        let results = par_map(chunk, |&i| threshold_bisect(alphas[i], kind, header.method, tol));
        for (&i, r) in chunk.iter().zip(results) {
            done[i] = Some(match r {
                Ok(r) => CurvePoint::from_result(&r),
                Err(e) => {
                    log::warn!("alpha = {}: {e}", alphas[i]);
                    failures.push(format!("alpha = {}: {e}", num(alphas[i])));
                    CurvePoint::failed(alphas[i])
                }
            });
        }
        let file = CurveFile { header: header.clone(), points: done.iter().flatten().cloned().collect() };
        file.write(path, format)?;
    }
    if todo.is_empty() {
        // nothing to compute; normalize the existing file
        let file = CurveFile { header: header.clone(), points: done.iter().flatten().cloned().collect() };
        file.write(path, format)?;
    }
    if !failures.is_empty() {
        return Err(Failure::numerical(format!(
            "{} of {} curve points failed (margin NaN in {}):\n  {}",
            failures.len(),
            alphas.len(),
            path.display(),
            failures.join("\n  ")
        )));
    }
    Ok(format!("{} points written to {}\n", alphas.len(), path.display()))
}

fn weak_json(mode: Mode, alpha: f64, beta: f64, s: &WeakSummary) -> Value {
    let trials: Vec<Value> = s
        .trials
        .iter()
        .map(|t| {
            let mut v = json!({
                "seed": t.seed,
                "recovered": t.recovered,
                "rel_error": jnum(t.rel_error),
                "iterations": t.iterations,
                "residual": jnum(t.residual),
            });
            if let Some(e) = &t.error {
                v["error"] = json!(e);
            }
            v
        })
        .collect();
    json!({
        "mode": format!("{mode:?}").to_lowercase(),
        "alpha": jnum(alpha),
        "beta": jnum(beta),
        "n": s.dims.n,
        "m": s.dims.m,
        "k": s.dims.k,
        "nonneg": s.nonneg,
        "seed": s.seed,
        "rate": jnum(s.rate),
        "recovered": s.recovered,
        "failed_solves": s.failed_solves,
        "mean_iterations": jnum(s.mean_iterations),
        "max_residual": jnum(s.max_residual),
        "trials": trials,
    })
}

pub fn cmd_verify(mode: Mode, alpha: f64, beta: f64, n: usize, trials: usize, seed: u64, nonneg: bool) -> CliResult<String> {
    if trials == 0 {
        return Err(Failure::usage("--trials must be positive"));
    }
    if trials > 100_000 {
        return Err(Failure::usage("--trials is capped at 100000"));
    }
    let caps = match mode {
        Mode::Weak => (MAX_WEAK_N, usize::MAX),
        Mode::Sectional => (SECTIONAL_MAX_N, SECTIONAL_MAX_K),
        Mode::Strong => (STRONG_MAX_N, STRONG_MAX_K),
    };
    let mode_name = format!("{mode:?}").to_lowercase();
    if n > caps.0 {
        return Err(Failure::usage(format!("{mode_name} mode caps n at {}, got n = {n}", caps.0)));
    }
    let dims = dims_for(alpha, beta, n)?;
    if dims.k > caps.1 {
        return Err(Failure::usage(format!("{mode_name} mode caps k = round(beta n) at {}, got k = {}", caps.1, dims.k)));
    }
    if dims.k == 0 {
        return Err(Failure::usage(format!("round(beta n) must be at least 1, got beta = {beta}, n = {n}")));
    }
    let v = match mode {
        Mode::Weak => weak_json(mode, alpha, beta, &weak_recovery(alpha, beta, n, trials, nonneg, seed)?),
        Mode::Sectional | Mode::Strong => {
            let verdicts = nullspace_survey(dims, trials, mode == Mode::Sectional, nonneg, seed);
            let holds = verdicts.iter().filter(|v| v.holds == Some(true)).count();
            let errors = verdicts.iter().filter(|v| v.error.is_some()).count();
            let matrices: Vec<Value> = verdicts
                .iter()
                .map(|v| {
                    let mut o = json!({ "seed": v.seed, "holds": v.holds });
                    if let Some(s) = &v.support {
                        o["support"] = json!(s);
                    }
                    if let Some(e) = &v.error {
                        o["error"] = json!(e);
                    }
                    o
                })
                .collect();
            json!({
                "mode": mode_name,
                "alpha": jnum(alpha),
                "beta": jnum(beta),
                "n": dims.n,
                "m": dims.m,
                "k": dims.k,
                "nonneg": nonneg,
                "seed": seed,
                "matrices": matrices,
                "holds": holds,
                "errors": errors,
                "fraction": jnum(holds as f64 / trials as f64),
            })
        }
    };
    Ok(json_text(&v))
}

fn audit_text(r: &AuditReport) -> String {
    let mut s = format!(
        "parity audit: {} samples per form, seed {}, tolerance {}\n",
        r.samples_per_kind,
        r.seed,
        num(r.tolerance)
    );
    for e in &r.entries {
        let status = if e.warning.is_some() {
            "WARN"
        } else if e.passed() {
            "ok"
        } else {
            "FAIL"
        };
        let _ = writeln!(s, "  {:<32} max rel dev {:>14}  errors {}  {status}", e.form, num(e.max_rel_dev), e.errors);
    }
    for w in r.warnings() {
        let _ = writeln!(s, "warning: {} ({}); corrected form {} is the one in use", w.form, w.description, w.corrected_by);
    }
    let _ = writeln!(s, "{}", if r.passed() { "audit passed" } else { "audit FAILED" });
    s
}

fn audit_json(r: &AuditReport) -> Value {
    let entries: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            let worst = e.worst.map(|w| {
                json!({
                    "beta": jnum(w.beta),
                    "c3": jnum(w.params.c3),
                    "gamma": jnum(w.params.gamma),
                    "nu1": jnum(w.params.nu1),
                    "nu2": jnum(w.params.nu2),
                })
            });
            json!({
                "form": e.form,
                "samples": e.samples,
                "max_rel_dev": jnum(e.max_rel_dev),
                "errors": e.errors,
                "passed": e.passed(),
                "worst": worst,
                "warning": e.warning.as_ref().map(|w| json!({
                    "description": w.description,
                    "corrected_by": w.corrected_by,
                })),
            })
        })
        .collect();
    json!({
        "seed": r.seed,
        "samples_per_kind": r.samples_per_kind,
        "tolerance": jnum(r.tolerance),
        "passed": r.passed(),
        "entries": entries,
    })
}

pub fn cmd_audit(samples: usize, seed: u64, out: Out) -> CliResult<String> {
    if samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    let r = run_audit(samples, seed)?;
    let text = match out {
        Out::Json => json_text(&audit_json(&r)),
        Out::Text | Out::Csv => audit_text(&r),
    };
    if !r.passed() {
        print!("{text}");
        return Err(Failure { code: EXIT_AUDIT, message: "closed forms deviate from the quadrature oracle".into() });
    }
    Ok(text)
}
