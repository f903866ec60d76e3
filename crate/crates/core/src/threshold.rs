//! Turning feasibility conditions into thresholds β(α).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lift::{evaluate_lifted, BoundEvaluation, Kind, LiftParams, Method};
use crate::numerics::{find_root, minimize_best, minimize_scalar, Bracket, MinimizeConfig};
use crate::{general, nonneg};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub alpha: f64,
    pub beta: f64,
    pub method: Method,
    pub kind: Kind,
    pub params_at_optimum: LiftParams,
    pub condition_margin: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub c3_min: f64,
    pub c3_max: f64,
    pub nu_max: f64,
    /// ν₂ lives on a log scale in [nu2_min, nu2_max].
    pub nu2_min: f64,
    pub nu2_max: f64,
    /// Upper bound on s = −ln(1 − 2b).
    pub s_max: f64,
    /// Feasible means total < −margin.
    pub margin: f64,
    pub minimize: MinimizeConfig,
    /// Screened starting points refined by Nelder–Mead.
    pub starts: usize,
    /// Also minimize over c₃ in an outer loop and keep the smaller total.
    pub nested: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            c3_min: 1e-4,
            c3_max: 1000.0,
            nu_max: 10.0,
            nu2_min: 1e-9,
            nu2_max: 1e4,
            s_max: 30.0,
            margin: 1e-9,
            minimize: MinimizeConfig { max_evals: 3000, xtol: 1e-10, ftol: 1e-13, restarts: 2, initial_step: 0.1 },
            starts: 4,
            nested: true,
        }
    }
}

const NU_SEEDS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 4.0];
const NU2_SEEDS: [f64; 6] = [0.01, 0.1, 0.5, 2.0, 10.0, 100.0];
const S_SEEDS: [f64; 5] = [0.05, 0.3, 1.0, 3.0, 8.0];

fn dims(kind: Kind) -> usize {
    if kind == Kind::Sectional {
        3
    } else {
        4
    }
}

fn bounds(kind: Kind, cfg: &SearchConfig) -> Vec<(f64, f64)> {
    let mut b = vec![(cfg.c3_min.ln(), cfg.c3_max.ln()), (1e-7, cfg.s_max), (0.0, cfg.nu_max)];
    if dims(kind) == 4 {
        b.push((cfg.nu2_min.ln(), cfg.nu2_max.ln()));
    }
    b
}

/// Coordinates (ln c₃, s, ν₁[, ln ν₂]) with b = (1 − e^{−s})/2 and γ = c₃/(4b).
pub fn decode(u: &[f64]) -> LiftParams {
    let c3 = u[0].exp();
    let b = -0.5 * (-u[1]).exp_m1();
    LiftParams { c3, gamma: c3 / (4.0 * b), nu1: u[2], nu2: u.get(3).map_or(0.0, |v| v.exp()) }
}

pub fn encode(p: &LiftParams, kind: Kind) -> Vec<f64> {
    let s = -(-2.0 * p.b()).ln_1p();
    let mut u = vec![p.c3.ln(), s, p.nu1];
    if dims(kind) == 4 {
        u.push(p.nu2.max(1e-300).ln());
    }
    u
}

fn objective(kind: Kind, alpha: f64, beta: f64, u: &[f64]) -> f64 {
    match evaluate_lifted(kind, &decode(u), alpha, beta) {
        Ok(e) if e.total.is_finite() => e.total,
        _ => f64::INFINITY,
    }
}

fn screen(kind: Kind, alpha: f64, beta: f64, cfg: &SearchConfig) -> Vec<(f64, Vec<f64>)> {
    let lo = (1e-3f64).max(cfg.c3_min).ln();
    let hi = (300.0f64).min(cfg.c3_max).ln();
    let mut pts = Vec::new();
    for i in 0..8 {
        let lc = lo + (hi - lo) * i as f64 / 7.0;
        for &s in &S_SEEDS {
            for &n1 in &NU_SEEDS {
                if dims(kind) == 3 {
                    pts.push(vec![lc, s, n1]);
                } else {
                    for &n2 in &NU2_SEEDS {
                        pts.push(vec![lc, s, n1, n2.ln()]);
                    }
                }
            }
        }
    }
    let mut scored: Vec<(f64, Vec<f64>)> = pts.into_iter().map(|u| (objective(kind, alpha, beta, &u), u)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    scored
}

/// Smallest master-condition total found for a lifted kind at (α, β).
/// Stops early as soon as a feasible point is found.
pub fn lifted_min(
    kind: Kind,
    alpha: f64,
    beta: f64,
    warm: Option<&LiftParams>,
    cfg: &SearchConfig,
) -> Result<(BoundEvaluation, LiftParams)> {
    if kind.is_weak() {
        return Err(Error::Domain(format!("{kind} has no lifted bound")));
    }
    let bx = bounds(kind, cfg);
    let f = |u: &[f64]| objective(kind, alpha, beta, u);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let Some(w) = warm {
        let mut u = encode(w, kind);
        for (v, &(l, h)) in u.iter_mut().zip(&bx) {
            *v = v.clamp(l, h);
        }
        starts.push(u);
    }
    let mut screened = screen(kind, alpha, beta, cfg).into_iter();
    let (mut best_f, mut best_u) = (f64::INFINITY, Vec::new());
    let mut runs = 0;
    loop {
        let u0 = if !starts.is_empty() {
            starts.remove(0)
        } else if runs < cfg.starts + usize::from(warm.is_some()) {
            match screened.next() {
                Some((_, u)) => u,
                None => break,
            }
        } else {
            break;
        };
        runs += 1;
        // an unconverged run still yields a valid upper bound on the minimum
        let m = minimize_best(f, &u0, &bx, &cfg.minimize);
        if m.f < best_f {
            best_f = m.f;
            best_u = m.x;
        }
        if best_f < -cfg.margin {
            break;
        }
    }
    if best_u.is_empty() {
        return Err(Error::Numerical(format!("no finite lifted value at alpha={alpha}, beta={beta}")));
    }
    if cfg.nested && best_f >= -cfg.margin && best_f < 1e-2 {
        let (nf, nu) = nested(kind, alpha, beta, &best_u, &bx, cfg);
        if nf < best_f {
            best_f = nf;
            best_u = nu;
        }
    }
    let p = decode(&best_u);
    let e = evaluate_lifted(kind, &p, alpha, beta)?;
    debug_assert!((e.total - best_f).abs() < 1e-12 || !best_f.is_finite());
    Ok((e, p))
}

/// Outer scalar search over ln c₃ with the inner parameters re-optimized.
fn nested(kind: Kind, alpha: f64, beta: f64, u0: &[f64], bx: &[(f64, f64)], cfg: &SearchConfig) -> (f64, Vec<f64>) {
    let inner_cfg = MinimizeConfig { restarts: 1, ..cfg.minimize };
    let inner_bounds: Vec<(f64, f64)> = bx[1..].to_vec();
    let mut inner_best: Vec<f64> = u0[1..].to_vec();
    let mut best = (f64::INFINITY, u0.to_vec());
    let (lo, hi) = ((u0[0] - 1.0).max(bx[0].0), (u0[0] + 1.0).min(bx[0].1));
    let mut inner = |lc: f64| -> f64 {
        let g = |v: &[f64]| {
            let mut u = Vec::with_capacity(v.len() + 1);
            u.push(lc);
            u.extend_from_slice(v);
            objective(kind, alpha, beta, &u)
        };
        let m = minimize_best(g, &inner_best, &inner_bounds, &inner_cfg);
        if m.f < best.0 {
            let mut u = vec![lc];
            u.extend_from_slice(&m.x);
            best = (m.f, u);
            inner_best = m.x;
        }
        m.f
    };
    minimize_scalar(&mut inner, lo, hi, 8, 1e-4);
    best
}

/// Outcome of one feasibility probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    /// ≤ 0 (below −margin for lifted kinds) means the condition holds.
    pub margin: f64,
    pub params: LiftParams,
}

/// Evaluates the kind's condition at (α, β).
pub fn probe(
    kind: Kind,
    method: Method,
    alpha: f64,
    beta: f64,
    warm: Option<&LiftParams>,
    cfg: &SearchConfig,
) -> Result<Probe> {
    let direct = |nu: f64, value: f64| Probe {
        margin: value - alpha.sqrt(),
        params: LiftParams { c3: 0.0, gamma: 0.0, nu1: nu, nu2: 0.0 },
    };
    match (kind, method) {
        (Kind::Weak, _) => Ok(Probe { margin: general::weak_alpha_of_beta(beta)? - alpha, params: LiftParams::default() }),
        (Kind::WeakNonneg, _) => {
            Ok(Probe { margin: nonneg::weak_nonneg_alpha_of_beta(beta)? - alpha, params: LiftParams::default() })
        }
        (Kind::Sectional, Method::Direct) => {
            let (nu, v) = general::sectional_direct_min(beta);
            Ok(direct(nu, v))
        }
        (Kind::Strong, Method::Direct) => {
            let (nu, v) = general::strong_direct_min(beta)?;
            Ok(direct(nu, v.max(0.0).sqrt()))
        }
        (Kind::StrongNonneg, Method::Direct) => {
            let (nu, v) = nonneg::strong_nonneg_direct_min(beta)?;
            Ok(direct(nu, v.max(0.0).sqrt()))
        }
        (_, Method::Lifted) => {
            let (e, p) = lifted_min(kind, alpha, beta, warm, cfg)?;
            Ok(Probe { margin: e.total, params: p })
        }
    }
}

fn holds(kind: Kind, method: Method, margin: f64, cfg: &SearchConfig) -> bool {
    if method == Method::Lifted && !kind.is_weak() {
        margin < -cfg.margin
    } else {
        margin < 0.0
    }
}

/// Largest β (to `tol_beta`) at which the condition holds, default search settings.
pub fn threshold_bisect(alpha: f64, kind: Kind, method: Method, tol_beta: f64) -> Result<ThresholdResult> {
    threshold_bisect_with(alpha, kind, method, tol_beta, &SearchConfig::default())
}

pub fn threshold_bisect_with(
    alpha: f64,
    kind: Kind,
    method: Method,
    tol_beta: f64,
    cfg: &SearchConfig,
) -> Result<ThresholdResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha {alpha} outside (0, 1]")));
    }
    if !(tol_beta >= 1e-5) {
        return Err(Error::Domain(format!("beta tolerance {tol_beta} below 1e-5")));
    }
    let method = if kind.is_weak() { Method::Direct } else { method };
    if kind.is_weak() {
        return weak_threshold(alpha, kind, tol_beta);
    }
    let mut warnings = Vec::new();
    let mut lo = 1e-4;
    let mut hi = kind.beta_cap();
    let first = probe(kind, method, alpha, lo, None, cfg)?;
    if !holds(kind, method, first.margin, cfg) {
        return Err(Error::Numerical(format!("{kind} {method} condition fails already at beta={lo}, alpha={alpha}")));
    }
    let mut best = first;
    let top = probe(kind, method, alpha, hi, Some(&best.params), cfg)?;
    if holds(kind, method, top.margin, cfg) {
        return Ok(ThresholdResult {
            alpha,
            beta: hi,
            method,
            kind,
            params_at_optimum: top.params,
            condition_margin: top.margin,
            warnings,
        });
    }
    loop {
        while hi - lo > tol_beta {
            let mid = 0.5 * (lo + hi);
            let p = probe(kind, method, alpha, mid, Some(&best.params), cfg)?;
            if holds(kind, method, p.margin, cfg) {
                lo = mid;
                best = p;
            } else {
                hi = mid;
            }
        }
        // feasibility at half the threshold is implied by monotonicity; check it
        let check = 0.5 * lo;
        if check <= 1e-4 {
            break;
        }
        let p = probe(kind, method, alpha, check, Some(&best.params), cfg)?;
        if holds(kind, method, p.margin, cfg) {
            break;
        }
        let msg = Error::NonMonotone(check).to_string();
        log::warn!("{msg} ({kind} {method}, alpha={alpha})");
        warnings.push(msg);
        hi = check;
        lo = 1e-4;
        best = first;
    }
    Ok(ThresholdResult { alpha, beta: lo, method, kind, params_at_optimum: best.params, condition_margin: best.margin, warnings })
}

fn weak_threshold(alpha: f64, kind: Kind, tol_beta: f64) -> Result<ThresholdResult> {
    let a_of_b = |b: f64| match kind {
        Kind::Weak => general::weak_alpha_of_beta(b),
        _ => nonneg::weak_nonneg_alpha_of_beta(b),
    };
    if alpha >= 1.0 {
        return Err(Error::Domain("weak thresholds need alpha < 1".into()));
    }
    // α_w(β) > β, so the root lies below α
    let f = |b: f64| a_of_b(b).map(|a| a - alpha).unwrap_or(f64::NAN);
    let beta = find_root(f, Bracket::new(1e-12, alpha)?, 1e-13)?;
    // report the feasible side of the root
    let beta = if f(beta) > 0.0 { beta - 1e-13 } else { beta };
    let _ = tol_beta;
    Ok(ThresholdResult {
        alpha,
        beta,
        method: Method::Direct,
        kind,
        params_at_optimum: LiftParams::default(),
        condition_margin: f(beta),
        warnings: Vec::new(),
    })
}
