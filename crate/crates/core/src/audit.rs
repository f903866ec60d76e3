//! Parity audit: closed-form set terms against quadrature oracles on random
//! parameter tuples.
//!
//! Besides the forms used by the library, the audit evaluates a few printed
//! variants that are known to be wrong. They are reported as warnings next to
//! the corrected form they replace, and never fail the audit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::empirical::instance::rng_from_seed;
use crate::error::{Error, Result};
use crate::lift::{exp_set_term_oracle, oracle_spec, set_term_closed, Kind, LiftParams};
use crate::numerics::special::{FRAC_1_SQRT_2PI, SQRT_2};
use crate::numerics::{erfc, ln_sum_exp, norm_pdf};
use crate::par::par_map;
use crate::{general, nonneg};

pub const PARITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditSample {
    pub params: LiftParams,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityWarning {
    pub form: String,
    pub description: String,
    pub corrected_by: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub form: String,
    pub samples: usize,
    pub max_rel_dev: f64,
    pub worst: Option<AuditSample>,
    pub warning: Option<ParityWarning>,
    pub errors: usize,
}

impl AuditEntry {
    pub fn passed(&self) -> bool {
        self.errors == 0 && self.max_rel_dev <= PARITY_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub seed: u64,
    pub samples_per_kind: usize,
    pub tolerance: f64,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    /// Every unwarned form within tolerance.
    pub fn passed(&self) -> bool {
        self.entries.iter().filter(|e| e.warning.is_none()).all(AuditEntry::passed)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ParityWarning> {
        self.entries.iter().filter_map(|e| e.warning.as_ref())
    }
}

fn rel_dev(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1e-12)
}

fn draw<R: Rng>(rng: &mut R, kind: Kind) -> AuditSample {
    let c3 = rng.gen_range(0.05..5.0);
    let s: f64 = rng.gen_range(0.05..4.0);
    let b = -0.5 * (-s).exp_m1();
    let nu1 = rng.gen_range(0.0..4.0);
    let nu2 = if kind == Kind::Sectional { 0.0 } else { rng.gen_range(0.0..4.0) };
    let beta = if kind == Kind::Sectional { rng.gen_range(0.01..0.99) } else { rng.gen_range(0.01..0.5) };
    AuditSample { params: LiftParams { c3, gamma: c3 / (4.0 * b), nu1, nu2 }, beta }
}

type Pair = Result<(f64, f64)>;

fn summarize(form: &str, samples: &[AuditSample], pairs: Vec<Pair>, warning: Option<ParityWarning>) -> AuditEntry {
    let mut max_rel_dev = 0.0;
    let mut worst = None;
    let mut errors = 0;
    for (s, p) in samples.iter().zip(pairs) {
        match p {
            Ok((v, r)) => {
                let d = rel_dev(v, r);
                if !(d <= max_rel_dev) {
                    max_rel_dev = d;
                    worst = Some(*s);
                }
            }
            Err(e) => {
                log::warn!("{form}: sample {s:?} failed: {e}");
                errors += 1;
            }
        }
    }
    AuditEntry { form: form.to_string(), samples: samples.len(), max_rel_dev, worst, warning, errors }
}

fn warning(form: &str, description: &str, corrected_by: &str) -> Option<ParityWarning> {
    Some(ParityWarning { form: form.into(), description: description.into(), corrected_by: corrected_by.into() })
}

/// Nonnegative strong set term with the outer parabola pieces missing their
/// 1/(2√2) factor.
fn nonneg_lifted_unnormalized(beta: f64, p: &LiftParams) -> Result<f64> {
    let np = nonneg::NonnegStrongParams::new(p)?;
    let l = ln_sum_exp(&nonneg::strong_nonneg_ln_pieces_unnormalized(&np));
    Ok(p.nu2 * (2.0 * beta - 1.0) + p.gamma + l / p.c3)
}

/// Direct strong value with e^{−ν/2} where e^{−ν²/2} belongs.
fn strong_direct_printed(beta: f64, nu: f64) -> Result<f64> {
    let c = general::strong_cut(beta)?;
    let nu = nu.clamp(0.0, c);
    Ok((1.0 + nu * nu) * erfc(nu / SQRT_2)
        + 4.0 * nu * FRAC_1_SQRT_2PI * (2.0 * (-0.5 * c * c).exp() - 0.5 * (-0.5 * nu).exp()))
}

/// Direct nonnegative value with e^{−ν/2} in the upper tail piece.
fn nonneg_direct_printed(beta: f64, nu: f64) -> Result<f64> {
    let c = nonneg::nonneg_cut(beta)?;
    let tail = 0.5 * erfc(nu / SQRT_2);
    let s1 = tail + nu * FRAC_1_SQRT_2PI * (-0.5 * nu).exp();
    let s2 = beta - c * norm_pdf(c);
    let s3 = (tail + beta) * nu * nu + 2.0 * nu * (norm_pdf(c) - norm_pdf(nu));
    Ok(s1 + s2 + s3)
}

type DirectFn = fn(f64, f64) -> Result<f64>;

struct DirectForm {
    name: &'static str,
    closed: DirectFn,
    printed: DirectFn,
    integral: DirectFn,
    typo: &'static str,
}

const DIRECT_FORMS: [DirectForm; 2] = [
    DirectForm {
        name: "strong-direct",
        closed: general::strong_direct_closed,
        printed: strong_direct_printed,
        integral: general::strong_direct_integral,
        typo: "exp(-nu/2) in place of exp(-nu^2/2)",
    },
    DirectForm {
        name: "strong-nonneg-direct",
        closed: nonneg::strong_nonneg_direct_closed,
        printed: nonneg_direct_printed,
        integral: nonneg::strong_nonneg_direct_integral,
        typo: "exp(-nu/2) in place of exp(-nu^2/2) in the upper tail piece",
    },
];

pub fn run_audit(samples: usize, seed: u64) -> Result<AuditReport> {
    if samples == 0 {
        return Err(Error::Domain("audit needs at least one sample".into()));
    }
    let spec = oracle_spec();
    let mut rng = rng_from_seed(seed);
    let mut entries = Vec::new();

    for kind in [Kind::Sectional, Kind::Strong, Kind::StrongNonneg] {
        let pts: Vec<AuditSample> = (0..samples).map(|_| draw(&mut rng, kind)).collect();
        let oracle: Vec<Result<f64>> = par_map(&pts, |s| exp_set_term_oracle(kind, &s.params, s.beta, &spec));
        let closed: Vec<Pair> = pts
            .iter()
            .zip(&oracle)
            .map(|(s, o)| Ok((set_term_closed(kind, &s.params, s.beta)?, o.clone()?)))
            .collect();
        let name = format!("{kind}-lifted");
        entries.push(summarize(&name, &pts, closed, None));
        if kind == Kind::StrongNonneg {
            let printed: Vec<Pair> = pts
                .iter()
                .zip(&oracle)
                .map(|(s, o)| Ok((nonneg_lifted_unnormalized(s.beta, &s.params)?, o.clone()?)))
                .collect();
            entries.push(summarize(
                "strong-nonneg-lifted-printed",
                &pts,
                printed,
                warning(
                    "strong-nonneg-lifted-printed",
                    "lower and upper parabola pieces without the 1/(2*sqrt 2) normalization",
                    &name,
                ),
            ));
        }
    }

    // direct forms: sample (β, ν) and compare against the integral definition
    for d in DIRECT_FORMS {
        let pts: Vec<AuditSample> = (0..samples)
            .map(|_| {
                let beta = rng.gen_range(0.01..0.5);
                let nu = rng.gen_range(0.0..3.0);
                AuditSample { params: LiftParams { nu1: nu, ..LiftParams::default() }, beta }
            })
            .collect();
        let reference: Vec<Result<f64>> = par_map(&pts, |s| (d.integral)(s.beta, s.params.nu1));
        let eval = |f: DirectFn| -> Vec<Pair> {
            pts.iter().zip(&reference).map(|(s, r)| Ok((f(s.beta, s.params.nu1)?, r.clone()?))).collect()
        };
        entries.push(summarize(d.name, &pts, eval(d.closed), None));
        let printed = format!("{}-printed", d.name);
        entries.push(summarize(&printed, &pts, eval(d.printed), warning(&printed, d.typo, d.name)));
    }

    Ok(AuditReport { seed, samples_per_kind: samples, tolerance: PARITY_TOL, entries })
}
