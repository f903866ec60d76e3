//! Shared skeleton of the lifted bounds: the sphere term, the master
//! feasibility condition and the quadrature oracle for exponential set terms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureSpec};
use crate::{general, nonneg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Weak,
    Sectional,
    Strong,
    WeakNonneg,
    StrongNonneg,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Weak, Kind::Sectional, Kind::Strong, Kind::WeakNonneg, Kind::StrongNonneg];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Weak => "weak",
            Kind::Sectional => "sectional",
            Kind::Strong => "strong",
            Kind::WeakNonneg => "weak-nonneg",
            Kind::StrongNonneg => "strong-nonneg",
        }
    }

    pub fn is_weak(self) -> bool {
        matches!(self, Kind::Weak | Kind::WeakNonneg)
    }

    /// Largest admissible β; strong sets need k ≤ n/2.
    pub fn beta_cap(self) -> f64 {
        match self {
            Kind::Strong | Kind::StrongNonneg => 0.5,
            _ => 0.9999,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown threshold kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    Lifted,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Lifted => "lifted",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "lifted" => Ok(Method::Lifted),
            _ => Err(Error::Domain(format!("unknown method '{s}'"))),
        }
    }
}

/// Free variables of a lifted bound. Sectional uses `nu1` only; direct
/// bounds report `c3 = 0` and the optimal ν in `nu1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LiftParams {
    pub c3: f64,
    pub gamma: f64,
    pub nu1: f64,
    pub nu2: f64,
}

impl LiftParams {
    /// b = c₃/(4γ); every kind needs b < 1/2.
    pub fn b(&self) -> f64 {
        self.c3 / (4.0 * self.gamma)
    }

    pub fn check(&self) -> Result<()> {
        let ok = self.c3 > 0.0 && self.gamma > 0.0 && self.b() < 0.5 && self.nu1 >= 0.0 && self.nu2 >= 0.0;
        if !ok || ![self.c3, self.gamma, self.nu1, self.nu2].iter().all(|v| v.is_finite()) {
            return Err(Error::ConstraintViolated(format!(
                "need c3 > 0, nu >= 0 and c3/(4 gamma) < 1/2, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereTerm {
    pub c3: f64,
    pub alpha: f64,
    pub gamma_hat: f64,
    pub value: f64,
}

/// Maximizer of the sphere-term dual, (2c₃ − √(4c₃² + 16α))/8.
pub fn sphere_gamma_hat(c3: f64, alpha: f64) -> f64 {
    // same quantity, rationalized so large c3 does not cancel
    -2.0 * alpha / (2.0 * c3 + (4.0 * c3 * c3 + 16.0 * alpha).sqrt())
}

/// Sphere term γ̂ − (α/(2c₃))·ln(1 − c₃/(2γ̂)); the c₃ → 0 limit is −√α.
pub fn i_sph(c3: f64, alpha: f64) -> f64 {
    if c3 == 0.0 {
        return -alpha.sqrt();
    }
    let g = sphere_gamma_hat(c3, alpha);
    g - alpha / (2.0 * c3) * (-c3 / (2.0 * g)).ln_1p()
}

pub fn sphere_term(c3: f64, alpha: f64) -> SphereTerm {
    SphereTerm { c3, alpha, gamma_hat: sphere_gamma_hat(c3, alpha), value: i_sph(c3, alpha) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEvaluation {
    pub c3: f64,
    pub i_set: f64,
    pub i_sph: f64,
    pub total: f64,
}

impl BoundEvaluation {
    pub fn feasible(&self) -> bool {
        self.total < 0.0
    }
}

/// −c₃/2 + I_set + I_sph.
pub fn master_condition(i_set: f64, c3: f64, alpha: f64) -> BoundEvaluation {
    let s = i_sph(c3, alpha);
    BoundEvaluation { c3, i_set, i_sph: s, total: -0.5 * c3 + i_set + s }
}

/// Quadrature settings used by the oracle; tighter than the default because
/// the log is divided by c₃.
pub fn oracle_spec() -> QuadratureSpec {
    QuadratureSpec { half_width: 10.0, panels: 64, rel_tol: 1e-13 }
}

/// ln E exp(ell(h)) for standard normal h. `p` bounds the quadratic growth
/// of `ell` (ell(h) ≤ p h² + O(|h|)), p < 1/2, which sets the window width.
pub fn log_gauss_mgf<F: Fn(f64) -> f64>(ell: F, p: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(p < 0.5) {
        return Err(Error::ConstraintViolated(format!("quadratic growth {p} >= 1/2")));
    }
    let w = spec.half_width / (1.0 - 2.0 * p).sqrt();
    let reach = breaks.iter().filter(|b| b.is_finite()).fold(0.0f64, |m, b| m.max(b.abs()));
    // locate the peak of the log-density, widening while it sits on the scan edge
    let mut r = w + reach + 10.0;
    let n = 4000;
    let (mut peak, mut top) = (0.0, f64::NEG_INFINITY);
    for _ in 0..20 {
        (peak, top) = (0.0, f64::NEG_INFINITY);
        for i in 0..=n {
            let h = -r + 2.0 * r * i as f64 / n as f64;
            let v = ell(h) - 0.5 * h * h;
            if v > top {
                top = v;
                peak = h;
            }
        }
        if peak.abs() < r * (1.0 - 2.0 / n as f64) {
            break;
        }
        r *= 2.0;
    }
    if !top.is_finite() {
        return Err(Error::NonConvergent("integrand peak is not finite".into()));
    }
    // cover every region carrying non-negligible mass, not just the top mode
    let mut extent = peak.abs();
    for i in 0..=n {
        let h = -r + 2.0 * r * i as f64 / n as f64;
        if ell(h) - 0.5 * h * h >= top - 40.0 {
            extent = extent.max(h.abs());
        }
    }
    let half = w + extent;
    let mut cuts: Vec<f64> = breaks.to_vec();
    cuts.push(peak);
    let v = integrate(|h| (ell(h) - 0.5 * h * h - top).exp(), -half, half, &cuts, spec)?;
    Ok(top + v.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln())
}

/// Set term of a lifted bound evaluated by quadrature directly from the
/// piecewise integrand. Authoritative reference for the closed forms.
pub fn exp_set_term_oracle(kind: Kind, params: &LiftParams, beta: f64, spec: &QuadratureSpec) -> Result<f64> {
    params.check()?;
    let LiftParams { c3, gamma, nu1, nu2 } = *params;
    let p = params.b();
    match kind {
        Kind::Sectional => {
            let k = c3 / (4.0 * gamma);
            let on = log_gauss_mgf(|h| k * (h.abs() + nu1).powi(2), p, &[0.0], spec)?;
            let off = log_gauss_mgf(|h| k * (h.abs() - nu1).max(0.0).powi(2), p, &[-nu1, nu1], spec)?;
            Ok(gamma + beta / c3 * on + (1.0 - beta) / c3 * off)
        }
        Kind::Strong => {
            let s = general::StrongIntegrand::new(nu1, nu2, gamma)?;
            let breaks = s.breakpoints();
            let l = log_gauss_mgf(|h| c3 * general::strong_t_integrand(h, &s), p, &breaks, spec)?;
            Ok(nu2 * (2.0 * beta - 1.0) + gamma + l / c3)
        }
        Kind::StrongNonneg => {
            let np = nonneg::NonnegStrongParams::new(params)?;
            let breaks = [np.lower_break(), nu1];
            let l = log_gauss_mgf(|h| c3 * nonneg::nonneg_t_integrand(h, &np), p, &breaks, spec)?;
            Ok(nu2 * (2.0 * beta - 1.0) + gamma + l / c3)
        }
        Kind::Weak | Kind::WeakNonneg => {
            Err(Error::Domain(format!("{kind} has no lifted set term")))
        }
    }
}

/// Closed-form set term for a lifted kind.
pub fn set_term_closed(kind: Kind, params: &LiftParams, beta: f64) -> Result<f64> {
    match kind {
        Kind::Sectional => general::sectional_set_term_lifted(beta, params),
        Kind::Strong => general::strong_set_term_lifted(beta, params),
        Kind::StrongNonneg => nonneg::strong_nonneg_set_term_lifted(beta, params),
        Kind::Weak | Kind::WeakNonneg => Err(Error::Domain(format!("{kind} has no lifted set term"))),
    }
}

/// Master condition at one parameter point of a lifted kind.
pub fn evaluate_lifted(kind: Kind, params: &LiftParams, alpha: f64, beta: f64) -> Result<BoundEvaluation> {
    let i_set = set_term_closed(kind, params, beta)?;
    Ok(master_condition(i_set, params.c3, alpha))
}
