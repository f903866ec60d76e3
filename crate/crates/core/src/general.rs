//! Threshold conditions for general (signed) unknowns: weak characterization,
//! sectional and strong set terms, direct and lifted.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lift::LiftParams;
use crate::numerics::special::{FRAC_1_SQRT_2PI, SQRT_2};
use crate::numerics::{
    erf, erfc, erfinv, find_root, integrate, ln_erfc, ln_erfc_diff, ln_sum_exp, minimize_scalar, norm_pdf, Bracket,
    QuadratureSpec,
};

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
const LN_2SQRT2: f64 = 1.039_720_770_839_917_9; // ln(2√2)

/// Weak-threshold characterization F(α) for fixed β; its root in (β, 1) is α_w.
pub fn weak_residual(alpha: f64, beta: f64) -> Result<f64> {
    let x = erfinv((1.0 - alpha) / (1.0 - beta))?;
    Ok((1.0 - beta) * SQRT_2_OVER_PI * (-x * x).exp() / alpha - SQRT_2 * x)
}

/// α_w(β): the measurement ratio at which the weak threshold equals β.
pub fn weak_alpha_of_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("beta {beta} outside (0, 1)")));
    }
    let d = (1.0 - beta) * 1e-13;
    let f = |a: f64| weak_residual(a, beta).unwrap_or(f64::NAN);
    find_root(f, Bracket::new(beta + d, 1.0 - d)?, 1e-15)
}

/// √(β(ν²+1+2√(2/π)ν) + (1−β)(erfc(ν/√2)(1+ν²) − 2νe^{−ν²/2}/√(2π))).
pub fn sectional_set_term_direct(beta: f64, nu: f64) -> Result<f64> {
    let on = nu * nu + 1.0 + 2.0 * SQRT_2_OVER_PI * nu;
    let off = erfc(nu / SQRT_2) * (1.0 + nu * nu) - 2.0 * nu * norm_pdf(nu);
    let rad = beta * on + (1.0 - beta) * off;
    if rad < 0.0 {
        // tiny negatives are rounding in the far tail
        if rad > -1e-15 {
            return Ok(0.0);
        }
        return Err(Error::NegativeRadicand(rad));
    }
    Ok(rad.sqrt())
}

/// min over ν ≥ 0 of the direct sectional set term; returns (ν*, value).
pub fn sectional_direct_min(beta: f64) -> (f64, f64) {
    minimize_scalar(|nu| sectional_set_term_direct(beta, nu).unwrap_or(f64::INFINITY), 0.0, 12.0, 240, 1e-11)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionalIntegrals {
    pub b: f64,
    pub nu: f64,
    pub i1: f64,
    pub i2: f64,
    pub ln_i1: f64,
    pub ln_i2: f64,
}

/// Closed forms of E e^{b(|h|+ν)²} and E e^{b·max(|h|−ν,0)²}.
pub fn sectional_integrals(b: f64, nu: f64) -> Result<SectionalIntegrals> {
    if !(b > 0.0 && b < 0.5) || !(nu >= 0.0) {
        return Err(Error::ConstraintViolated(format!("need 0 < b < 1/2 and nu >= 0, got b={b}, nu={nu}")));
    }
    let one = 1.0 - 2.0 * b;
    let lead = b * nu * nu / one - 0.5 * one.ln();
    let ln_i1 = lead + (1.0 + erf(SQRT_2 * b * nu / one.sqrt())).ln();
    let ln_i2 = ln_sum_exp(&[lead + ln_erfc(nu / (2.0 * one).sqrt()), erf(nu / SQRT_2).ln()]);
    Ok(SectionalIntegrals { b, nu, i1: ln_i1.exp(), i2: ln_i2.exp(), ln_i1, ln_i2 })
}

/// γ + (β/c₃)ln I₁ + ((1−β)/c₃)ln I₂ at the given parameters.
pub fn sectional_set_term_lifted(beta: f64, params: &LiftParams) -> Result<f64> {
    params.check()?;
    let s = sectional_integrals(params.b(), params.nu1)?;
    Ok(params.gamma + beta / params.c3 * s.ln_i1 + (1.0 - beta) / params.c3 * s.ln_i2)
}

/// Which pieces of the strong integrand are active on h ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// ν₁² < 2γν₂: constant, then the lower parabola, then the upper one.
    One,
    /// 2γν₂ ≤ ν₁² < 8γν₂: constant, then the upper parabola.
    Two,
    /// ν₁² ≥ 8γν₂: upper parabola throughout.
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongIntegrand {
    pub nu1: f64,
    pub nu2s: f64,
    pub gamma_s: f64,
    pub regime: Regime,
}

impl StrongIntegrand {
    pub fn new(nu1: f64, nu2s: f64, gamma_s: f64) -> Result<Self> {
        if !(nu1 >= 0.0 && nu2s >= 0.0 && gamma_s > 0.0) {
            return Err(Error::ConstraintViolated(format!(
                "need nu1, nu2 >= 0 and gamma > 0, got ({nu1}, {nu2s}, {gamma_s})"
            )));
        }
        let n2 = nu1 * nu1;
        let regime = if n2 < 2.0 * gamma_s * nu2s {
            Regime::One
        } else if n2 < 8.0 * gamma_s * nu2s {
            Regime::Two
        } else {
            Regime::Three
        };
        Ok(StrongIntegrand { nu1, nu2s, gamma_s, regime })
    }

    /// Point on h ≥ 0 where the active piece changes beyond the constant part.
    pub fn crossing(&self) -> f64 {
        match self.regime {
            Regime::One if self.nu1 > 0.0 => 2.0 * self.gamma_s * self.nu2s / self.nu1,
            Regime::One => f64::INFINITY,
            Regime::Two => (8.0 * self.gamma_s * self.nu2s).sqrt() - self.nu1,
            Regime::Three => 0.0,
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let x = self.crossing();
        let mut v = vec![0.0, -self.nu1, self.nu1];
        if x.is_finite() {
            v.extend([-x, x]);
        }
        v
    }
}

/// Per-coordinate integrand of the strong set term.
pub fn strong_t_integrand(h: f64, s: &StrongIntegrand) -> f64 {
    let (a, n1, n2, g) = (h.abs(), s.nu1, s.nu2s, s.gamma_s);
    if a >= n1 {
        (a * a + n1 * n1) / (4.0 * g) + (a * n1 / (2.0 * g) - n2).abs()
    } else {
        ((a + n1).powi(2) / (4.0 * g) - n2).max(n2)
    }
}

/// Closed-form ln E e^{c₃ t(h)} for the strong integrand.
pub fn strong_ln_i(params: &LiftParams) -> Result<f64> {
    params.check()?;
    let LiftParams { c3, gamma, nu1, nu2 } = *params;
    let s = StrongIntegrand::new(nu1, nu2, gamma)?;
    let p = c3 / (4.0 * gamma);
    let q = c3 * nu1 / (2.0 * gamma);
    let r = c3 * (nu1 * nu1 / (4.0 * gamma) - nu2);
    let r1 = c3 * (nu1 * nu1 / (4.0 * gamma) + nu2);
    let sq = (0.5 - p).sqrt();
    let d = q / (2.0 * (1.0 - 2.0 * p)).sqrt();
    // ln of C₁/(2√2) and C₁₂/(2√2)
    let lc1 = d * d + r - sq.ln() - LN_2SQRT2;
    let lc12 = d * d + r1 - sq.ln() - LN_2SQRT2;
    let lflat = c3 * nu2 - LN_2;
    let x = s.crossing();
    let pieces = match s.regime {
        Regime::One => [
            lc1 + ln_erfc(x * sq - d),
            lc12 + ln_erfc_diff(nu1 * sq + d, x * sq + d),
            lflat + erf(nu1 / SQRT_2).ln(),
        ],
        Regime::Two => [
            lc1 + ln_erfc(nu1 * sq - d),
            lflat + erf(x / SQRT_2).ln(),
            lc1 + ln_erfc_diff(x * sq - d, nu1 * sq - d),
        ],
        Regime::Three => [
            lc1 + ln_erfc(nu1 * sq - d),
            lc1 + ln_erfc_diff(-d, nu1 * sq - d),
            f64::NEG_INFINITY,
        ],
    };
    // the integrand is even, so integrate h ≥ 0 and double
    Ok(LN_2 + ln_sum_exp(&pieces))
}

/// ν₂(2β−1) + γ + (1/c₃) ln I at the given parameters.
pub fn strong_set_term_lifted(beta: f64, params: &LiftParams) -> Result<f64> {
    let l = strong_ln_i(params)?;
    Ok(params.nu2 * (2.0 * beta - 1.0) + params.gamma + l / params.c3)
}

/// c = √2·erfinv(1−β): P(|h| ≥ c) = β.
pub fn strong_cut(beta: f64) -> Result<f64> {
    Ok(SQRT_2 * erfinv(1.0 - beta)?)
}

/// E[(|h|+ν)² 1{|h|≥c}] + E[(|h|−ν)² 1{ν≤|h|<c}] by quadrature, ν clamped to [0, c].
pub fn strong_direct_integral(beta: f64, nu: f64) -> Result<f64> {
    let c = strong_cut(beta)?;
    let nu = nu.clamp(0.0, c);
    let spec = QuadratureSpec { half_width: 12.0, panels: 64, rel_tol: 1e-12 };
    let hw = spec.half_width.max(c + 6.0);
    // even integrand: twice the h ≥ 0 half
    let v = integrate(
        |h| {
            let w = if h >= c {
                (h + nu).powi(2)
            } else if h >= nu {
                (h - nu).powi(2)
            } else {
                0.0
            };
            w * norm_pdf(h)
        },
        0.0,
        hw,
        &[nu, c],
        &spec,
    )?;
    Ok(2.0 * v)
}

/// Closed form of [`strong_direct_integral`]:
/// (1+ν²)erfc(ν/√2) + (4ν/√(2π))(2e^{−c²/2} − ½e^{−ν²/2}).
pub fn strong_direct_closed(beta: f64, nu: f64) -> Result<f64> {
    let c = strong_cut(beta)?;
    let nu = nu.clamp(0.0, c);
    Ok((1.0 + nu * nu) * erfc(nu / SQRT_2)
        + 4.0 * nu * FRAC_1_SQRT_2PI * (2.0 * (-0.5 * c * c).exp() - 0.5 * (-0.5 * nu * nu).exp()))
}

/// min over ν ∈ [0, c] of the direct strong value (integral form); (ν*, value).
pub fn strong_direct_min(beta: f64) -> Result<(f64, f64)> {
    let c = strong_cut(beta)?;
    // closed form locates the minimizer, the integral form certifies the value
    let (nu, _) = minimize_scalar(|nu| strong_direct_closed(beta, nu).unwrap_or(f64::INFINITY), 0.0, c, 200, 1e-11);
    Ok((nu, strong_direct_integral(beta, nu)?))
}

/// Direct strong condition: min over ν of the value is below α.
pub fn strong_condition_direct(beta: f64, alpha: f64) -> Result<bool> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::Domain(format!("beta {beta} outside (0, 1/2]")));
    }
    Ok(strong_direct_min(beta)?.1 < alpha)
}

/// Direct strong value through the stationarity condition in θ = P(|h| ≥ ν):
/// (√(2/π)e^{−x_θ²} − 2√(2/π)e^{−x_β²})/θ = √2·x_θ with x_t = erfinv(1 − t).
/// When no interior root exists the minimum sits at ν = 0.
pub fn strong_direct_fixed_point(beta: f64) -> Result<f64> {
    let c = strong_cut(beta)?;
    let k = 2.0 * SQRT_2_OVER_PI * (-0.5 * c * c).exp();
    let f = |t: f64| match erfinv(1.0 - t) {
        Ok(x) => (SQRT_2_OVER_PI * (-x * x).exp() - k) / t - SQRT_2 * x,
        Err(_) => f64::NAN,
    };
    let top = 1.0 - 1e-15;
    if f(top) <= 0.0 {
        return strong_direct_integral(beta, 0.0);
    }
    let theta = find_root(f, Bracket::new(beta, top)?, 1e-15)?;
    strong_direct_integral(beta, strong_cut(theta)?)
}
