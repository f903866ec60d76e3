//! Threshold conditions when the unknown is known to be nonnegative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lift::LiftParams;
use crate::numerics::special::SQRT_2;
use crate::numerics::{
    erfc, erfcinv, erfinv, find_root, integrate, ln_erfc, ln_erfc_diff, ln_sum_exp, minimize_scalar, norm_pdf, norm_sf,
    Bracket, QuadratureSpec,
};

const FRAC_1_SQRT_2PI: f64 = crate::numerics::special::FRAC_1_SQRT_2PI;
const LN_2SQRT2: f64 = 1.039_720_770_839_917_9;

/// Nonnegative weak characterization F(α) for fixed β.
pub fn weak_nonneg_residual(alpha: f64, beta: f64) -> Result<f64> {
    let x = erfinv(2.0 * (1.0 - alpha) / (1.0 - beta) - 1.0)?;
    Ok((1.0 - beta) * FRAC_1_SQRT_2PI * (-x * x).exp() / alpha - SQRT_2 * x)
}

/// α at which the nonnegative weak threshold equals β.
pub fn weak_nonneg_alpha_of_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("beta {beta} outside (0, 1)")));
    }
    let d = (1.0 - beta) * 1e-13;
    let f = |a: f64| weak_nonneg_residual(a, beta).unwrap_or(f64::NAN);
    find_root(f, Bracket::new(beta + d, 1.0 - d)?, 1e-15)
}

/// Derived constants of the nonnegative strong integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonnegStrongParams {
    pub c3: f64,
    pub gamma: f64,
    pub nu1: f64,
    pub nu2s: f64,
    pub p_plus: f64,
    pub q_plus: f64,
    pub r_plus: f64,
    pub r1_plus: f64,
    pub d_plus: f64,
    pub b_plus: f64,
    pub a_plus: f64,
}

impl NonnegStrongParams {
    pub fn new(params: &LiftParams) -> Result<Self> {
        params.check()?;
        let LiftParams { c3, gamma, nu1, nu2 } = *params;
        let p = c3 / (4.0 * gamma);
        let q = -c3 * nu1 / (2.0 * gamma);
        let s = (0.5 - p).sqrt();
        Ok(NonnegStrongParams {
            c3,
            gamma,
            nu1,
            nu2s: nu2,
            p_plus: p,
            q_plus: q,
            r_plus: c3 * (nu1 * nu1 / (4.0 * gamma) - nu2),
            r1_plus: c3 * (nu1 * nu1 / (4.0 * gamma) + nu2),
            d_plus: q / (2.0 * (1.0 - 2.0 * p)).sqrt(),
            b_plus: (nu1 - (8.0 * gamma * nu2).sqrt()) * s,
            a_plus: nu1 * s,
        })
    }

    /// Left end ν₁ − √(8γν₂) of the constant branch.
    pub fn lower_break(&self) -> f64 {
        self.nu1 - (8.0 * self.gamma * self.nu2s).sqrt()
    }

    fn sqrt_half_minus_p(&self) -> f64 {
        (0.5 - self.p_plus).sqrt()
    }
}

/// Per-coordinate integrand: lower parabola, constant ν₂, upper parabola.
pub fn nonneg_t_integrand(h: f64, np: &NonnegStrongParams) -> f64 {
    let u = (h - np.nu1).powi(2) / (4.0 * np.gamma);
    if h <= np.lower_break() {
        u - np.nu2s
    } else if h <= np.nu1 {
        np.nu2s
    } else {
        u + np.nu2s
    }
}

/// ln of the three pieces (lower parabola, constant, upper parabola) of
/// E e^{c₃ t⁺(h)}.
pub fn strong_nonneg_ln_pieces(np: &NonnegStrongParams) -> [f64; 3] {
    let s = np.sqrt_half_minus_p();
    let d = np.d_plus;
    let base = d * d - s.ln() - LN_2SQRT2;
    let x1 = np.lower_break();
    [
        // 2 − erfc(b⁺ − d⁺) = erfc(d⁺ − b⁺)
        base + np.r_plus + ln_erfc(d - np.b_plus),
        np.c3 * np.nu2s - std::f64::consts::LN_2 + ln_erfc_diff(x1 / SQRT_2, np.nu1 / SQRT_2),
        base + np.r1_plus + ln_erfc(np.a_plus - d),
    ]
}

/// Same pieces with the outer parabola constants left without their
/// 1/(2√2) normalization; kept only so the audit can show the deviation.
pub fn strong_nonneg_ln_pieces_unnormalized(np: &NonnegStrongParams) -> [f64; 3] {
    let [a, b, c] = strong_nonneg_ln_pieces(np);
    [a + LN_2SQRT2, b, c + LN_2SQRT2]
}

/// ln E e^{c₃ t⁺(h)} in closed form.
pub fn strong_nonneg_ln_i(params: &LiftParams) -> Result<f64> {
    let np = NonnegStrongParams::new(params)?;
    Ok(ln_sum_exp(&strong_nonneg_ln_pieces(&np)))
}

/// ν₂(2β−1) + γ + (1/c₃) ln I⁺.
pub fn strong_nonneg_set_term_lifted(beta: f64, params: &LiftParams) -> Result<f64> {
    let l = strong_nonneg_ln_i(params)?;
    Ok(params.nu2 * (2.0 * beta - 1.0) + params.gamma + l / params.c3)
}

/// c = −√2·erfinv(1−2β): the lower β-quantile of the standard normal.
pub fn nonneg_cut(beta: f64) -> Result<f64> {
    Ok(-SQRT_2 * erfinv(1.0 - 2.0 * beta)?)
}

/// E[(h−ν)² (1{h ≥ ν} + 1{h < c})] by quadrature.
pub fn strong_nonneg_direct_integral(beta: f64, nu: f64) -> Result<f64> {
    let c = nonneg_cut(beta)?;
    let spec = QuadratureSpec { half_width: 12.0, panels: 64, rel_tol: 1e-12 };
    let lo = -spec.half_width.max(6.0 - c);
    let hi = spec.half_width.max(nu + 8.0);
    integrate(
        |h| if h >= nu || h < c { (h - nu).powi(2) * norm_pdf(h) } else { 0.0 },
        lo,
        hi,
        &[c, nu],
        &spec,
    )
}

/// Closed form S₁ + S₂ + S₃ of [`strong_nonneg_direct_integral`].
pub fn strong_nonneg_direct_closed(beta: f64, nu: f64) -> Result<f64> {
    let c = nonneg_cut(beta)?;
    let tail = 0.5 * erfc(nu / SQRT_2);
    let s1 = tail + nu * norm_pdf(nu);
    let s2 = beta - c * norm_pdf(c);
    let s3 = (tail + beta) * nu * nu + 2.0 * nu * (norm_pdf(c) - norm_pdf(nu));
    Ok(s1 + s2 + s3)
}

/// Integral-backed direct value at ν; the direct condition is value < α.
pub fn strong_nonneg_direct_value(beta: f64, nu1: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::Domain(format!("beta {beta} outside (0, 1/2]")));
    }
    strong_nonneg_direct_integral(beta, nu1)
}

/// min over ν ≥ 0 of the direct nonnegative strong value; (ν*, value).
pub fn strong_nonneg_direct_min(beta: f64) -> Result<(f64, f64)> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::Domain(format!("beta {beta} outside (0, 1/2]")));
    }
    let (nu, _) =
        minimize_scalar(|nu| strong_nonneg_direct_closed(beta, nu).unwrap_or(f64::INFINITY), 0.0, 10.0, 200, 1e-11);
    Ok((nu, strong_nonneg_direct_integral(beta, nu)?))
}

/// Alternate direct evaluator through the θ fixed point
/// √(1/2π)(e^{−x_θ²} − e^{−x_β²})/(θ+β) = √2·x_θ, x_t = erfinv(1−2t),
/// giving S₁ + S₂ − (φ(c_θ) − φ(c_β))²/(θ+β).
pub fn strong_nonneg_fixed_point(beta: f64) -> Result<(f64, f64)> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::Domain(format!("beta {beta} outside (0, 1/2)")));
    }
    let cb = -nonneg_cut(beta)?;
    let pb = norm_pdf(cb);
    let f = |t: f64| match erfcinv(2.0 * t) {
        Ok(x) => {
            let ct = SQRT_2 * x;
            (norm_pdf(ct) - pb) / (t + beta) - ct
        }
        Err(_) => f64::NAN,
    };
    let top = (1.0 - beta) * (1.0 - 1e-14);
    let theta = find_root(f, Bracket::new(1e-30, top)?, 1e-16)?;
    let ct = SQRT_2 * erfcinv(2.0 * theta)?;
    let s1 = theta + ct * norm_pdf(ct);
    let s2 = beta + cb * pb;
    let v = s1 + s2 - (norm_pdf(ct) - pb).powi(2) / (theta + beta);
    debug_assert!((norm_sf(ct) - theta).abs() < 1e-9);
    Ok((theta, v))
}
