//! Composite Gauss–Legendre integration against the standard normal weight.

use std::sync::OnceLock;

use super::special::norm_pdf;
use crate::error::{Error, Result};

const ORDER: usize = 10;
const MAX_DOUBLINGS: u32 = 9;
const NOISE_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Truncation of the Gaussian window, in standard deviations.
    pub half_width: f64,
    /// Starting number of panels across the window.
    pub panels: usize,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { half_width: 10.0, panels: 64, rel_tol: 1e-9 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width >= 6.0) || self.panels < 64 || !(self.rel_tol > 0.0) {
            return Err(Error::Domain(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights on [-1, 1].
fn rule() -> &'static [(f64, f64); ORDER] {
    static RULE: OnceLock<[(f64, f64); ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut out = [(0.0, 0.0); ORDER];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (ORDER as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(ORDER, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(ORDER, x);
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

/// Fixed composite rule: `panels` panels spread over `[lo, hi]`, with
/// segment boundaries forced at every breakpoint inside the interval.
/// Returns the integral of `f` and of `|f|`.
pub fn composite<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64, breaks: &[f64], panels: usize) -> (f64, f64) {
    let mut cuts: Vec<f64> = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi && b.is_finite()).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);
    let total = hi - lo;
    let nodes = rule();
    let (mut sum, mut abs) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let np = ((panels as f64 * (b - a) / total).ceil() as usize).max(1);
        let h = (b - a) / np as f64;
        for j in 0..np {
            let mid = a + (j as f64 + 0.5) * h;
            let (mut s, mut sa) = (0.0, 0.0);
            for &(x, wt) in nodes {
                let v = f(mid + 0.5 * h * x);
                s += wt * v;
                sa += wt * v.abs();
            }
            sum += 0.5 * h * s;
            abs += 0.5 * h * sa;
        }
    }
    (sum, abs)
}

/// ∫ f over `[lo, hi]`, doubling panels until successive estimates agree to `rel_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    if !(hi > lo) {
        return Ok(0.0);
    }
    let mut panels = spec.panels;
    let (mut prev, _) = composite(&mut f, lo, hi, breaks, panels);
    let mut last_diff = f64::INFINITY;
    let mut stalls = 0;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let (cur, scale) = composite(&mut f, lo, hi, breaks, panels);
        if !cur.is_finite() {
            return Err(Error::NonConvergent(format!("non-finite integral on [{lo}, {hi}]")));
        }
        // relative to the integral of |f| so sign-cancelling integrands converge
        let diff = (cur - prev).abs();
        if diff <= spec.rel_tol * scale || cur == prev {
            return Ok(cur);
        }
        // differences that stop shrinking are rounding noise in f, not truncation error
        stalls = if diff > 0.5 * last_diff { stalls + 1 } else { 0 };
        if stalls >= 2 && diff <= NOISE_FACTOR * spec.rel_tol * scale {
            return Ok(cur);
        }
        last_diff = diff;
        prev = cur;
    }
    Err(Error::NonConvergent(format!("no agreement to {} after {panels} panels", spec.rel_tol)))
}

/// E g(h) for standard normal h, truncated to `±half_width`.
pub fn gauss_expectation<F: FnMut(f64) -> f64>(mut g: F, spec: &QuadratureSpec) -> Result<f64> {
    gauss_expectation_pw(&mut g, spec, &[])
}

/// As [`gauss_expectation`], with panel boundaries aligned to `breaks`.
pub fn gauss_expectation_pw<F: FnMut(f64) -> f64>(mut g: F, spec: &QuadratureSpec, breaks: &[f64]) -> Result<f64> {
    spec.validate()?;
    let w = spec.half_width;
    integrate(|h| g(h) * norm_pdf(h), -w, w, breaks, spec)
}
