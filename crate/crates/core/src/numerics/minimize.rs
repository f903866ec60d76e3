//! Derivative-free local minimization: Nelder–Mead on a box, with restarts
//! and a final coordinate poll.

use crate::error::{Error, Result};

/// Per-coordinate bounds; use infinities for free coordinates.
pub type Bounds = Vec<(f64, f64)>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeConfig {
    /// Function-evaluation budget per simplex run.
    pub max_evals: usize,
    pub xtol: f64,
    pub ftol: f64,
    /// Restarts from perturbed simplices around the incumbent.
    pub restarts: usize,
    /// Initial simplex edge as a fraction of the box width (or of `|x|+1`).
    pub initial_step: f64,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig { max_evals: 4000, xtol: 1e-9, ftol: 1e-12, restarts: 3, initial_step: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

fn project(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

fn eval<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn edge(bounds: &[(f64, f64)], i: usize, x: f64, frac: f64) -> f64 {
    let (lo, hi) = bounds[i];
    let w = hi - lo;
    let h = if w.is_finite() { frac * w } else { frac * (x.abs() + 1.0) };
    // step towards the roomier side so the vertex is not clamped back onto x
    if hi - x >= x - lo {
        h
    } else {
        -h
    }
}

/// One Nelder–Mead run from `x0` with simplex edge fraction `frac`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    frac: f64,
    cfg: &MinimizeConfig,
) -> Minimum {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    project(&mut start, bounds);
    pts.push(start.clone());
    for i in 0..n {
        let mut p = start.clone();
        p[i] += edge(bounds, i, p[i], frac);
        project(&mut p, bounds);
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(f, p)).collect();
    let mut evals = n + 1;
    let mut converged = false;

    let mut order: Vec<usize> = (0..=n).collect();
    while evals < cfg.max_evals {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);

        let fspread = (vals[worst] - vals[best]).abs();
        let xspread = pts
            .iter()
            .flat_map(|p| p.iter().zip(&pts[best]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if xspread <= cfg.xtol && (fspread <= cfg.ftol || !vals[best].is_finite()) {
            converged = true;
            break;
        }
        if xspread <= cfg.xtol * 1e-3 {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&pts[i]) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid.iter().zip(&pts[worst]).map(|(c, w)| c + t * (c - w)).collect();
            project(&mut p, bounds);
            p
        };

        let xr = along(1.0);
        let fr = eval(f, &xr);
        evals += 1;
        if fr < vals[best] {
            let xe = along(2.0);
            let fe = eval(f, &xe);
            evals += 1;
            if fe < fr {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[worst] {
            let xc = along(0.5);
            let fc = eval(f, &xc);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(f, &xc);
            (xc, fc)
        };
        evals += 1;
        if fc < vals[worst].min(fr) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        // shrink towards the best vertex
        let xb = pts[best].clone();
        for &i in &order[1..] {
            for (v, b) in pts[i].iter_mut().zip(&xb) {
                *v = b + 0.5 * (*v - b);
            }
            vals[i] = eval(f, &pts[i]);
        }
        evals += n;
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    Minimum { x: pts[best].clone(), f: vals[best], evals, converged }
}

/// Local minimizer of `f` on `bounds` from `x0`.
///
/// Runs Nelder–Mead, restarts around the incumbent with shrinking simplices,
/// then polls each coordinate at `±xtol`; never returns a point worse than `x0`.
/// Fails with `MaxIterations` only if no run converged.
pub fn minimize_local<F: FnMut(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    cfg: &MinimizeConfig,
) -> Result<Minimum> {
    if bounds.len() != x0.len() {
        return Err(Error::Domain("bounds and x0 differ in dimension".into()));
    }
    let m = minimize_best(f, x0, bounds, cfg);
    if !m.converged {
        return Err(Error::MaxIterations(m.evals));
    }
    Ok(m)
}

/// As [`minimize_local`] but always returns the incumbent; check `converged`.
pub fn minimize_best<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], bounds: &[(f64, f64)], cfg: &MinimizeConfig) -> Minimum {
    let mut x = x0.to_vec();
    project(&mut x, bounds);
    let f0 = eval(&mut f, &x);
    let mut best = Minimum { x, f: f0, evals: 1, converged: false };
    let mut any_converged = false;
    let mut frac = cfg.initial_step;
    for round in 0..cfg.restarts + 4 {
        let run = nelder_mead(&mut f, &best.x, bounds, frac, cfg);
        best.evals += run.evals;
        any_converged |= run.converged;
        let improved = run.f < best.f - cfg.ftol;
        if run.f < best.f {
            best.x = run.x;
            best.f = run.f;
        }
        if round >= cfg.restarts && !improved {
            // poll: accept only if no coordinate move of xtol helps by more than ftol
            let mut moved = false;
            for i in 0..best.x.len() {
                for s in [1.0, -1.0] {
                    let mut y = best.x.clone();
                    y[i] += s * cfg.xtol.max(1e-12);
                    project(&mut y, bounds);
                    let fy = eval(&mut f, &y);
                    best.evals += 1;
                    if fy < best.f - cfg.ftol {
                        best.x = y;
                        best.f = fy;
                        moved = true;
                    }
                }
            }
            if !moved {
                break;
            }
        }
        frac = (frac * 0.5).max(1e-4);
    }
    best.converged = any_converged;
    best
}

/// Scalar minimization on `[lo, hi]`: grid scan with `n` cells, then golden
/// section inside the cells adjacent to the best grid point.
pub fn minimize_scalar<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize, xtol: f64) -> (f64, f64) {
    let n = n.max(2);
    let mut g = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let h = (hi - lo) / n as f64;
    let (mut bi, mut bv) = (0, f64::INFINITY);
    for i in 0..=n {
        let v = g(lo + h * i as f64);
        if v < bv {
            bi = i;
            bv = v;
        }
    }
    let bx = lo + h * bi as f64;
    let mut a = (bx - h).max(lo);
    let mut b = (bx + h).min(hi);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    while b - a > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d);
        }
    }
    let (x, v) = if fc < fd { (c, fc) } else { (d, fd) };
    if v < bv {
        (x, v)
    } else {
        (bx, bv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_in_box() {
        let m = minimize_local(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[(-5.0, 5.0), (-5.0, 5.0)],
            &MinimizeConfig { max_evals: 20000, ..Default::default() },
        )
        .unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m.x);
    }

    #[test]
    fn scalar_grid_then_golden() {
        let (x, v) = minimize_scalar(|x| (x - 0.3).powi(2) + 1.0, 0.0, 2.0, 20, 1e-10);
        assert!((x - 0.3).abs() < 1e-8 && (v - 1.0).abs() < 1e-15);
        let (x, _) = minimize_scalar(|x| x, 1.0, 2.0, 20, 1e-10);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = minimize_local(
            |x| x.iter().map(|v| v * v).sum(),
            &[3.0; 6],
            &vec![(-10.0, 10.0); 6],
            &MinimizeConfig { max_evals: 10, restarts: 0, ..Default::default() },
        );
        assert!(matches!(r, Err(Error::MaxIterations(_))));
    }
}
