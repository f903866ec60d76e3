//! Basis pursuit, min ‖x‖₁ s.t. Ax = y (optionally x ≥ 0), by ADMM.
//!
//! The x-step projects onto {Ax = y} with a Cholesky factor of AAᵀ computed
//! once; the z-step is soft thresholding. Once the iterate's support looks
//! settled we solve the restricted system exactly and certify the result
//! with a dual feasible point.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::instance::ProblemInstance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BpConfig {
    /// Relative feasibility ‖Ax − y‖ ≤ tol‖y‖ and duality gap ≤ tol·max(1, ‖x‖₁).
    pub tol: f64,
    pub recovery_tol: f64,
    pub max_iter: usize,
    pub over_relax: f64,
    /// Iterations between support polishing attempts.
    pub polish_every: usize,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig { tol: 1e-9, recovery_tol: 1e-5, max_iter: 20_000, over_relax: 1.6, polish_every: 10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpSolution {
    pub x: DVector<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub objective: f64,
    pub duality_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub recovered: bool,
    pub rel_error: f64,
    pub solver_iterations: usize,
    pub residual: f64,
    pub objective: f64,
    pub duality_gap: f64,
}

/// Projector onto {x : Ax = y}, P(v) = v − Aᵀ(AAᵀ)⁻¹(Av − y).
pub struct AffineProjector {
    a: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

impl AffineProjector {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let gram = a * a.transpose();
        let chol = gram.cholesky().ok_or(Error::RankDeficient)?;
        let d = chol.l_dirty().diagonal();
        let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if lo <= hi * 1e-7 {
            return Err(Error::RankDeficient);
        }
        let pinv = chol.solve(a).transpose();
        Ok(AffineProjector { a: a.clone(), pinv })
    }

    pub fn project(&self, v: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let r = &self.a * v - y;
        v - &self.pinv * r
    }

    /// λ minimizing ‖Aᵀλ − g‖.
    pub fn dual_of(&self, g: &DVector<f64>) -> DVector<f64> {
        self.pinv.tr_mul(g)
    }
}

fn shrink(v: f64, t: f64, nonneg: bool) -> f64 {
    if nonneg {
        (v - t).max(0.0)
    } else if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

fn l1(x: &DVector<f64>) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Dual value of λ after scaling it into the dual feasible set.
fn dual_value(a: &DMatrix<f64>, y: &DVector<f64>, lambda: &DVector<f64>, nonneg: bool) -> f64 {
    let g = a.tr_mul(lambda);
    let worst = if nonneg { g.max() } else { g.amax() };
    let scale = worst.max(1.0);
    y.dot(lambda) / scale
}

struct Polished {
    x: DVector<f64>,
    residual: f64,
    objective: f64,
    gap: f64,
}

fn polish(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    support: &[usize],
    lambda0: &DVector<f64>,
    nonneg: bool,
) -> Option<Polished> {
    let n = a.ncols();
    let ynorm = y.norm();
    let mut x = DVector::zeros(n);
    if support.is_empty() {
        let residual = ynorm;
        let gap = -dual_value(a, y, lambda0, nonneg);
        return Some(Polished { x, residual, objective: 0.0, gap: gap.max(0.0) });
    }
    let a_s = a.select_columns(support);
    let svd = a_s.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= smax * 1e-10 {
        return None;
    }
    let x_s = svd.solve(y, 0.0).ok()?;
    if nonneg && x_s.iter().any(|&v| v < 0.0) {
        return None;
    }
    for (j, &i) in support.iter().enumerate() {
        x[i] = x_s[j];
    }
    let residual = (&a_s * &x_s - y).norm();
    let objective = l1(&x_s);
    // move λ0 onto {A_Sᵀλ = sign(x_S)}, which makes yᵀλ = ‖x_S‖₁ exactly
    let s = x_s.map(|v| if v < 0.0 { -1.0 } else { 1.0 });
    let r = s - a_s.tr_mul(lambda0);
    let u = svd.u.as_ref()?;
    let vt = svd.v_t.as_ref()?;
    let coef = (vt * r).component_div(&svd.singular_values);
    let lambda = lambda0 + u * coef;
    let gap = objective - dual_value(a, y, &lambda, nonneg).max(dual_value(a, y, lambda0, nonneg));
    Some(Polished { x, residual, objective, gap: gap.max(0.0) })
}

pub fn basis_pursuit(a: &DMatrix<f64>, y: &DVector<f64>, nonneg: bool, cfg: &BpConfig) -> Result<BpSolution> {
    let (m, n) = a.shape();
    if y.len() != m {
        return Err(Error::Dimension(format!("y has {} entries, A has {m} rows", y.len())));
    }
    let proj = AffineProjector::new(a)?;
    let ynorm = y.norm();
    if ynorm == 0.0 {
        return Ok(BpSolution { x: DVector::zeros(n), iterations: 0, residual: 0.0, objective: 0.0, duality_gap: 0.0 });
    }
    let feas = cfg.tol * ynorm;

    let x0 = proj.project(&DVector::zeros(n), y);
    let mut rho = 10.0 / x0.amax().max(f64::MIN_POSITIVE);
    let mut z = x0.clone();
    let mut u = DVector::<f64>::zeros(n);
    let mut last_support: Option<Vec<usize>> = None;
    let eps = 1e-12 * (1.0 + x0.amax());

    for it in 1..=cfg.max_iter {
        let x = proj.project(&(&z - &u), y);
        let xh = &x * cfg.over_relax + &z * (1.0 - cfg.over_relax);
        let z_old = z.clone();
        let v = &xh + &u;
        z = v.map(|vi| shrink(vi, 1.0 / rho, nonneg));
        u += &xh - &z;

        let r = (&x - &z).norm();
        let s = rho * (&z - &z_old).norm();
        if it % 10 == 0 {
            if r > 10.0 * s {
                rho *= 2.0;
                u /= 2.0;
            } else if s > 10.0 * r {
                rho /= 2.0;
                u *= 2.0;
            }
        }

        if it % cfg.polish_every == 0 || r + s < eps {
            let support: Vec<usize> = (0..n).filter(|&i| z[i] != 0.0).collect();
            if support.len() > m || last_support.as_ref() == Some(&support) && r + s >= eps {
                continue;
            }
            // λ with Aᵀλ ≈ ρu, which lies in the subdifferential of ‖z‖₁
            let lambda0 = proj.dual_of(&(&u * rho));
            if let Some(p) = polish(a, y, &support, &lambda0, nonneg) {
                if p.residual <= feas && p.gap <= cfg.tol * p.objective.max(1.0) {
                    return Ok(BpSolution {
                        x: p.x,
                        iterations: it,
                        residual: p.residual,
                        objective: p.objective,
                        duality_gap: p.gap,
                    });
                }
            }
            last_support = Some(support);
        }
    }
    Err(Error::SolverStalled(cfg.max_iter))
}

pub fn rel_error(x: &DVector<f64>, x_true: &DVector<f64>) -> f64 {
    let d = (x - x_true).norm();
    let t = x_true.norm();
    if t > 0.0 {
        d / t
    } else {
        d
    }
}

pub fn solve_basis_pursuit_with(inst: &ProblemInstance, nonneg: bool, cfg: &BpConfig) -> Result<(RecoveryReport, DVector<f64>)> {
    let sol = basis_pursuit(&inst.a, &inst.y, nonneg, cfg)?;
    let err = rel_error(&sol.x, &inst.x_true);
    let report = RecoveryReport {
        recovered: err <= cfg.recovery_tol,
        rel_error: err,
        solver_iterations: sol.iterations,
        residual: sol.residual,
        objective: sol.objective,
        duality_gap: sol.duality_gap,
    };
    Ok((report, sol.x))
}

pub fn solve_basis_pursuit(inst: &ProblemInstance, nonneg: bool, tol: f64) -> Result<RecoveryReport> {
    let cfg = BpConfig { tol, ..BpConfig::default() };
    solve_basis_pursuit_with(inst, nonneg, &cfg).map(|(r, _)| r)
}
