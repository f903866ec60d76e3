//! Monte Carlo and exhaustive checks on random Gaussian systems.

pub mod bp;
pub mod instance;
pub mod lp;
pub mod nullspace;

pub use bp::{basis_pursuit, solve_basis_pursuit, solve_basis_pursuit_with, BpConfig, BpSolution, RecoveryReport};
pub use instance::{derive_seed, generate_instance, place_on, Dims, ProblemInstance};
pub use lp::basis_pursuit_lp;
pub use nullspace::{
    k_subsets, nullspace_basis, sectional_nonneg_nullspace_holds, sectional_nullspace_holds, strong_nullspace_holds,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::par_map;

/// m = round(αn), k = round(βn).
pub fn dims_for(alpha: f64, beta: f64, n: usize) -> Result<Dims> {
    if !(alpha > 0.0 && alpha < 1.0 && beta >= 0.0 && beta <= alpha) {
        return Err(Error::Domain(format!("need 0 <= beta <= alpha < 1, got alpha = {alpha}, beta = {beta}")));
    }
    let m = (alpha * n as f64).round() as usize;
    let k = (beta * n as f64).round() as usize;
    instance::check_dims(n, m, k)?;
    Ok(Dims { n, m, k })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub seed: u64,
    pub recovered: bool,
    pub rel_error: f64,
    pub iterations: usize,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakSummary {
    pub dims: Dims,
    pub nonneg: bool,
    pub seed: u64,
    pub rate: f64,
    pub recovered: usize,
    pub failed_solves: usize,
    pub mean_iterations: f64,
    pub max_residual: f64,
    pub trials: Vec<TrialOutcome>,
}

fn run_trial(d: Dims, nonneg: bool, seed: u64, cfg: &BpConfig) -> TrialOutcome {
    let solved = generate_instance(d.n, d.m, d.k, nonneg, seed).and_then(|inst| solve_basis_pursuit_with(&inst, nonneg, cfg));
    match solved {
        Ok((r, _)) => TrialOutcome {
            seed,
            recovered: r.recovered,
            rel_error: r.rel_error,
            iterations: r.solver_iterations,
            residual: r.residual,
            error: None,
        },
        Err(e) => {
            log::warn!("trial with seed {seed} counted as a failure: {e}");
            TrialOutcome { seed, recovered: false, rel_error: f64::NAN, iterations: 0, residual: f64::NAN, error: Some(e.to_string()) }
        }
    }
}

pub fn weak_recovery(alpha: f64, beta: f64, n: usize, trials: usize, nonneg: bool, seed: u64) -> Result<WeakSummary> {
    weak_recovery_with(alpha, beta, n, trials, nonneg, seed, &BpConfig::default())
}

pub fn weak_recovery_with(
    alpha: f64,
    beta: f64,
    n: usize,
    trials: usize,
    nonneg: bool,
    seed: u64,
    cfg: &BpConfig,
) -> Result<WeakSummary> {
    let d = dims_for(alpha, beta, n)?;
    if d.k == 0 {
        return Err(Error::Domain(format!("round(beta n) must be at least 1, got beta = {beta}, n = {n}")));
    }
    if trials == 0 {
        return Err(Error::Domain("trials must be positive".into()));
    }
    let seeds: Vec<u64> = (0..trials as u64).map(|t| derive_seed(seed, t)).collect();
    let outcomes = par_map(&seeds, |&s| run_trial(d, nonneg, s, cfg));
    let recovered = outcomes.iter().filter(|o| o.recovered).count();
    let failed_solves = outcomes.iter().filter(|o| o.error.is_some()).count();
    let solved: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.error.is_none()).collect();
    let mean_iterations = if solved.is_empty() {
        0.0
    } else {
        solved.iter().map(|o| o.iterations as f64).sum::<f64>() / solved.len() as f64
    };
    let max_residual = solved.iter().map(|o| o.residual).fold(0.0, f64::max);
    Ok(WeakSummary {
        dims: d,
        nonneg,
        seed,
        rate: recovered as f64 / trials as f64,
        recovered,
        failed_solves,
        mean_iterations,
        max_residual,
        trials: outcomes,
    })
}

pub fn weak_recovery_rate(alpha: f64, beta: f64, n: usize, trials: usize, nonneg: bool, seed: u64) -> Result<f64> {
    weak_recovery(alpha, beta, n, trials, nonneg, seed).map(|s| s.rate)
}

/// α at which the Monte Carlo recovery rate crosses 1/2, by bisection down to
/// an interval of width `width`. Every probe reuses the same trial seeds.
pub fn empirical_transition_alpha(beta: f64, n: usize, trials: usize, nonneg: bool, seed: u64, width: f64) -> Result<f64> {
    if !(width > 0.0) {
        return Err(Error::Domain(format!("bisection width must be positive, got {width}")));
    }
    let mut lo = beta.max(1.0 / n as f64);
    let mut hi = (n - 1) as f64 / n as f64;
    if lo >= hi {
        return Err(Error::Domain(format!("beta = {beta} leaves no room below alpha = 1 at n = {n}")));
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if weak_recovery_rate(mid, beta, n, trials, nonneg, seed)? >= 0.5 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixVerdict {
    pub seed: u64,
    pub holds: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Null-space check on `matrices` random m×n matrices. With `sectional` a
/// random support of size k is drawn per matrix, otherwise all supports are
/// enumerated.
pub fn nullspace_survey(dims: Dims, matrices: usize, sectional: bool, nonneg: bool, seed: u64) -> Vec<MatrixVerdict> {
    let seeds: Vec<u64> = (0..matrices as u64).map(|t| derive_seed(seed, t)).collect();
    par_map(&seeds, |&s| {
        let inst = match generate_instance(dims.n, dims.m, dims.k, true, s) {
            Ok(i) => i,
            Err(e) => return MatrixVerdict { seed: s, holds: None, support: None, error: Some(e.to_string()) },
        };
        let (res, support) = if sectional {
            let res = if nonneg {
                sectional_nonneg_nullspace_holds(&inst.a, &inst.support)
            } else {
                sectional_nullspace_holds(&inst.a, &inst.support)
            };
            (res, Some(inst.support.clone()))
        } else {
            (strong_nullspace_holds(&inst.a, dims.k, nonneg), None)
        };
        match res {
            Ok(h) => MatrixVerdict { seed: s, holds: Some(h), support, error: None },
            Err(e) => MatrixVerdict { seed: s, holds: None, support, error: Some(e.to_string()) },
        }
    })
}
