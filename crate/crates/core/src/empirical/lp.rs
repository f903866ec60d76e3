//! Small exact LPs (simplex via `minilp`).

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

fn lp_err(e: minilp::Error) -> Error {
    Error::Numerical(format!("lp: {e}"))
}

/// Basis pursuit as an LP with x = u − v, u, v ≥ 0 (v dropped when `nonneg`).
/// Returns the optimal x and ‖x‖₁.
pub fn basis_pursuit_lp(a: &DMatrix<f64>, y: &DVector<f64>, nonneg: bool) -> Result<(DVector<f64>, f64)> {
    let (m, n) = a.shape();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let u: Vec<Variable> = (0..n).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    let v: Vec<Variable> = if nonneg { Vec::new() } else { (0..n).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect() };
    for i in 0..m {
        let mut row: Vec<(Variable, f64)> = (0..n).map(|j| (u[j], a[(i, j)])).collect();
        row.extend(v.iter().enumerate().map(|(j, &vj)| (vj, -a[(i, j)])));
        lp.add_constraint(row, ComparisonOp::Eq, y[i]);
    }
    let sol = lp.solve().map_err(lp_err)?;
    let x = DVector::from_fn(n, |j, _| sol[u[j]] - v.get(j).map_or(0.0, |&vj| sol[vj]));
    Ok((x, sol.objective()))
}

/// max Σ_S b_i w_i − Σ_{Sᶜ} |w_j| over w = Nz with ‖w‖∞ ≤ 1.
pub fn sectional_pattern_lp(basis: &DMatrix<f64>, support: &[usize], signs: &[f64]) -> Result<f64> {
    let (n, d) = basis.shape();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let mut on = vec![0.0; n];
    for (&i, &b) in support.iter().zip(signs) {
        on[i] = b;
    }
    // objective on z: Σ_S b_i N_i· z
    let z: Vec<Variable> = (0..d)
        .map(|l| {
            let c: f64 = support.iter().map(|&i| on[i] * basis[(i, l)]).sum();
            lp.add_var(c, (f64::NEG_INFINITY, f64::INFINITY))
        })
        .collect();
    for i in 0..n {
        let row: Vec<(Variable, f64)> = (0..d).map(|l| (z[l], basis[(i, l)])).collect();
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, 1.0);
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, -1.0);
        if on[i] == 0.0 {
            let t = lp.add_var(-1.0, (0.0, f64::INFINITY));
            let mut plus = row.clone();
            plus.push((t, -1.0));
            lp.add_constraint(plus, ComparisonOp::Le, 0.0);
            let mut minus = row;
            minus.push((t, 1.0));
            lp.add_constraint(minus, ComparisonOp::Ge, 0.0);
        }
    }
    lp.solve().map(|s| s.objective()).map_err(lp_err)
}

/// max Σ_{Sᶜ} w_j over w = Nz with w_{Sᶜ} ≥ 0, Σ w ≤ 0 and ‖w‖∞ ≤ 1.
pub fn nonneg_support_lp(basis: &DMatrix<f64>, support: &[usize]) -> Result<f64> {
    let (n, d) = basis.shape();
    let mut in_s = vec![false; n];
    for &i in support {
        in_s[i] = true;
    }
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let z: Vec<Variable> = (0..d)
        .map(|l| {
            let c: f64 = (0..n).filter(|&i| !in_s[i]).map(|i| basis[(i, l)]).sum();
            lp.add_var(c, (f64::NEG_INFINITY, f64::INFINITY))
        })
        .collect();
    for i in 0..n {
        let row: Vec<(Variable, f64)> = (0..d).map(|l| (z[l], basis[(i, l)])).collect();
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, 1.0);
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, if in_s[i] { -1.0 } else { 0.0 });
    }
    let total: Vec<(Variable, f64)> = (0..d).map(|l| (z[l], basis.column(l).sum())).collect();
    lp.add_constraint(total, ComparisonOp::Le, 0.0);
    lp.solve().map(|s| s.objective()).map_err(lp_err)
}
