//! Exhaustive null-space checks for the sectional and strong conditions.
//!
//! Each check reduces to LPs over w = Nz, where the columns of N are an
//! orthonormal basis of null(A). The sphere normalization is replaced by
//! ‖w‖∞ ≤ 1; only the sign of the optimum matters.

use nalgebra::DMatrix;

use super::lp::{nonneg_support_lp, sectional_pattern_lp};
use crate::error::{Error, Result};
use crate::par::par_map;

pub const SECTIONAL_MAX_N: usize = 24;
pub const SECTIONAL_MAX_K: usize = 8;
pub const STRONG_MAX_N: usize = 18;
pub const STRONG_MAX_K: usize = 4;

/// Optima at or below this count as "no violating direction".
pub const LP_SLACK: f64 = 1e-9;

/// Orthonormal basis (n × (n − m)) of null(A) from a QR factorization of Aᵀ.
pub fn nullspace_basis(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (m, n) = a.shape();
    if m >= n {
        return Err(Error::Dimension(format!("A is {m}×{n}, null space is trivial")));
    }
    let mut square = DMatrix::zeros(n, n);
    square.view_mut((0, 0), (n, m)).copy_from(&a.transpose());
    let qr = square.qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    if (0..m).any(|i| r[(i, i)].abs() <= scale * 1e-10) {
        return Err(Error::RankDeficient);
    }
    Ok(qr.q().columns(m, n - m).into_owned())
}

fn check_support(n: usize, support: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in support {
        if i >= n || seen[i] {
            return Err(Error::Dimension(format!("bad support index {i} for n = {n}")));
        }
        seen[i] = true;
    }
    Ok(())
}

fn sectional_with_basis(basis: &DMatrix<f64>, support: &[usize]) -> Result<bool> {
    let k = support.len();
    if k == 0 {
        return Ok(true);
    }
    // w and −w give the same violation, so fix the first sign to +1
    for pattern in 0..(1usize << (k - 1)) {
        let signs: Vec<f64> =
            (0..k).map(|j| if j > 0 && pattern >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 }).collect();
        if sectional_pattern_lp(basis, support, &signs)? > LP_SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

fn nonneg_with_basis(basis: &DMatrix<f64>, support: &[usize]) -> Result<bool> {
    Ok(nonneg_support_lp(basis, support)? <= LP_SLACK)
}

/// True iff ‖w_S‖₁ < ‖w_Sᶜ‖₁ for every nonzero w in null(A).
pub fn sectional_nullspace_holds(a: &DMatrix<f64>, support: &[usize]) -> Result<bool> {
    let (_, n) = a.shape();
    if n > SECTIONAL_MAX_N || support.len() > SECTIONAL_MAX_K {
        return Err(Error::Dimension(format!(
            "sectional check needs n <= {SECTIONAL_MAX_N} and k <= {SECTIONAL_MAX_K}, got n = {n}, k = {}",
            support.len()
        )));
    }
    check_support(n, support)?;
    if support.is_empty() {
        return Ok(true);
    }
    sectional_with_basis(&nullspace_basis(a)?, support)
}

/// Nonnegative version for one support: no nonzero w in null(A) with
/// w_{Sᶜ} ≥ 0 and Σ w ≤ 0.
pub fn sectional_nonneg_nullspace_holds(a: &DMatrix<f64>, support: &[usize]) -> Result<bool> {
    let (_, n) = a.shape();
    if n > SECTIONAL_MAX_N || support.len() > SECTIONAL_MAX_K {
        return Err(Error::Dimension(format!(
            "sectional check needs n <= {SECTIONAL_MAX_N} and k <= {SECTIONAL_MAX_K}, got n = {n}, k = {}",
            support.len()
        )));
    }
    check_support(n, support)?;
    if support.is_empty() {
        return Ok(true);
    }
    nonneg_with_basis(&nullspace_basis(a)?, support)
}

/// All k-subsets of 0..n in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Sectional (or its nonnegative variant) for every support of size k.
pub fn strong_nullspace_holds(a: &DMatrix<f64>, k: usize, nonneg: bool) -> Result<bool> {
    let (m, n) = a.shape();
    if n > STRONG_MAX_N || k > STRONG_MAX_K {
        return Err(Error::Dimension(format!(
            "strong check needs n <= {STRONG_MAX_N} and k <= {STRONG_MAX_K}, got n = {n}, k = {k}"
        )));
    }
    if k > m {
        return Err(Error::Dimension(format!("need k <= m, got k = {k}, m = {m}")));
    }
    if k == 0 {
        return Ok(true);
    }
    let basis = nullspace_basis(a)?;
    let supports = k_subsets(n, k);
    let verdicts = par_map(&supports, |s| {
        if nonneg {
            nonneg_with_basis(&basis, s)
        } else {
            sectional_with_basis(&basis, s)
        }
    });
    for v in verdicts {
        if !v? {
            return Ok(false);
        }
    }
    Ok(true)
}
