//! Threshold tables and α sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lift::{Kind, Method};
use crate::par::{map_with, Exec};
use crate::threshold::{threshold_bisect, ThresholdResult};

pub const LOW_ALPHAS: [f64; 7] = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5];
pub const HIGH_ALPHAS: [f64; 8] = [0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999, 0.9999];

// Literature values, copied as published; nothing here is recomputed.
// Strong thresholds for signed x from Donoho's polytope neighborliness
// computations (centrally symmetric cross-polytope).
const DONOHO_STRONG_LOW: [f64; 7] = [0.00031, 0.00205, 0.00488, 0.01250, 0.02109, 0.03192, 0.04471];
const DONOHO_STRONG_HIGH: [f64; 8] = [0.05977, 0.07760, 0.1000, 0.1264, 0.1438, 0.1620, 0.1677, 0.1685];
// Strong thresholds for nonnegative x from Donoho and Tanner (simplex
// neighborliness).
const DONOHO_TANNER_NONNEG_LOW: [f64; 7] = [0.00033, 0.0024, 0.0060, 0.0157, 0.0287, 0.0455, 0.0667];
const DONOHO_TANNER_NONNEG_HIGH: [f64; 8] = [0.0935, 0.1280, 0.1739, 0.2399, 0.2881, 0.3463, 0.3675, 0.3750];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Column {
    Computed { kind: Kind, method: Method },
    Literature { label: &'static str, values: &'static [f64] },
}

impl Column {
    pub fn label(&self) -> String {
        match self {
            Column::Computed { kind, method } => format!("{kind} {method}"),
            Column::Literature { label, .. } => label.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableDef {
    pub id: u8,
    pub caption: &'static str,
    pub alphas: &'static [f64],
    pub columns: Vec<Column>,
}

pub fn table_def(id: u8) -> Result<TableDef> {
    use Column::*;
    let sec = |m| Computed { kind: Kind::Sectional, method: m };
    let (caption, alphas, columns): (&str, &'static [f64], Vec<Column>) = match id {
        1 => ("sectional thresholds, alpha <= 0.5", &LOW_ALPHAS, vec![sec(Method::Direct), sec(Method::Lifted)]),
        2 => ("sectional thresholds, alpha > 0.5", &HIGH_ALPHAS, vec![sec(Method::Direct), sec(Method::Lifted)]),
        3 | 4 => {
            let (alphas, lit): (&'static [f64], &'static [f64]) =
                if id == 3 { (&LOW_ALPHAS, &DONOHO_STRONG_LOW) } else { (&HIGH_ALPHAS, &DONOHO_STRONG_HIGH) };
            (
                if id == 3 { "strong thresholds, alpha <= 0.5" } else { "strong thresholds, alpha > 0.5" },
                alphas,
                vec![Literature { label: "Donoho (literature)", values: lit }, Computed { kind: Kind::Strong, method: Method::Lifted }],
            )
        }
        5 | 6 => {
            let (alphas, lit): (&'static [f64], &'static [f64]) = if id == 5 {
                (&LOW_ALPHAS, &DONOHO_TANNER_NONNEG_LOW)
            } else {
                (&HIGH_ALPHAS, &DONOHO_TANNER_NONNEG_HIGH)
            };
            (
                if id == 5 { "strong thresholds, nonnegative x, alpha <= 0.5" } else { "strong thresholds, nonnegative x, alpha > 0.5" },
                alphas,
                vec![
                    Literature { label: "Donoho-Tanner (literature)", values: lit },
                    Computed { kind: Kind::StrongNonneg, method: Method::Lifted },
                ],
            )
        }
        _ => return Err(Error::Domain(format!("no table {id}, expected 1..=6"))),
    };
    Ok(TableDef { id, caption, alphas, columns })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub beta: f64,
    pub literature: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub alpha: f64,
    pub cells: Vec<TableCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub id: u8,
    pub caption: String,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

/// Threshold at every α, in input order.
pub fn sweep(kind: Kind, method: Method, alphas: &[f64], tol_beta: f64, exec: Exec) -> Vec<Result<ThresholdResult>> {
    map_with(exec, alphas, |&a| threshold_bisect(a, kind, method, tol_beta))
}

pub fn compute_table(id: u8, tol_beta: f64, exec: Exec) -> Result<Table> {
    let def = table_def(id)?;
    let mut columns: Vec<Vec<TableCell>> = Vec::new();
    for col in &def.columns {
        let cells = match *col {
            Column::Literature { values, .. } => {
                values.iter().map(|&beta| TableCell { beta, literature: true, margin: None }).collect()
            }
            Column::Computed { kind, method } => sweep(kind, method, def.alphas, tol_beta, exec)
                .into_iter()
                .map(|r| r.map(|t| TableCell { beta: t.beta, literature: false, margin: Some(t.condition_margin) }))
                .collect::<Result<Vec<_>>>()?,
        };
        columns.push(cells);
    }
    let rows = def
        .alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| TableRow { alpha, cells: columns.iter().map(|c| c[i].clone()).collect() })
        .collect();
    Ok(Table { id, caption: def.caption.to_string(), columns: def.columns.iter().map(Column::label).collect(), rows })
}
