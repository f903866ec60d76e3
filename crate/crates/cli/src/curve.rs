//! Curve files: one threshold per grid α, CSV or JSON.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use l1lab_core::{Kind, LiftParams, Method, ThresholdResult};
use serde_json::{json, Value};

use crate::fmt::{jnum, json_text, num, parse_num, round_sig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown curve format {s:?} (csv or json)")),
        }
    }
}

/// `start:stop:step` with 0 < start, stop < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl std::str::FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid {s:?} is not start:stop:step"));
        }
        let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("grid {s:?}: {e}"));
        Ok(Grid { start: p(parts[0])?, stop: p(parts[1])?, step: p(parts[2])? })
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", num(self.start), num(self.stop), num(self.step))
    }
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        if !(self.step > 0.0) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(format!("grid {self}: step must be positive"));
        }
        if !(self.start > 0.0 && self.stop < 1.0) {
            return Err(format!("grid {self} must lie inside (0, 1)"));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor();
        if count < 0.0 {
            return Err(format!("grid {self} is empty"));
        }
        if count > 1e5 {
            return Err(format!("grid {self} has more than 100000 points"));
        }
        Ok((0..=count as usize).map(|i| round_sig(self.start + i as f64 * self.step)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub kind: Kind,
    pub method: Method,
    pub version: String,
    pub grid: String,
    pub tol_beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub alpha: f64,
    pub beta: f64,
    /// NaN marks a point whose computation failed.
    pub condition_margin: f64,
    pub params: LiftParams,
}

impl CurvePoint {
    pub fn from_result(r: &ThresholdResult) -> Self {
        CurvePoint { alpha: r.alpha, beta: r.beta, condition_margin: r.condition_margin, params: r.params_at_optimum }
    }

    pub fn failed(alpha: f64) -> Self {
        CurvePoint { alpha, beta: f64::NAN, condition_margin: f64::NAN, params: LiftParams::default() }
    }

    pub fn is_failed(&self) -> bool {
        self.condition_margin.is_nan()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    pub header: Header,
    pub points: Vec<CurvePoint>,
}

const CSV_COLUMNS: &str = "kind,method,version,grid,tol_beta,alpha,beta,condition_margin,c3,gamma,nu1,nu2";

impl CurveFile {
    pub fn to_csv(&self) -> String {
        let h = &self.header;
        let mut s = String::from(CSV_COLUMNS);
        s.push('\n');
        for p in &self.points {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                h.kind,
                h.method,
                h.version,
                h.grid,
                num(h.tol_beta),
                num(p.alpha),
                num(p.beta),
                num(p.condition_margin),
                num(p.params.c3),
                num(p.params.gamma),
                num(p.params.nu1),
                num(p.params.nu2)
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        let h = &self.header;
        let points: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                json!({
                    "alpha": jnum(p.alpha),
                    "beta": jnum(p.beta),
                    "condition_margin": jnum(p.condition_margin),
                    "params_at_optimum": {
                        "c3": jnum(p.params.c3),
                        "gamma": jnum(p.params.gamma),
                        "nu1": jnum(p.params.nu1),
                        "nu2": jnum(p.params.nu2),
                    },
                })
            })
            .collect();
        let v = json!({
            "header": {
                "kind": h.kind.name(),
                "method": h.method.name(),
                "version": h.version,
                "grid": h.grid,
                "tol_beta": jnum(h.tol_beta),
            },
            "points": points,
        });
        json_text(&v)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn parse(text: &str, format: Format) -> anyhow::Result<Self> {
        match format {
            Format::Csv => parse_csv(text),
            Format::Json => parse_json(text),
        }
    }

    pub fn read(path: &Path, format: Format) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        CurveFile::parse(&text, format).with_context(|| format!("parsing {}", path.display()))
    }

    /// Write through a temporary file so an interrupted run leaves either the
    /// old or the new content.
    pub fn write(&self, path: &Path, format: Format) -> anyhow::Result<()> {
        let tmp = path.with_extension("partial.tmp");
        std::fs::write(&tmp, self.render(format)).with_context(|| format!("writing {}", tmp.display()))?;
        std::fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
        Ok(())
    }
}

fn field(s: &str) -> anyhow::Result<f64> {
    parse_num(s).ok_or_else(|| anyhow!("bad number {s:?}"))
}

fn parse_csv(text: &str) -> anyhow::Result<CurveFile> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_COLUMNS) {
        bail!("unexpected CSV header");
    }
    let mut header = None;
    let mut points = Vec::new();
    for (no, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 12 {
            bail!("row {}: expected 12 fields, found {}", no + 1, f.len());
        }
        let h = Header {
            kind: f[0].parse().map_err(|e| anyhow!("{e}"))?,
            method: f[1].parse().map_err(|e| anyhow!("{e}"))?,
            version: f[2].to_string(),
            grid: f[3].to_string(),
            tol_beta: field(f[4])?,
        };
        match &header {
            None => header = Some(h),
            Some(prev) if *prev != h => bail!("row {}: header fields differ from the first row", no + 1),
            _ => {}
        }
        points.push(CurvePoint {
            alpha: field(f[5])?,
            beta: field(f[6])?,
            condition_margin: field(f[7])?,
            params: LiftParams { c3: field(f[8])?, gamma: field(f[9])?, nu1: field(f[10])?, nu2: field(f[11])? },
        });
    }
    let header = header.ok_or_else(|| anyhow!("curve file has no rows"))?;
    Ok(CurveFile { header, points })
}

fn jfield(v: &Value, key: &str) -> anyhow::Result<f64> {
    match v.get(key) {
        Some(Value::Null) => Ok(f64::NAN),
        Some(x) => x.as_f64().ok_or_else(|| anyhow!("{key} is not a number")),
        None => bail!("missing {key}"),
    }
}

fn jstr<'a>(v: &'a Value, key: &str) -> anyhow::Result<&'a str> {
    v.get(key).and_then(Value::as_str).ok_or_else(|| anyhow!("missing {key}"))
}

fn parse_json(text: &str) -> anyhow::Result<CurveFile> {
    let v: Value = serde_json::from_str(text)?;
    let h = v.get("header").ok_or_else(|| anyhow!("missing header"))?;
    let header = Header {
        kind: jstr(h, "kind")?.parse().map_err(|e| anyhow!("{e}"))?,
        method: jstr(h, "method")?.parse().map_err(|e| anyhow!("{e}"))?,
        version: jstr(h, "version")?.to_string(),
        grid: jstr(h, "grid")?.to_string(),
        tol_beta: jfield(h, "tol_beta")?,
    };
    let mut points = Vec::new();
    for p in v.get("points").and_then(Value::as_array).ok_or_else(|| anyhow!("missing points"))? {
        let q = p.get("params_at_optimum").ok_or_else(|| anyhow!("missing params_at_optimum"))?;
        points.push(CurvePoint {
            alpha: jfield(p, "alpha")?,
            beta: jfield(p, "beta")?,
            condition_margin: jfield(p, "condition_margin")?,
            params: LiftParams { c3: jfield(q, "c3")?, gamma: jfield(q, "gamma")?, nu1: jfield(q, "nu1")?, nu2: jfield(q, "nu2")? },
        });
    }
    Ok(CurveFile { header, points })
}
