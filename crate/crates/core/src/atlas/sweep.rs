//! Cell-by-cell verification of region predictions over a parameter grid.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::regions::{classify_beta_params, predict, RegionTag};
use crate::error::{Error, Result};
use crate::hypergeom::{beta_series, SeriesKind, SERIES_X_MAX};
use crate::transform::{check_tol, eval, TransformKind};
use crate::zeros::{fmt17, verify_pair, Status, Violation, GRID_PER_PI};
use crate::Density;

/// One violation as recorded in sweep output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellViolation {
    /// `phi` or `psi`.
    pub function: String,
    pub k: u32,
    pub interval: [f64; 2],
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasRecord {
    pub alpha: f64,
    pub beta: f64,
    pub label: String,
    pub k_max: u32,
    pub pass: bool,
    /// `pass`, `fail`, `indeterminate`, `unclassified` or `error`.
    pub status: String,
    pub violations: Vec<CellViolation>,
    pub indeterminate: Vec<CellViolation>,
    pub horizon: f64,
    pub rules: Vec<String>,
    pub error: Option<String>,
}

/// `Φ` or `Ψ` of beta(α, β): hypergeometric series inside the series regime,
/// quadrature beyond it.
pub fn beta_transform(alpha: f64, beta: f64, kind: SeriesKind, x: f64, tol: f64) -> Result<f64> {
    if x > 0.0 && x <= SERIES_X_MAX {
        return Ok(beta_series(alpha, beta, kind, x)?.value);
    }
    let d = Density::beta(alpha, beta)?;
    let k = match kind {
        SeriesKind::Cosine => TransformKind::Cosine,
        SeriesKind::Sine => TransformKind::Sine,
    };
    Ok(eval(&d, k, x, tol)?.value)
}

fn tagged(function: &str, v: &[Violation]) -> Vec<CellViolation> {
    v.iter()
        .map(|v| CellViolation {
            function: function.to_string(),
            k: v.k,
            interval: v.interval,
            expected: v.expected.clone(),
            found: v.found.clone(),
        })
        .collect()
}

/// Classify, predict and verify a single cell. Errors are captured in the
/// record.
pub fn verify_cell(alpha: f64, beta: f64, k_max: u32, tol: f64) -> AtlasRecord {
    let mut record = AtlasRecord {
        alpha,
        beta,
        label: RegionTag::Unknown.tag().to_string(),
        k_max,
        pass: false,
        status: "error".into(),
        violations: Vec::new(),
        indeterminate: Vec::new(),
        horizon: (k_max as f64 + 1.0) * std::f64::consts::PI,
        rules: Vec::new(),
        error: None,
    };
    let label = match classify_beta_params(alpha, beta) {
        Ok(l) => l,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    record.label = label.tag.tag().to_string();
    let (phi_pred, psi_pred) = match predict(&label, k_max) {
        Ok(p) => p,
        Err(Error::NoPrediction(_)) => {
            record.pass = true;
            record.status = "unclassified".into();
            return record;
        }
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    let phi = |x: f64| beta_transform(alpha, beta, SeriesKind::Cosine, x, tol);
    let psi = |x: f64| beta_transform(alpha, beta, SeriesKind::Sine, x, tol);
    match verify_pair(&phi, &phi_pred, &psi, &psi_pred, tol, GRID_PER_PI) {
        Ok((rf, rg)) => {
            record.horizon = rf.horizon.max(rg.horizon);
            record.violations = tagged("phi", &rf.violations);
            record.violations.extend(tagged("psi", &rg.violations));
            record.indeterminate = tagged("phi", &rf.indeterminate);
            record.indeterminate.extend(tagged("psi", &rg.indeterminate));
            record.pass = rf.pass && rg.pass;
            let status = match (rf.status(), rg.status()) {
                (Status::Fail, _) | (_, Status::Fail) => "fail",
                (Status::Indeterminate, _) | (_, Status::Indeterminate) => "indeterminate",
                _ => "pass",
            };
            record.status = status.into();
            let mut rules = phi_pred.rules.clone();
            for r in psi_pred.rules {
                if !rules.contains(&r) {
                    rules.push(r);
                }
            }
            record.rules = rules;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Verify every cell of `alpha_grid × beta_grid` in parallel. Output is
/// ordered by `(α, β)` regardless of scheduling.
pub fn sweep(alpha_grid: &[f64], beta_grid: &[f64], k_max: u32, tol: f64) -> Result<Vec<AtlasRecord>> {
    check_tol(tol)?;
    for &v in alpha_grid.iter().chain(beta_grid) {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Argument(format!("grid value {v} must be positive and finite")));
        }
    }
    let cells: Vec<(f64, f64)> = alpha_grid
        .iter()
        .flat_map(|&a| beta_grid.iter().map(move |&b| (a, b)))
        .collect();
    let mut records: Vec<AtlasRecord> = cells.par_iter().map(|&(a, b)| verify_cell(a, b, k_max, tol)).collect();
    records.sort_by(|p, q| p.alpha.total_cmp(&q.alpha).then(p.beta.total_cmp(&q.beta)));
    Ok(records)
}

/// Parse `LO:HI:STEP` into the decimal grid `LO, LO+STEP, ..., HI`.
///
/// Values are formed as integer multiples of `10^-d` (with `d` the largest
/// number of decimals among the three fields) so that `0.3` is the double
/// nearest to 3/10, not `0.1 + 0.1 + 0.1`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Argument(format!("grid `{spec}` must be LO:HI:STEP with LO <= HI and STEP > 0"));
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let decimals = parts
        .iter()
        .map(|p| p.split_once('.').map_or(0, |(_, f)| f.len()))
        .max()
        .unwrap_or(0);
    if decimals > 12 {
        return Err(bad());
    }
    let scale = 10f64.powi(decimals as i32);
    let mut ints = [0i64; 3];
    for (slot, p) in ints.iter_mut().zip(&parts) {
        let v: f64 = p.parse().map_err(|_| bad())?;
        *slot = (v * scale).round() as i64;
    }
    let [lo, hi, step] = ints;
    if step <= 0 || hi < lo {
        return Err(bad());
    }
    let n = (hi - lo) / step;
    if n > 100_000 {
        return Err(bad());
    }
    Ok((0..=n).map(|i| (lo + i * step) as f64 / scale).collect())
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(out: &mut W, records: &[AtlasRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub const ATLAS_CSV_HEADER: &str = "alpha,beta,label,k_max,pass,status,horizon,violation_count,violations";

/// Flattened CSV: violations are joined into one quoted field.
pub fn write_csv<W: Write>(out: &mut W, records: &[AtlasRecord]) -> std::io::Result<()> {
    writeln!(out, "{ATLAS_CSV_HEADER}")?;
    for r in records {
        let joined = r
            .violations
            .iter()
            .map(|v| {
                format!(
                    "{} k={} ({}, {}) expected {} found {}",
                    v.function,
                    v.k,
                    fmt17(v.interval[0]),
                    fmt17(v.interval[1]),
                    v.expected,
                    v.found
                )
            })
            .collect::<Vec<_>>()
            .join("; ");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},\"{}\"",
            fmt17(r.alpha),
            fmt17(r.beta),
            r.label,
            r.k_max,
            r.pass,
            r.status,
            fmt17(r.horizon),
            r.violations.len(),
            joined.replace('"', "\"\"")
        )?;
    }
    Ok(())
}
