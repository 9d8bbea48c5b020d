//! Report documents: one JSON tree per experiment plus flat CSV tables.
//!
//! The JSON layout and the CSV header order are fixed; numbers in CSV carry
//! 17 significant digits so a reader recovers the exact f64 bits.

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::stability::StabilityReport;

/// 17 significant digits: round-trip safe for 64-bit floats.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Corollary-side quantities for a quasi-norm target.  The quasi-norm is the
/// 1/p-th power of the converted F-norm, so every measured value transports
/// monotonically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiReport {
    pub p: f64,
    pub quasi_constant: f64,
    /// `b(p)^{1/p}`.
    pub bound: f64,
    pub epsilon_emp_quasi: f64,
    pub max_err_quasi: f64,
    pub max_ratio_quasi: f64,
    pub pass: bool,
}

/// The full document `verify` emits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDocument {
    pub schema_version: u32,
    pub tool: String,
    pub config: ExperimentConfig,
    pub report: Option<StabilityReport>,
    pub quasi: Option<QuasiReport>,
    pub error: Option<String>,
}

impl VerifyDocument {
    pub fn to_json(&self) -> Result<String, super::HarnessError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

pub const SAMPLES_CSV_HEADER: &str = "kind,index,n_used,last_gap,defect_f,value,bound,ratio";

/// One CSV row per sample point: the bound check rows first, then the
/// orthogonal-pair additivity rows.
pub fn samples_csv(report: &StabilityReport) -> String {
    let mut out = String::from(SAMPLES_CSV_HEADER);
    out.push('\n');
    let b_eps = report.constants.b * report.epsilon_emp;
    for row in &report.bound_rows {
        out.push_str(&format!(
            "bound,{},{},{},,{},{},{}\n",
            row.index,
            row.n_used,
            fmt_f64(row.last_gap),
            fmt_f64(row.err),
            fmt_f64(b_eps),
            fmt_f64(row.ratio),
        ));
    }
    for row in &report.pair_rows {
        out.push_str(&format!(
            "pair,{},{},,{},{},{},{}\n",
            row.index,
            row.n_used,
            fmt_f64(row.defect_f),
            fmt_f64(row.defect_g),
            fmt_f64(row.defect_bound),
            fmt_f64(row.ratio),
        ));
    }
    out
}

/// One sweep grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub amplitude: f64,
    pub epsilon_emp: f64,
    pub b: f64,
    pub max_bound_ratio: f64,
    pub max_g_defect: f64,
    pub pass: bool,
}

pub const SWEEP_CSV_HEADER: &str = "beta,amplitude,epsilon_emp,b,max_bound_ratio,max_g_defect,pass";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_f64(r.beta),
            fmt_f64(r.amplitude),
            fmt_f64(r.epsilon_emp),
            fmt_f64(r.b),
            fmt_f64(r.max_bound_ratio),
            fmt_f64(r.max_g_defect),
            r.pass,
        ));
    }
    out
}
