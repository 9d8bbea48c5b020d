//! Orchestration for the four CLI verbs.

use serde::Serialize;

use super::config::{BuiltExperiment, ExperimentConfig, SpaceYKind};
use super::report::{
    fmt_f64, samples_csv, sweep_csv, QuasiReport, SweepRow, VerifyDocument,
};
use super::HarnessError;
use crate::fspace::{check_beta_homogeneity, check_triangle, AxiomReport, BetaSpace};
use crate::maps::NoiseKind;
use crate::measure::guarded_ratio;
use crate::ortho::{check_def14_axiom1, Def14Report, OrthoRelation};
use crate::stability::{
    constant_b, quasi_bound, verify_theorem, StabilityConstants, StabilityReport,
};

pub struct VerifyOutcome {
    pub document: VerifyDocument,
    pub json: String,
    pub csv: Option<String>,
    pub summary: String,
    /// Exit-code contract: true iff every configured check passed.
    pub ok: bool,
}

fn quasi_extension(
    report: &StabilityReport,
    built: &BuiltExperiment,
) -> Result<Option<QuasiReport>, HarnessError> {
    let Some(quasi) = &built.quasi else {
        return Ok(None);
    };
    let p = quasi.p;
    let bound = quasi_bound(p, built.verify.series_tol)?;
    // The quasi-norm is the 1/p-th power of the converted F-norm, so maxima
    // transport monotonically.
    let epsilon_emp_quasi = report.epsilon_emp.powf(1.0 / p);
    let max_err_quasi = report.max_bound_err.powf(1.0 / p);
    let max_ratio_quasi = guarded_ratio(max_err_quasi, bound * epsilon_emp_quasi);
    Ok(Some(QuasiReport {
        p,
        quasi_constant: quasi.quasi_constant(),
        bound,
        epsilon_emp_quasi,
        max_err_quasi,
        max_ratio_quasi,
        pass: max_ratio_quasi <= 1.0 + built.verify.report_tol,
    }))
}

fn verify_summary(doc: &VerifyDocument) -> String {
    let mut s = String::new();
    match (&doc.report, &doc.error) {
        (Some(r), _) => {
            s.push_str(&format!(
                "constants: beta={} a={} b={} (truncated at n={}, tail <= {:e})\n",
                r.constants.beta, r.constants.a, r.constants.b, r.constants.truncation_n,
                r.constants.tail_bound
            ));
            s.push_str(&format!(
                "defect: declared eps={} measured eps={} budget_honored={}\n",
                r.epsilon_declared, r.epsilon_emp, r.budget_honored
            ));
            s.push_str(&format!(
                "bound: max err={:e} vs b*eps={:e} ratio={:e}\n",
                r.max_bound_err,
                r.constants.b * r.epsilon_emp,
                r.max_bound_ratio
            ));
            s.push_str(&format!(
                "additivity: max defect={:e} ceiling={:e} ratio vs decay bound={:e}\n",
                r.max_g_defect, r.additivity_tolerance, r.max_g_defect_ratio
            ));
            s.push_str(&format!("cauchy: max gap excess over bound={:e}\n", r.max_gap_excess));
            if let Some(q) = &doc.quasi {
                s.push_str(&format!(
                    "quasi: p={} C={} b^(1/p)={} max err={:e} ratio={:e} pass={}\n",
                    q.p, q.quasi_constant, q.bound, q.max_err_quasi, q.max_ratio_quasi, q.pass
                ));
            }
            let ok = r.pass && r.budget_honored && doc.quasi.as_ref().map_or(true, |q| q.pass);
            s.push_str(if ok { "PASS\n" } else { "FAIL\n" });
        }
        (None, Some(e)) => {
            s.push_str(&format!("ERROR: {e}\n"));
        }
        (None, None) => s.push_str("empty document\n"),
    }
    s
}

/// Runs one experiment.  Estimate failures land in the document's `error`
/// field with a partial report semantics (exit is nonzero); config errors
/// surface as `Err`.
pub fn run_verify(config: &ExperimentConfig) -> Result<VerifyOutcome, HarnessError> {
    let built = config.build()?;
    let (report, quasi, error) = match verify_theorem(&built.map, &built.relation, &built.verify) {
        Ok(report) => {
            let quasi = quasi_extension(&report, &built)?;
            (Some(report), quasi, None)
        }
        Err(e) => (None, None, Some(e.to_string())),
    };
    let ok = match (&report, &error) {
        (Some(r), None) => {
            r.pass && r.budget_honored && quasi.as_ref().map_or(true, |q| q.pass)
        }
        _ => false,
    };
    // The embedded config drops the worker count so the document is
    // byte-identical for any execution width.
    let mut config_echo = config.clone();
    config_echo.run.workers = None;
    let document = VerifyDocument {
        schema_version: super::config::SCHEMA_VERSION,
        tool: "orthostab".to_string(),
        config: config_echo,
        report,
        quasi,
        error,
    };
    let json = document.to_json()?;
    let csv = document.report.as_ref().map(samples_csv);
    let summary = verify_summary(&document);
    Ok(VerifyOutcome {
        document,
        json,
        csv,
        summary,
        ok,
    })
}

pub struct ConstantsRequest {
    pub beta: Option<f64>,
    pub p: Option<f64>,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsOutcome {
    pub constants: StabilityConstants,
    pub quasi_bound: Option<f64>,
    #[serde(skip)]
    pub table: String,
    #[serde(skip)]
    pub csv: String,
}

impl ConstantsOutcome {
    pub fn to_json(&self) -> Result<String, HarnessError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

pub fn run_constants(req: &ConstantsRequest) -> Result<ConstantsOutcome, HarnessError> {
    let (exponent, quasi) = match (req.beta, req.p) {
        (Some(beta), None) => (beta, false),
        (None, Some(p)) => (p, true),
        _ => {
            return Err(HarnessError::Invalid(
                "give exactly one of --beta or --p".into(),
            ))
        }
    };
    let constants = constant_b(exponent, req.tol)?;
    let qb = if quasi {
        Some(quasi_bound(exponent, req.tol)?)
    } else {
        None
    };
    let mut table = format!(
        "{} = {}\na = {}\nb = {}\ntruncation_n = {}\ntail_bound = {:e}\n",
        if quasi { "p" } else { "beta" },
        constants.beta,
        constants.a,
        constants.b,
        constants.truncation_n,
        constants.tail_bound
    );
    if let Some(qb) = qb {
        table.push_str(&format!("b^(1/p) = {qb}\n"));
    }
    let csv = format!(
        "exponent,a,b,truncation_n,tail_bound,quasi_bound\n{},{},{},{},{},{}\n",
        fmt_f64(constants.beta),
        fmt_f64(constants.a),
        fmt_f64(constants.b),
        constants.truncation_n,
        fmt_f64(constants.tail_bound),
        qb.map(fmt_f64).unwrap_or_default(),
    );
    Ok(ConstantsOutcome {
        constants,
        quasi_bound: qb,
        table,
        csv,
    })
}

pub struct AxiomsRequest {
    /// Target space to run the F-norm checks on.
    pub space: Option<BetaSpace>,
    /// Relation and carrier dimension for the closure checks.
    pub relation: Option<(OrthoRelation, usize)>,
    pub samples: usize,
    pub seed: u64,
    /// Violation threshold for the norm checks.
    pub tol: f64,
    /// Inverts the exit semantics of the relation check: the documented
    /// expected-failure mode for Pythagorean orthogonality.
    pub expect_violation: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomsOutcome {
    pub space_reports: Vec<(String, AxiomReport)>,
    pub def14: Option<Def14Report>,
    pub ok: bool,
    #[serde(skip)]
    pub summary: String,
}

impl AxiomsOutcome {
    pub fn to_json(&self) -> Result<String, HarnessError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

pub fn run_axioms(req: &AxiomsRequest) -> Result<AxiomsOutcome, HarnessError> {
    if req.space.is_none() && req.relation.is_none() {
        return Err(HarnessError::Invalid(
            "nothing to check: give a space and/or a relation".into(),
        ));
    }
    let mut space_reports = Vec::new();
    let mut summary = String::new();
    let mut norms_clean = true;
    if let Some(space) = &req.space {
        let hom = check_beta_homogeneity(space, req.samples, (-4.0, 4.0), req.seed, req.tol)?;
        let tri = check_triangle(space, req.samples, req.seed.wrapping_add(1), req.tol)?;
        for (name, rep) in [("beta-homogeneity", &hom), ("triangle", &tri)] {
            summary.push_str(&format!(
                "{name}: {} samples, {} violations, max violation {:e}\n",
                rep.samples, rep.violations, rep.max_violation
            ));
            norms_clean &= rep.violations == 0;
        }
        space_reports.push(("beta-homogeneity".to_string(), hom));
        space_reports.push(("triangle".to_string(), tri));
    }
    let mut def14 = None;
    let mut relation_ok = true;
    if let Some((rel, dim)) = &req.relation {
        let rep = check_def14_axiom1(rel, *dim, req.samples, req.seed.wrapping_add(2))?;
        summary.push_str(&format!(
            "closure: {} pairs, violations x⊥-y: {}, -x⊥y: {}, 2x⊥2y: {}\n",
            rep.pairs, rep.violations_negated_y, rep.violations_negated_x, rep.violations_doubled
        ));
        if let Some(w) = &rep.worst {
            if rep.total_violations() > 0 {
                summary.push_str(&format!(
                    "worst witness [{}]: inputs {:?}, raw residual {}\n",
                    w.label, w.inputs, w.lhs
                ));
            }
        }
        let found = rep.total_violations() > 0;
        relation_ok = if req.expect_violation { found } else { !found };
        def14 = Some(rep);
    }
    let ok = norms_clean && relation_ok;
    summary.push_str(if ok { "PASS\n" } else { "FAIL\n" });
    Ok(AxiomsOutcome {
        space_reports,
        def14,
        ok,
        summary,
    })
}

pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub csv: String,
    pub summary: String,
    pub ok: bool,
}

/// Runs the verification across a beta and/or amplitude grid.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutcome, HarnessError> {
    let Some(sweep) = &config.sweep else {
        return Err(HarnessError::Invalid(
            "sweep needs a [sweep] table with beta_grid and/or amplitude_grid".into(),
        ));
    };
    if sweep.beta_grid.is_empty() && sweep.amplitude_grid.is_empty() {
        return Err(HarnessError::Invalid("sweep grid is empty".into()));
    }
    if config.space_y.kind == SpaceYKind::LpQuasi && !sweep.beta_grid.is_empty() {
        return Err(HarnessError::Invalid(
            "beta sweeps need a beta-homogeneous target".into(),
        ));
    }
    let betas = if sweep.beta_grid.is_empty() {
        vec![config.space_y.beta.ok_or_else(|| {
            HarnessError::Invalid("amplitude sweep needs a beta target".into())
        })?]
    } else {
        sweep.beta_grid.clone()
    };
    let amplitudes = if sweep.amplitude_grid.is_empty() {
        vec![config.map.amplitude]
    } else {
        if config.map.noise == NoiseKind::None && sweep.amplitude_grid.iter().any(|&a| a > 0.0) {
            return Err(HarnessError::Invalid(
                "amplitude sweep needs map.noise set".into(),
            ));
        }
        if config.map.epsilon.is_some() {
            return Err(HarnessError::Invalid(
                "amplitude sweep conflicts with a fixed map.epsilon override".into(),
            ));
        }
        sweep.amplitude_grid.clone()
    };

    let mut rows = Vec::new();
    let mut ok = true;
    for &beta in &betas {
        for &amplitude in &amplitudes {
            let mut point = config.clone();
            point.sweep = None;
            point.space_y.beta = Some(beta);
            point.map.amplitude = amplitude;
            if amplitude == 0.0 {
                point.map.noise = NoiseKind::None;
            }
            let outcome = run_verify(&point)?;
            let Some(report) = &outcome.document.report else {
                return Err(HarnessError::Invalid(format!(
                    "sweep point beta={beta} amplitude={amplitude} failed: {}",
                    outcome.document.error.unwrap_or_default()
                )));
            };
            let row_pass = report.pass && report.budget_honored;
            ok &= row_pass;
            rows.push(SweepRow {
                beta,
                amplitude,
                epsilon_emp: report.epsilon_emp,
                b: report.constants.b,
                max_bound_ratio: report.max_bound_ratio,
                max_g_defect: report.max_g_defect,
                pass: row_pass,
            });
        }
    }
    let csv = sweep_csv(&rows);
    let summary = format!(
        "{} grid points, {} passed\n",
        rows.len(),
        rows.iter().filter(|r| r.pass).count()
    );
    Ok(SweepOutcome {
        rows,
        csv,
        summary,
        ok,
    })
}
