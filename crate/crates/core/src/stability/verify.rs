//! End-to-end theorem verification.
//!
//! One run measures the empirical defect budget over sampled orthogonal
//! pairs, estimates the corrector limit at doubled sample points, and checks
//! every inequality side by side with its proof-side bound: the distance
//! bound `‖f(2x) - g(2x)‖ ≤ b·ε`, the per-step Cauchy gap bounds, and the
//! orthogonal additivity of the limit.  Sample evaluation shards
//! deterministically by index, so worker count never changes a report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::constants::{constant_a, constant_b, StabilityConstants};
use super::corrector::{
    additivity_coeff, cauchy_gap_bound, corrector_coeffs, defect_with_floor, estimate_g,
    EstimateOptions, GapSample,
};
use super::StabilityError;
use crate::fspace::Vector;
use crate::maps::TestMap;
use crate::measure::{floored_combo_norm, guarded_ratio};
use crate::ortho::{sample_orthogonal_pairs, OrthoRelation};
use crate::rng;

/// Verification controls; every tolerance and seed lands in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Sample points x for the distance check at 2x.
    pub bound_samples: usize,
    /// Orthogonal pairs for the defect estimate and the additivity check.
    pub pair_samples: usize,
    pub seed: u64,
    pub cauchy_tol: f64,
    pub series_tol: f64,
    /// Relative slack on bound ratios.
    pub report_tol: f64,
    pub noise_floor: f64,
    pub n_max: u32,
    /// Execution detail: never serialized, so reports are byte-identical for
    /// any worker count.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            bound_samples: 500,
            pair_samples: 500,
            seed: 42,
            cauchy_tol: 1e-10,
            series_tol: 1e-12,
            report_tol: 1e-9,
            noise_floor: crate::measure::DEFAULT_NOISE_FLOOR,
            n_max: 40,
            workers: 1,
        }
    }
}

impl VerifyConfig {
    fn validate(&self) -> Result<(), StabilityError> {
        if self.bound_samples == 0 || self.pair_samples == 0 {
            return Err(StabilityError::InvalidConfig(
                "sample counts must be at least 1".into(),
            ));
        }
        for (name, v) in [
            ("cauchy_tol", self.cauchy_tol),
            ("series_tol", self.series_tol),
            ("report_tol", self.report_tol),
            ("noise_floor", self.noise_floor),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(StabilityError::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Distance check at one sample point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub index: usize,
    pub n_used: u32,
    pub last_gap: f64,
    /// `‖f(2x) - g(2x)‖_Y`, noise-floored.
    pub err: f64,
    /// `err / (b·ε_emp)`; 0 for a vanished numerator.
    pub ratio: f64,
}

/// Additivity check at one orthogonal pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub index: usize,
    /// Defect of f itself at the pair.
    pub defect_f: f64,
    /// Common corrector index of the three estimates.
    pub n_used: u32,
    /// `‖g(x+y) - g(x) - g(y)‖_Y`, noise-floored.
    pub defect_g: f64,
    /// Proof-side decay bound `((c_n⁺)^β + (c_n⁻)^β)·ε_emp` at the stopping n.
    pub defect_bound: f64,
    pub ratio: f64,
}

/// Everything one experiment verified, with measured values and proof-side
/// bounds side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub constants: StabilityConstants,
    pub epsilon_declared: f64,
    /// Max noise-floored defect over the sampled orthogonal pairs.
    pub epsilon_emp: f64,
    pub defect_mean: f64,
    pub budget_honored: bool,
    pub max_bound_err: f64,
    pub max_bound_ratio: f64,
    pub max_g_defect: f64,
    pub max_g_defect_ratio: f64,
    /// Absolute ceiling for the additivity defect: 10 stopping tolerances.
    pub additivity_tolerance: f64,
    /// Max over every measured gap of `measured - cauchy_gap_bound(n, β, a, ε_emp)`.
    pub max_gap_excess: f64,
    pub n_used_hist: BTreeMap<u32, usize>,
    pub pass: bool,
    pub settings: VerifyConfig,
    pub bound_rows: Vec<BoundSample>,
    pub pair_rows: Vec<PairSample>,
}

fn subseed(seed: u64, label: u64) -> u64 {
    rng::splitmix64(seed ^ rng::splitmix64(label))
}

/// Runs `job` over `0..count`, sharded across `workers` threads.  Results are
/// merged by index, so the outcome is identical for any worker count.
pub(crate) fn sharded<T, F>(count: usize, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.max(1).min(count.max(1));
    if workers <= 1 {
        return (0..count).map(job).collect();
    }
    let mut out: Vec<Option<T>> = (0..count).map(|_| None).collect();
    let chunk = count.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slice) in out.chunks_mut(chunk).enumerate() {
            let job = &job;
            scope.spawn(move || {
                for (k, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(job(w * chunk + k));
                }
            });
        }
    });
    out.into_iter().map(|o| o.expect("all slots filled")).collect()
}

fn collect_by_index<T>(results: Vec<Result<T, StabilityError>>) -> Result<Vec<T>, StabilityError> {
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        out.push(r?);
    }
    Ok(out)
}

/// Common-index triple estimate for the additivity check: all three points
/// must satisfy the stopping rule at the same corrector index, so the
/// proof-side decay bound applies to the measured defect directly.
fn estimate_triple(
    f: &TestMap,
    x: &Vector,
    y: &Vector,
    opts: &EstimateOptions,
) -> Result<(Vec<Vector>, u32, Vec<GapSample>), StabilityError> {
    let space = f.y_space();
    let beta = space.beta;
    let a = constant_a(beta)?;
    let points = [x.add(y), x.clone(), y.clone()];
    let mut current: Vec<Vector> = points
        .iter()
        .map(|p| super::corrector::g_n(f, p, 1))
        .collect::<Result<_, _>>()?;
    let mut gaps = Vec::new();
    for n in 1..opts.n_max {
        let next: Vec<Vector> = points
            .iter()
            .map(|p| super::corrector::g_n(f, p, n + 1))
            .collect::<Result<_, _>>()?;
        let mut all_below = true;
        for (c, nx) in current.iter().zip(&next) {
            let gap = floored_combo_norm(
                space,
                &[(1.0, c.coords()), (-1.0, nx.coords())],
                opts.noise_floor,
            );
            gaps.push(GapSample { n, measured: gap });
            all_below &= gap <= opts.cauchy_tol;
        }
        let certified = match opts.eps_budget {
            Some(eps) => cauchy_gap_bound(n, beta, a, eps) <= opts.cauchy_tol,
            None => true,
        };
        if all_below && certified && n >= opts.first_stop_n {
            return Ok((next, n + 1, gaps));
        }
        current = next;
    }
    let last_gap = gaps.last().map_or(f64::INFINITY, |g| g.measured);
    Err(StabilityError::NoConvergence {
        n_max: opts.n_max,
        cauchy_tol: opts.cauchy_tol,
        last_gap,
        partial: Box::new(super::corrector::GEstimate {
            value: current.swap_remove(0),
            n_used: opts.n_max,
            last_gap,
            gaps,
        }),
    })
}

/// Runs the full verification experiment for one map, relation and target.
pub fn verify_theorem(
    f: &TestMap,
    rel: &OrthoRelation,
    config: &VerifyConfig,
) -> Result<StabilityReport, StabilityError> {
    config.validate()?;
    let space = f.y_space();
    let beta = space.beta;
    let a = constant_a(beta)?;
    let constants = constant_b(beta, config.series_tol)?;

    // (i) Empirical defect budget over sampled orthogonal pairs.
    let pairs = sample_orthogonal_pairs(rel, f.dim_x(), config.pair_samples, subseed(config.seed, 1))?;
    let defects = collect_by_index(sharded(pairs.len(), config.workers, |i| {
        let (x, y) = &pairs[i];
        defect_with_floor(f, x, y, config.noise_floor)
    }))?;
    let epsilon_emp = defects.iter().fold(0.0f64, |m, d| m.max(*d));
    let defect_mean = defects.iter().sum::<f64>() / defects.len() as f64;

    // Certified stopping budget: the declared budget if honest, else what we
    // actually measured.
    let eps_cert = f.epsilon().max(epsilon_emp);
    let opts = EstimateOptions {
        cauchy_tol: config.cauchy_tol,
        n_max: config.n_max,
        eps_budget: Some(eps_cert),
        noise_floor: config.noise_floor,
        first_stop_n: 1,
    };

    // (ii)-(iii) Distance check at doubled sample points.
    let bound_seed = subseed(config.seed, 2);
    let b_eps = constants.b * epsilon_emp;
    let bound_results = collect_by_index(sharded(config.bound_samples, config.workers, |i| {
        let mut r = rng::sample_rng(bound_seed, i as u64);
        let x = Vector::new(rng::uniform_coords(&mut r, f.dim_x()))?;
        let point = x.scale(2.0);
        let est = estimate_g(f, &point, &opts)?;
        let f2x = f.evaluate(&point)?;
        let err = floored_combo_norm(
            space,
            &[(1.0, f2x.coords()), (-1.0, est.value.coords())],
            config.noise_floor,
        );
        Ok((
            BoundSample {
                index: i,
                n_used: est.n_used,
                last_gap: est.last_gap,
                err,
                ratio: guarded_ratio(err, b_eps),
            },
            est.gaps,
        ))
    }))?;

    // (iv) Orthogonal additivity of the estimated limit.
    let pair_results = collect_by_index(sharded(pairs.len(), config.workers, |i| {
        let (x, y) = &pairs[i];
        let (values, n_used, gaps) = estimate_triple(f, x, y, &opts)?;
        let defect_g = floored_combo_norm(
            space,
            &[
                (1.0, values[0].coords()),
                (-1.0, values[1].coords()),
                (-1.0, values[2].coords()),
            ],
            config.noise_floor,
        );
        let defect_bound = additivity_coeff(n_used, beta) * epsilon_emp;
        Ok((
            PairSample {
                index: i,
                defect_f: defects[i],
                n_used,
                defect_g,
                defect_bound,
                ratio: guarded_ratio(defect_g, defect_bound),
            },
            gaps,
        ))
    }))?;

    // (v) Aggregate.  Gap excess is evaluated against the proof bound at the
    // measured budget.
    let mut max_gap_excess = f64::NEG_INFINITY;
    let mut n_used_hist = BTreeMap::new();
    let mut bound_rows = Vec::with_capacity(bound_results.len());
    for (row, gaps) in bound_results {
        for g in gaps {
            let excess = g.measured - cauchy_gap_bound(g.n, beta, a, epsilon_emp);
            max_gap_excess = max_gap_excess.max(excess);
        }
        *n_used_hist.entry(row.n_used).or_insert(0) += 1;
        bound_rows.push(row);
    }
    let mut pair_rows = Vec::with_capacity(pair_results.len());
    for (row, gaps) in pair_results {
        for g in gaps {
            let excess = g.measured - cauchy_gap_bound(g.n, beta, a, epsilon_emp);
            max_gap_excess = max_gap_excess.max(excess);
        }
        *n_used_hist.entry(row.n_used).or_insert(0) += 1;
        pair_rows.push(row);
    }

    let max_bound_err = bound_rows.iter().fold(0.0f64, |m, r| m.max(r.err));
    let max_bound_ratio = bound_rows.iter().fold(0.0f64, |m, r| m.max(r.ratio));
    let max_g_defect = pair_rows.iter().fold(0.0f64, |m, r| m.max(r.defect_g));
    let max_g_defect_ratio = pair_rows.iter().fold(0.0f64, |m, r| m.max(r.ratio));
    let additivity_tolerance = 10.0 * config.cauchy_tol;
    let budget_honored = epsilon_emp <= f.epsilon() * (1.0 + config.report_tol)
        || (epsilon_emp == 0.0 && f.epsilon() == 0.0);
    let pass = max_bound_ratio <= 1.0 + config.report_tol && max_g_defect <= additivity_tolerance;

    Ok(StabilityReport {
        constants,
        epsilon_declared: f.epsilon(),
        epsilon_emp,
        defect_mean,
        budget_honored,
        max_bound_err,
        max_bound_ratio,
        max_g_defect,
        max_g_defect_ratio,
        additivity_tolerance,
        max_gap_excess,
        n_used_hist,
        pass,
        settings: config.clone(),
        bound_rows,
        pair_rows,
    })
}

/// Max discrepancy between two corrector runs evaluated at identical points.
pub fn check_uniqueness(
    g1_samples: &[(Vector, Vector)],
    g2_samples: &[(Vector, Vector)],
    y_space: &crate::fspace::BetaSpace,
    noise_floor: f64,
) -> Result<f64, StabilityError> {
    if g1_samples.len() != g2_samples.len() {
        return Err(StabilityError::MismatchedPoints {
            index: g1_samples.len().min(g2_samples.len()),
        });
    }
    let mut max = 0.0f64;
    for (index, ((p1, v1), (p2, v2))) in g1_samples.iter().zip(g2_samples).enumerate() {
        if p1 != p2 {
            return Err(StabilityError::MismatchedPoints { index });
        }
        let d = floored_combo_norm(
            y_space,
            &[(1.0, v1.coords()), (-1.0, v2.coords())],
            noise_floor,
        );
        max = max.max(d);
    }
    Ok(max)
}

/// Sanity anchor for the coefficients used in reports.
pub(crate) fn _coeff_probe(n: u32) -> Result<f64, StabilityError> {
    Ok(corrector_coeffs(n)?.c_plus)
}
