//! The corrector sequence and its Cauchy-certified limit.
//!
//! `g_n(x) = c_n⁺ f(2ⁿx) - c_n⁻ f(-2ⁿx)` with
//! `c_n± = (2ⁿ ± 1)/(2·4ⁿ)`.  Because `2ⁿ(c_n⁺ + c_n⁻) = 1` and the
//! coefficients decay like `2^{-n}`, the sequence fixes every additive odd
//! map exactly and converges for every map whose orthogonal defect is
//! bounded; its limit is the exactly orthogonally additive companion of f.

use serde::{Deserialize, Serialize};

use super::constants::constant_a;
use super::StabilityError;
use crate::fspace::Vector;
use crate::maps::TestMap;
use crate::measure::{floored_combo_norm, DEFAULT_NOISE_FLOOR};

/// Corrector coefficients at index n.
///
/// Exact identities: `c⁺ + c⁻ = 2⁻ⁿ`, `c⁺ - c⁻ = 4⁻ⁿ`, and the recurrence
/// `c_{n+1}± = (3c_n± + c_n∓)/8` from `(3/8, 1/8)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectorCoeffs {
    pub n: u32,
    pub c_plus: f64,
    pub c_minus: f64,
}

const MAX_N: u32 = 65_536;

pub fn corrector_coeffs(n: u32) -> Result<CorrectorCoeffs, StabilityError> {
    if n == 0 || n > MAX_N {
        return Err(StabilityError::InvalidN(n));
    }
    // (2ⁿ ± 1)/2^{2n+1} = (1 ± 2⁻ⁿ)·2^{-(n+1)}: exact in f64 for n <= 52 and
    // correctly rounded beyond, where 1 ± 2⁻ⁿ collapses to 1.
    let scale = 2f64.powi(-((n as i32) + 1));
    let unit = 2f64.powi(-(n as i32));
    Ok(CorrectorCoeffs {
        n,
        c_plus: (1.0 + unit) * scale,
        c_minus: (1.0 - unit) * scale,
    })
}

/// `(c_n⁺)^β + (c_n⁻)^β` — the decay factor of every per-step bound.
pub fn additivity_coeff(n: u32, beta: f64) -> f64 {
    debug_assert!(n >= 1);
    let c = corrector_coeffs(n).expect("n in range");
    c.c_plus.powf(beta) + c.c_minus.powf(beta)
}

/// Proof-side bound on `‖g_n - g_{n+1}‖`: `((c_n⁺)^β + (c_n⁻)^β)·a·ε`.
pub fn cauchy_gap_bound(n: u32, beta: f64, a: f64, eps: f64) -> f64 {
    additivity_coeff(n, beta) * a * eps
}

fn scaled_arg(x: &Vector, n: u32) -> Result<Vector, StabilityError> {
    let factor = 2f64.powi(n as i32);
    let scaled = x.scale(factor);
    if scaled.coords().iter().any(|c| !c.is_finite()) {
        return Err(StabilityError::Overflow { n });
    }
    Ok(scaled)
}

/// One corrector iterate: `c⁺ f(2ⁿx) - c⁻ f(-2ⁿx)`.
pub fn g_n(f: &TestMap, x: &Vector, n: u32) -> Result<Vector, StabilityError> {
    let c = corrector_coeffs(n)?;
    let arg = scaled_arg(x, n)?;
    let plus = f.evaluate(&arg).map_err(|_| StabilityError::Overflow { n })?;
    let minus = f
        .evaluate(&arg.neg())
        .map_err(|_| StabilityError::Overflow { n })?;
    Ok(plus.scale(c.c_plus).sub(&minus.scale(c.c_minus)))
}

/// Controls for the Cauchy iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    /// Stopping tolerance on the measured gap, in Y-norm units.
    pub cauchy_tol: f64,
    /// Hard cap on the corrector index; beyond it is an error, not saturation.
    pub n_max: u32,
    /// Known defect budget.  When present, stopping additionally requires the
    /// proof-side gap bound to fall below the tolerance, so the remaining
    /// distance to the limit is certified rather than guessed from one small
    /// measured gap.
    pub eps_budget: Option<f64>,
    /// Relative noise floor for measured gaps.
    pub noise_floor: f64,
    /// First gap index at which stopping is permitted.
    pub first_stop_n: u32,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            cauchy_tol: 1e-10,
            n_max: 40,
            eps_budget: None,
            noise_floor: DEFAULT_NOISE_FLOOR,
            first_stop_n: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub n: u32,
    pub measured: f64,
}

/// A converged corrector estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GEstimate {
    pub value: Vector,
    /// Index of the returned iterate.
    pub n_used: u32,
    /// Measured gap at the accepted step.
    pub last_gap: f64,
    /// Every measured gap, for certification against the proof-side bounds.
    pub gaps: Vec<GapSample>,
}

/// Iterates the corrector until the measured Cauchy gap (and, with a known
/// budget, the proof-side gap bound) drops below `cauchy_tol`.
pub fn estimate_g(
    f: &TestMap,
    x: &Vector,
    opts: &EstimateOptions,
) -> Result<GEstimate, StabilityError> {
    if !(opts.cauchy_tol > 0.0) || !opts.cauchy_tol.is_finite() {
        return Err(StabilityError::InvalidTolerance(opts.cauchy_tol));
    }
    if opts.n_max < 2 || opts.n_max > MAX_N {
        return Err(StabilityError::InvalidN(opts.n_max));
    }
    let y = f.y_space();
    let beta = y.beta;
    let a = constant_a(beta)?;

    let mut gaps = Vec::new();
    let mut current = g_n(f, x, 1)?;
    for n in 1..opts.n_max {
        let next = g_n(f, x, n + 1)?;
        let gap = floored_combo_norm(
            y,
            &[(1.0, current.coords()), (-1.0, next.coords())],
            opts.noise_floor,
        );
        gaps.push(GapSample { n, measured: gap });
        let certified = match opts.eps_budget {
            Some(eps) => cauchy_gap_bound(n, beta, a, eps) <= opts.cauchy_tol,
            None => true,
        };
        if n >= opts.first_stop_n && gap <= opts.cauchy_tol && certified {
            return Ok(GEstimate {
                value: next,
                n_used: n + 1,
                last_gap: gap,
                gaps,
            });
        }
        current = next;
    }
    let last_gap = gaps.last().map_or(f64::INFINITY, |g| g.measured);
    Err(StabilityError::NoConvergence {
        n_max: opts.n_max,
        cauchy_tol: opts.cauchy_tol,
        last_gap,
        partial: Box::new(GEstimate {
            value: current,
            n_used: opts.n_max,
            last_gap,
            gaps,
        }),
    })
}

/// The displayed residual `h(x, n) = ‖f(2x) - c_n⁺ f(2^{n+1}x) + c_n⁻ f(-2^{n+1}x)‖`.
pub fn eq26_residual_with_floor(
    f: &TestMap,
    x: &Vector,
    n: u32,
    noise_floor: f64,
) -> Result<f64, StabilityError> {
    let c = corrector_coeffs(n)?;
    let two_x = scaled_arg(x, 1)?;
    let arg = scaled_arg(x, n + 1)?;
    let base = f.evaluate(&two_x)?;
    let plus = f
        .evaluate(&arg)
        .map_err(|_| StabilityError::Overflow { n: n + 1 })?;
    let minus = f
        .evaluate(&arg.neg())
        .map_err(|_| StabilityError::Overflow { n: n + 1 })?;
    Ok(floored_combo_norm(
        f.y_space(),
        &[
            (1.0, base.coords()),
            (-c.c_plus, plus.coords()),
            (c.c_minus, minus.coords()),
        ],
        noise_floor,
    ))
}

pub fn eq26_residual(f: &TestMap, x: &Vector, n: u32) -> Result<f64, StabilityError> {
    eq26_residual_with_floor(f, x, n, DEFAULT_NOISE_FLOOR)
}

/// Orthogonal-additivity defect `‖f(x+y) - f(x) - f(y)‖_Y`.
pub fn defect_with_floor(
    f: &TestMap,
    x: &Vector,
    y: &Vector,
    noise_floor: f64,
) -> Result<f64, StabilityError> {
    let sum = f.evaluate(&x.add(y))?;
    let fx = f.evaluate(x)?;
    let fy = f.evaluate(y)?;
    Ok(floored_combo_norm(
        f.y_space(),
        &[
            (1.0, sum.coords()),
            (-1.0, fx.coords()),
            (-1.0, fy.coords()),
        ],
        noise_floor,
    ))
}

pub fn defect(f: &TestMap, x: &Vector, y: &Vector) -> Result<f64, StabilityError> {
    defect_with_floor(f, x, y, DEFAULT_NOISE_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fspace::{BetaKind, BetaSpace};
    use crate::maps::{make_additive, perturb, Matrix, NoiseKind};
    use crate::rng;

    fn v(coords: &[f64]) -> Vector {
        Vector::new(coords.to_vec()).unwrap()
    }

    fn y_space(beta: f64) -> BetaSpace {
        BetaSpace::new(BetaKind::EuclideanPower, 3, beta).unwrap()
    }

    #[test]
    fn first_coefficients_match_the_eighths() {
        let c1 = corrector_coeffs(1).unwrap();
        assert_eq!(c1.c_plus, 3.0 / 8.0);
        assert_eq!(c1.c_minus, 1.0 / 8.0);
        let c2 = corrector_coeffs(2).unwrap();
        assert_eq!(c2.c_plus, 5.0 / 32.0);
        assert_eq!(c2.c_minus, 3.0 / 32.0);
        // Recurrence step 1 -> 2 by hand: (3·(3/8) + 1/8)/8 = 5/32.
        assert_eq!((3.0 * c1.c_plus + c1.c_minus) / 8.0, c2.c_plus);
        assert!(corrector_coeffs(0).is_err());
    }

    #[test]
    fn coefficient_identities_to_n_forty() {
        for n in 1..=40u32 {
            let c = corrector_coeffs(n).unwrap();
            let sum = c.c_plus + c.c_minus;
            let diff = c.c_plus - c.c_minus;
            let two_pow = 2f64.powi(-(n as i32));
            let four_pow = 4f64.powi(-(n as i32));
            assert!((sum - two_pow).abs() <= 1e-15 * two_pow);
            assert!((diff - four_pow).abs() <= 1e-15 * four_pow);
            let next = corrector_coeffs(n + 1).unwrap();
            let rp = (3.0 * c.c_plus + c.c_minus) / 8.0;
            let rm = (3.0 * c.c_minus + c.c_plus) / 8.0;
            assert!((rp - next.c_plus).abs() <= 1e-15 * next.c_plus);
            assert!((rm - next.c_minus).abs() <= 1e-15 * next.c_minus);
        }
    }

    #[test]
    fn additive_maps_are_fixed_points() {
        let mut r = rng::sample_rng(2, 0);
        let f = make_additive(Matrix::random(3, 3, 2.0, &mut r), y_space(0.5)).unwrap();
        for n in [1u32, 5, 10] {
            for i in 0..200u64 {
                let mut rr = rng::sample_rng(3, i);
                let x = v(&rng::uniform_coords(&mut rr, 3));
                let fx = f.evaluate(&x).unwrap();
                let gx = g_n(&f, &x, n).unwrap();
                let dev = crate::fspace::l2_norm(gx.sub(&fx).coords());
                assert!(dev <= 1e-12 * (1.0 + crate::fspace::l2_norm(fx.coords())));
            }
        }
    }

    #[test]
    fn g_at_zero_shrinks_like_four_to_minus_n() {
        // With a constant shift v, g_n(0) = (c⁺ - c⁻)·f(0) = 4⁻ⁿ·v.
        let base = make_additive(Matrix::identity(3), y_space(1.0)).unwrap();
        let f = perturb(&base, NoiseKind::ConstantShift, 0.5, 3, false).unwrap();
        let f0 = f.evaluate(&Vector::zero(3)).unwrap();
        for n in [1u32, 3, 6] {
            let g0 = g_n(&f, &Vector::zero(3), n).unwrap();
            let expected = f0.scale(4f64.powi(-(n as i32)));
            let dev = crate::fspace::l2_norm(g0.sub(&expected).coords());
            assert!(dev <= 1e-14);
        }
    }

    #[test]
    fn g_one_matches_the_displayed_combination() {
        let base = make_additive(Matrix::identity(2), BetaSpace::new(BetaKind::BetaSum, 2, 0.5).unwrap()).unwrap();
        let f = perturb(&base, NoiseKind::SeededHashNoise, 0.2, 7, false).unwrap();
        let x = v(&[1.25, -0.5]);
        let lhs = g_n(&f, &x, 1).unwrap();
        let fp = f.evaluate(&x.scale(2.0)).unwrap();
        let fm = f.evaluate(&x.scale(-2.0)).unwrap();
        let rhs = fp.scale(3.0 / 8.0).sub(&fm.scale(1.0 / 8.0));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn overflow_is_a_hard_error() {
        let f = make_additive(Matrix::identity(2), BetaSpace::new(BetaKind::BetaSum, 2, 1.0).unwrap()).unwrap();
        let x = v(&[1e300, 0.0]);
        assert!(matches!(g_n(&f, &x, 30), Err(StabilityError::Overflow { .. })));
    }

    #[test]
    fn cauchy_gap_bound_values() {
        // n = 1, β = 1, ε = 1: (3/8 + 1/8)·2.5 = 1.25.
        assert!((cauchy_gap_bound(1, 1.0, 2.5, 1.0) - 1.25).abs() < 1e-15);
        assert_eq!(cauchy_gap_bound(3, 0.5, 4.0, 0.0), 0.0);
        // Strictly decreasing in n.
        for beta in [0.25, 0.5, 1.0] {
            let mut prev = f64::INFINITY;
            for n in 1..=40 {
                let b = cauchy_gap_bound(n, beta, 2.5, 1.0);
                assert!(b < prev);
                prev = b;
            }
        }
    }

    #[test]
    fn additive_estimate_converges_immediately() {
        let mut r = rng::sample_rng(5, 0);
        let f = make_additive(Matrix::random(3, 3, 2.0, &mut r), y_space(0.5)).unwrap();
        let x = v(&[2.0, -1.0, 0.5]);
        let opts = EstimateOptions {
            eps_budget: Some(0.0),
            ..EstimateOptions::default()
        };
        let est = estimate_g(&f, &x, &opts).unwrap();
        assert_eq!(est.n_used, 2);
        assert_eq!(est.last_gap, 0.0);
        let fx = f.evaluate(&x).unwrap();
        let dev = crate::fspace::l2_norm(est.value.sub(&fx).coords());
        assert!(dev <= 1e-12 * (1.0 + crate::fspace::l2_norm(fx.coords())));
    }

    #[test]
    fn zero_amplitude_estimate_equals_f_at_doubled_points() {
        let base = make_additive(Matrix::identity(2), BetaSpace::new(BetaKind::BetaSum, 2, 1.0).unwrap()).unwrap();
        let f = perturb(&base, NoiseKind::SeededHashNoise, 0.0, 11, false).unwrap();
        let opts = EstimateOptions {
            eps_budget: Some(f.epsilon()),
            ..EstimateOptions::default()
        };
        for i in 0..50u64 {
            let mut r = rng::sample_rng(13, i);
            let x = v(&rng::uniform_coords(&mut r, 2)).scale(2.0);
            let est = estimate_g(&f, &x, &opts).unwrap();
            let fx = f.evaluate(&x).unwrap();
            let dev = crate::fspace::l2_norm(est.value.sub(&fx).coords());
            assert!(dev <= 1e-12 * (1.0 + crate::fspace::l2_norm(fx.coords())));
        }
    }

    #[test]
    fn measured_gaps_stay_under_the_declared_budget_bound() {
        let y = BetaSpace::new(BetaKind::BetaSum, 3, 0.5).unwrap();
        let mut r = rng::sample_rng(17, 0);
        let base = make_additive(Matrix::random(3, 3, 2.0, &mut r), y).unwrap();
        let f = perturb(&base, NoiseKind::SeededHashNoise, 0.1, 19, false).unwrap();
        let a = constant_a(0.5).unwrap();
        let opts = EstimateOptions {
            cauchy_tol: 1e-8,
            n_max: 120,
            eps_budget: Some(f.epsilon()),
            ..EstimateOptions::default()
        };
        for i in 0..20u64 {
            let mut rr = rng::sample_rng(23, i);
            let x = v(&rng::uniform_coords(&mut rr, 3));
            let est = estimate_g(&f, &x, &opts).unwrap();
            for gap in &est.gaps {
                let bound = cauchy_gap_bound(gap.n, 0.5, a, f.epsilon());
                assert!(gap.measured <= bound + 1e-10);
            }
        }
    }

    #[test]
    fn nonconvergence_carries_the_partial_result() {
        let base = make_additive(Matrix::identity(2), BetaSpace::new(BetaKind::BetaSum, 2, 0.25).unwrap()).unwrap();
        let f = perturb(&base, NoiseKind::SeededHashNoise, 0.1, 29, false).unwrap();
        let opts = EstimateOptions {
            cauchy_tol: 1e-12,
            n_max: 4,
            eps_budget: Some(f.epsilon()),
            ..EstimateOptions::default()
        };
        match estimate_g(&f, &v(&[1.0, 2.0]), &opts) {
            Err(StabilityError::NoConvergence { partial, n_max, .. }) => {
                assert_eq!(n_max, 4);
                assert_eq!(partial.n_used, 4);
                assert_eq!(partial.gaps.len(), 3);
            }
            other => panic!("expected NoConvergence, got {:?}", other.map(|e| e.n_used)),
        }
    }

    #[test]
    fn defect_examples() {
        let y = BetaSpace::new(BetaKind::BetaSum, 2, 0.5).unwrap();
        let add = make_additive(Matrix::identity(2), y.clone()).unwrap();
        assert_eq!(defect(&add, &v(&[1.0, 2.0]), &v(&[3.0, -1.0])).unwrap(), 0.0);
        // Constant shift: the defect is ‖δ‖ exactly.
        let shifted = perturb(&add, NoiseKind::ConstantShift, 0.4, 31, false).unwrap();
        let d = defect(&shifted, &v(&[1.0, 2.0]), &v(&[0.5, 0.25])).unwrap();
        assert!((d - 0.4).abs() < 1e-12);
        // defect(f, x, 0) = ‖-f(0)‖.
        let f0 = shifted.evaluate(&Vector::zero(2)).unwrap();
        let expected = y.norm(&f0).unwrap();
        let d0 = defect(&shifted, &v(&[1.0, 2.0]), &Vector::zero(2)).unwrap();
        assert!((d0 - expected).abs() <= 1e-12 * (1.0 + expected));
    }

    #[test]
    fn eq26_residual_vanishes_for_additive_maps() {
        let mut r = rng::sample_rng(37, 0);
        let f = make_additive(Matrix::random(3, 3, 2.0, &mut r), y_space(0.5)).unwrap();
        for n in 1..=10u32 {
            assert_eq!(eq26_residual(&f, &v(&[1.0, -2.0, 0.5]), n).unwrap(), 0.0);
        }
    }

    #[test]
    fn eq26_increments_respect_the_proof_bound() {
        let y = BetaSpace::new(BetaKind::BetaSum, 3, 0.5).unwrap();
        let mut r = rng::sample_rng(41, 0);
        let base = make_additive(Matrix::random(3, 3, 2.0, &mut r), y).unwrap();
        let f = perturb(&base, NoiseKind::SeededHashNoise, 0.1, 43, false).unwrap();
        let a = constant_a(0.5).unwrap();
        for i in 0..20u64 {
            let mut rr = rng::sample_rng(47, i);
            let x = v(&rng::uniform_coords(&mut rr, 3));
            let mut prev = eq26_residual(&f, &x, 1).unwrap();
            for n in 1..10u32 {
                let next = eq26_residual(&f, &x, n + 1).unwrap();
                let bound = additivity_coeff(n, 0.5) * a * f.epsilon();
                assert!(next - prev <= bound + 1e-10);
                prev = next;
            }
        }
    }
}
