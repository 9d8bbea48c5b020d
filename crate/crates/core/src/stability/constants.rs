//! The stability constants.
//!
//! `a(β) = (2^{β+2} + 3^{β+1} + 3) / 8^β` and
//! `b(β) = a(β) · (1 + Σ_{n≥2} t_n)` with
//! `t_n = ((2^{n-1}+1)/(2·4^{n-1}))^β + ((2^{n-1}-1)/(2·4^{n-1}))^β`.
//!
//! The series is truncated with a rigorous geometric tail bound: each
//! coefficient satisfies `(2^m ± 1)/(2·4^m) ≤ 2^{-m}`, so
//! `t_n ≤ 2·2^{-(n-1)β}` and the tail past the term n = N is at most
//! `2·2^{-Nβ} / (1 - 2^{-β})` (times `a` in units of b).

use serde::{Deserialize, Serialize};

use super::corrector::corrector_coeffs;
use super::StabilityError;

/// Constants of one beta, with the truncation bookkeeping for `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityConstants {
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    /// Index of the last series term included in `b`; 1 means no terms.
    pub truncation_n: u32,
    /// Rigorous bound on the discarded series tail, in units of `b`.
    pub tail_bound: f64,
}

fn check_beta(beta: f64) -> Result<(), StabilityError> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(StabilityError::InvalidBeta(beta));
    }
    Ok(())
}

/// Closed-form `a(β)`.
pub fn constant_a(beta: f64) -> Result<f64, StabilityError> {
    check_beta(beta)?;
    Ok((2f64.powf(beta + 2.0) + 3f64.powf(beta + 1.0) + 3.0) / 8f64.powf(beta))
}

/// Series term t_n for n >= 2.
fn series_term(beta: f64, n: u32) -> f64 {
    let m = n - 1;
    if m <= 512 {
        let c = corrector_coeffs(m).expect("m >= 1");
        c.c_plus.powf(beta) + c.c_minus.powf(beta)
    } else {
        // Both coefficients are 2^{-(m+1)} to f64 resolution; evaluate the
        // power in log scale to dodge intermediate underflow.
        2.0 * (-(f64::from(m) + 1.0) * beta).exp2()
    }
}

/// Tail bound on `b` after including terms up to n = truncation_n.
pub fn tail_bound(beta: f64, truncation_n: u32) -> Result<f64, StabilityError> {
    let a = constant_a(beta)?;
    let ratio = (-beta).exp2();
    Ok(a * 2.0 * (-(f64::from(truncation_n)) * beta).exp2() / (1.0 - ratio))
}

const TRUNCATION_CAP: u32 = 100_000_000;

/// `b(β)` with the series summed until the tail bound drops below `tol`.
pub fn constant_b(beta: f64, tol: f64) -> Result<StabilityConstants, StabilityError> {
    check_beta(beta)?;
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(StabilityError::InvalidTolerance(tol));
    }
    let a = constant_a(beta)?;
    let mut series = 1.0f64;
    let mut n = 1u32;
    loop {
        let tail = tail_bound(beta, n)?;
        if tail <= tol {
            return Ok(StabilityConstants {
                beta,
                a,
                b: a * series,
                truncation_n: n,
                tail_bound: tail,
            });
        }
        if n >= TRUNCATION_CAP {
            return Err(StabilityError::TruncationCap { beta, tol });
        }
        n += 1;
        series += series_term(beta, n);
    }
}

/// `b(β)` truncated at an explicit term index; self-consistency probe for the
/// tail bound.
pub fn constant_b_truncated(beta: f64, truncation_n: u32) -> Result<f64, StabilityError> {
    check_beta(beta)?;
    let a = constant_a(beta)?;
    let mut series = 1.0f64;
    for n in 2..=truncation_n {
        series += series_term(beta, n);
    }
    Ok(a * series)
}

/// Corollary bound for a p-subadditive quasi-norm target: `b(p)^{1/p}`.
pub fn quasi_bound(p: f64, tol: f64) -> Result<f64, StabilityError> {
    if !(p > 0.0 && p <= 1.0) || !p.is_finite() {
        return Err(StabilityError::InvalidP(p));
    }
    Ok(constant_b(p, tol)?.b.powf(1.0 / p))
}
