//! Stability machinery: the constants `a` and `b`, the corrector sequence
//! `g_n`, Cauchy-certified limit estimation, residual checks, the end-to-end
//! theorem verifier, and the quasi-norm corollary bound.

mod constants;
mod corrector;
mod verify;

pub use constants::{constant_a, constant_b, constant_b_truncated, quasi_bound, tail_bound, StabilityConstants};
pub use corrector::{
    additivity_coeff, cauchy_gap_bound, corrector_coeffs, defect, defect_with_floor, eq26_residual,
    eq26_residual_with_floor, estimate_g, g_n, CorrectorCoeffs, EstimateOptions, GEstimate,
    GapSample,
};
pub use verify::{
    check_uniqueness, verify_theorem, BoundSample, PairSample, StabilityReport, VerifyConfig,
};

use thiserror::Error;

use crate::fspace::SpaceError;
use crate::maps::MapError;
use crate::ortho::OrthoError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("beta must be positive, got {0}")]
    InvalidBeta(f64),
    #[error("p must lie in (0, 1], got {0}")]
    InvalidP(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("corrector index must satisfy 1 <= n <= 65536, got {0}")]
    InvalidN(u32),
    #[error("series truncation for beta = {beta} exceeded the iteration cap at tolerance {tol:e}")]
    TruncationCap { beta: f64, tol: f64 },
    #[error("argument 2^{n}·x leaves the float range")]
    Overflow { n: u32 },
    #[error(
        "corrector did not reach gap {cauchy_tol:e} within n_max = {n_max}; last gap {last_gap:e}"
    )]
    NoConvergence {
        n_max: u32,
        cauchy_tol: f64,
        last_gap: f64,
        partial: Box<GEstimate>,
    },
    #[error("uniqueness check: sample point {index} differs between the two runs")]
    MismatchedPoints { index: usize },
    #[error("invalid verification config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error(transparent)]
    Map(#[from] MapError),
}
