//! Noise-floored norm measurements.
//!
//! Every measured quantity in the verifier is the norm of a difference of
//! computed vectors.  A beta-power norm amplifies coordinates that are pure
//! rounding residue — `(1e-13)^{0.25}` is about `6e-4` — so a converged
//! measurement would otherwise be dominated by float noise.  Before the norm
//! is taken, coordinates whose magnitude is below `noise_floor` times the
//! scale of the inputs are therefore treated as zero.  The floor is part of
//! every report, never implicit.

use crate::fspace::NormEval;

/// Default relative noise floor.  Rounding residue of the linear combinations
/// measured here stays below ~1e-15 of the operand scale; 1e-13 leaves two
/// orders of headroom while staying far below every certified signal level.
pub const DEFAULT_NOISE_FLOOR: f64 = 1e-13;

/// Norm of `Σ coefᵢ · vᵢ` with sub-noise coordinates zeroed.
///
/// The scale is `1 + max over terms of ‖coefᵢ·vᵢ‖_∞`, so the floor tracks the
/// magnitude of the values whose rounding residue the difference carries.
pub fn floored_combo_norm<N: NormEval>(
    norm: &N,
    terms: &[(f64, &[f64])],
    noise_floor: f64,
) -> f64 {
    debug_assert!(!terms.is_empty());
    let dim = terms[0].1.len();
    let mut scale = 1.0f64;
    for (coef, v) in terms {
        debug_assert_eq!(v.len(), dim);
        for c in v.iter() {
            scale = scale.max((coef * c).abs());
        }
    }
    let floor = noise_floor * scale;
    let mut diff = vec![0.0f64; dim];
    for (coef, v) in terms {
        for (d, c) in diff.iter_mut().zip(v.iter()) {
            *d += coef * c;
        }
    }
    for d in diff.iter_mut() {
        if d.abs() <= floor {
            *d = 0.0;
        }
    }
    norm.norm_slice(&diff)
}

/// Guarded ratio: zero numerator gives 0, vanishing denominator with a real
/// numerator gives infinity.
pub fn guarded_ratio(numerator: f64, denominator: f64) -> f64 {
    if numerator == 0.0 {
        0.0
    } else if denominator < 1e-300 {
        f64::INFINITY
    } else {
        numerator / denominator
    }
}
