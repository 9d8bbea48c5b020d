//! Orthogonality relations on the domain carrier.
//!
//! Three norm-induced relations are implemented: isosceles
//! (`‖x+y‖ = ‖x-y‖`), Pythagorean (`‖x-y‖² = ‖x‖² + ‖y‖²`), and plain
//! inner-product orthogonality.  The relations are exact in the mathematics;
//! acceptance here is up to a relative tolerance carried by the descriptor.
//!
//! `find_witness` realizes the existence axiom constructively for the
//! isosceles relation: for every x there is a y with `x ⊥ y` and
//! `x+y ⊥ x-y`.  Since `(x+y)+(x-y) = 2x` and `(x+y)-(x-y) = 2y`, the second
//! condition reduces to `‖y‖ = ‖x‖`, so the search runs over the ambient-norm
//! sphere of radius `‖x‖` inside a 2-plane containing x, where the sign
//! change of `φ(θ) = ‖x+y(θ)‖ - ‖x-y(θ)‖` between θ and θ+π guarantees a
//! bisection bracket.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fspace::{AmbientNorm, AxiomWitness, NormEval, SpaceError, Vector};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrthoError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("witness search is defined for the isosceles relation, got {0:?}")]
    UnsupportedRelation(RelationKind),
    #[error("witness search needs dimension >= 2, got {0}")]
    UnsupportedDimension(usize),
    #[error("bisection did not converge in {iterations} iterations; best residual {best_residual:e}")]
    NoConvergence { best_residual: f64, iterations: u32 },
    #[error("failed to generate orthogonal pair {index} after {attempts} attempts")]
    GenerationFailed { index: usize, attempts: u32 },
    #[error("tolerance must be non-negative and finite, got {0}")]
    InvalidTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    Isosceles,
    Pythagorean,
    InnerProduct,
}

/// Membership test for an orthogonality relation on the carrier.
///
/// The norm-induced relations below are the only implementations shipped;
/// the trait is the plug-in point for relations defined on the group
/// structure alone.
pub trait Orthogonality {
    fn orthogonal(&self, x: &Vector, y: &Vector) -> Result<bool, OrthoError>;
}

impl Orthogonality for OrthoRelation {
    fn orthogonal(&self, x: &Vector, y: &Vector) -> Result<bool, OrthoError> {
        self.is_orthogonal(x, y)
    }
}

/// A binary orthogonality relation with numeric acceptance tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoRelation {
    pub kind: RelationKind,
    pub ambient: AmbientNorm,
    pub tol: f64,
}

impl OrthoRelation {
    pub fn new(kind: RelationKind, ambient: AmbientNorm, tol: f64) -> Result<Self, OrthoError> {
        if !(tol >= 0.0) || !tol.is_finite() {
            return Err(OrthoError::InvalidTolerance(tol));
        }
        Ok(OrthoRelation { kind, ambient, tol })
    }

    fn check_dims(&self, x: &Vector, y: &Vector) -> Result<(), OrthoError> {
        if x.dim() != y.dim() {
            return Err(OrthoError::Space(SpaceError::DimensionMismatch {
                expected: x.dim(),
                got: y.dim(),
            }));
        }
        Ok(())
    }

    /// Raw defining residual of the relation on the pair.
    pub fn raw_residual(&self, x: &Vector, y: &Vector) -> Result<f64, OrthoError> {
        self.check_dims(x, y)?;
        Ok(match self.kind {
            RelationKind::Isosceles => {
                let np = self.ambient.norm(&x.add(y));
                let nm = self.ambient.norm(&x.sub(y));
                (np - nm).abs()
            }
            RelationKind::Pythagorean => {
                let nd = self.ambient.norm(&x.sub(y));
                let nx = self.ambient.norm(x);
                let ny = self.ambient.norm(y);
                (nd * nd - nx * nx - ny * ny).abs()
            }
            RelationKind::InnerProduct => x.dot(y).abs(),
        })
    }

    /// Residual normalized the way acceptance is defined for the kind.
    pub fn relative_residual(&self, x: &Vector, y: &Vector) -> Result<f64, OrthoError> {
        self.check_dims(x, y)?;
        Ok(match self.kind {
            RelationKind::Isosceles => {
                let np = self.ambient.norm(&x.add(y));
                let nm = self.ambient.norm(&x.sub(y));
                // The grouping keeps the residual bit-symmetric in (x, y),
                // (x, -y) and (-x, y): float addition commutes.
                (np - nm).abs() / (1.0 + (np + nm))
            }
            RelationKind::Pythagorean => {
                let nd = self.ambient.norm(&x.sub(y));
                let nx = self.ambient.norm(x);
                let ny = self.ambient.norm(y);
                (nd * nd - nx * nx - ny * ny).abs() / (1.0 + nx * nx + ny * ny)
            }
            RelationKind::InnerProduct => {
                let nx = crate::fspace::l2_norm(x.coords());
                let ny = crate::fspace::l2_norm(y.coords());
                x.dot(y).abs() / (1.0 + nx * ny)
            }
        })
    }

    pub fn is_orthogonal(&self, x: &Vector, y: &Vector) -> Result<bool, OrthoError> {
        Ok(self.relative_residual(x, y)? <= self.tol)
    }
}

/// Result of the constructive witness search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub y: Vector,
    /// Normalized residual of `x ⊥ y`.
    pub residual_primary: f64,
    /// Normalized residual of `x+y ⊥ x-y`.
    pub residual_secondary: f64,
    pub iterations: u32,
}

/// Finds y with `‖y‖ = ‖x‖` (ambient norm) and `x ⊥_I y`, by sign-change
/// bisection of `φ(θ)` over the 2-plane `span{x, e_k}`, where `e_k` is the
/// standard basis vector minimizing `|x_k|` (ties to the lowest index).
pub fn find_witness(
    rel: &OrthoRelation,
    x: &Vector,
    tol: f64,
    max_iter: u32,
) -> Result<WitnessResult, OrthoError> {
    if rel.kind != RelationKind::Isosceles {
        return Err(OrthoError::UnsupportedRelation(rel.kind));
    }
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(OrthoError::InvalidTolerance(tol));
    }
    if x.is_zero() {
        // x ⊥ 0 and 0 ⊥ x hold for every kind.
        return Ok(WitnessResult {
            y: Vector::zero(x.dim()),
            residual_primary: 0.0,
            residual_secondary: 0.0,
            iterations: 0,
        });
    }
    let dim = x.dim();
    if dim < 2 {
        return Err(OrthoError::UnsupportedDimension(dim));
    }

    let radius = rel.ambient.norm(x);
    let l2 = crate::fspace::l2_norm(x.coords());
    let unit: Vec<f64> = x.coords().iter().map(|c| c / l2).collect();
    let k = unit
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();

    let candidate = |theta: f64| -> (Vector, f64, f64) {
        let (sin, cos) = theta.sin_cos();
        let mut w: Vec<f64> = unit.iter().map(|c| cos * c).collect();
        w[k] += sin;
        let wn = rel.ambient.norm_slice(&w);
        let y = Vector::new(w.iter().map(|c| c * radius / wn).collect()).unwrap();
        let np = rel.ambient.norm(&x.add(&y));
        let nm = rel.ambient.norm(&x.sub(&y));
        (y, np, nm)
    };

    // φ(0) = ‖2x‖ > 0 and φ(π) = -‖2x‖ < 0: the bracket always exists.
    let mut lo = 0.0f64;
    let mut hi = std::f64::consts::PI;
    let mut best: Option<(Vector, f64)> = None;
    for iter in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        let (y, np, nm) = candidate(mid);
        let phi = np - nm;
        let residual = phi.abs() / (1.0 + np + nm);
        if best.as_ref().map_or(true, |(_, r)| residual < *r) {
            best = Some((y.clone(), residual));
        }
        if residual <= tol {
            let secondary = rel.relative_residual(&x.add(&y), &x.sub(&y))?;
            return Ok(WitnessResult {
                y,
                residual_primary: residual,
                residual_secondary: secondary,
                iterations: iter,
            });
        }
        if phi > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (_, best_residual) = best.unwrap();
    Err(OrthoError::NoConvergence {
        best_residual,
        iterations: max_iter,
    })
}

/// Deterministic orthogonal pair generator.  Every returned pair passes
/// `is_orthogonal` at the relation tolerance; every third pair is a scaled
/// variant exercising the cone structure of the relation.
pub fn sample_orthogonal_pairs(
    rel: &OrthoRelation,
    dim: usize,
    count: usize,
    rng_seed: u64,
) -> Result<Vec<(Vector, Vector)>, OrthoError> {
    if count == 0 {
        return Err(OrthoError::Space(SpaceError::EmptySample));
    }
    if dim < 2 {
        return Err(OrthoError::UnsupportedDimension(dim));
    }
    let mut pairs = Vec::with_capacity(count);
    for index in 0..count {
        pairs.push(generate_pair(rel, dim, index, rng_seed)?);
    }
    Ok(pairs)
}

const MAX_ATTEMPTS: u32 = 24;

fn generate_pair(
    rel: &OrthoRelation,
    dim: usize,
    index: usize,
    seed: u64,
) -> Result<(Vector, Vector), OrthoError> {
    use rand::Rng;
    for attempt in 0..MAX_ATTEMPTS {
        let mut r = rng::retry_rng(seed, index as u64, attempt as u64);
        let raw = match rel.kind {
            RelationKind::Isosceles => isosceles_pair(rel, dim, &mut r),
            RelationKind::InnerProduct => gram_schmidt_pair(dim, &mut r),
            RelationKind::Pythagorean => pythagorean_pair(rel, dim, &mut r),
        };
        let Some((x, y)) = raw else { continue };
        // Scaled variants: same factor for both sides keeps the defining
        // identity for the norm-based kinds; the inner-product kind admits
        // independent factors.
        let (x, y) = if index % 3 == 2 {
            let alpha = r.gen_range(0.25..4.0);
            let beta = if rel.kind == RelationKind::InnerProduct {
                r.gen_range(0.25..4.0)
            } else {
                alpha
            };
            (x.scale(alpha), y.scale(beta))
        } else {
            (x, y)
        };
        if rel.is_orthogonal(&x, &y)? {
            return Ok((x, y));
        }
    }
    Err(OrthoError::GenerationFailed {
        index,
        attempts: MAX_ATTEMPTS,
    })
}

fn random_nonzero(dim: usize, r: &mut rand_chacha::ChaCha8Rng) -> Option<Vector> {
    let coords = rng::uniform_coords(r, dim);
    let v = Vector::new(coords).ok()?;
    if crate::fspace::l2_norm(v.coords()) < 1e-3 {
        None
    } else {
        Some(v)
    }
}

fn isosceles_pair(
    rel: &OrthoRelation,
    dim: usize,
    r: &mut rand_chacha::ChaCha8Rng,
) -> Option<(Vector, Vector)> {
    let x = random_nonzero(dim, r)?;
    // Drive the bisection well below the acceptance tolerance so scaled
    // consequences stay inside it too.
    let witness = find_witness(rel, &x, rel.tol / 16.0, 200).ok()?;
    Some((x, witness.y))
}

fn gram_schmidt_pair(dim: usize, r: &mut rand_chacha::ChaCha8Rng) -> Option<(Vector, Vector)> {
    let x = random_nonzero(dim, r)?;
    let raw = random_nonzero(dim, r)?;
    let coeff = x.dot(&raw) / x.dot(&x);
    let y = raw.sub(&x.scale(coeff));
    if crate::fspace::l2_norm(y.coords()) < 1e-3 {
        None
    } else {
        Some((x, y))
    }
}

/// Pythagorean pairs are built by solving the defining equation for one
/// coordinate.  Over the sup norm the solve is closed-form: with
/// `x = a·e_i`, `y = -b·e_i + c·e_j` and fillers below a/2 and b/2, the
/// equation `‖x-y‖² = ‖x‖² + ‖y‖²` reads `(a+b)² = a² + c²`, so
/// `c = sqrt(b(2a+b))`.  Other ambient norms use a directional root solve.
fn pythagorean_pair(
    rel: &OrthoRelation,
    dim: usize,
    r: &mut rand_chacha::ChaCha8Rng,
) -> Option<(Vector, Vector)> {
    use rand::Rng;
    match rel.ambient {
        AmbientNorm::Euclidean => gram_schmidt_pair(dim, r),
        AmbientNorm::Sup => {
            let i = r.gen_range(0..dim);
            let mut j = r.gen_range(0..dim);
            while j == i {
                j = r.gen_range(0..dim);
            }
            let a: f64 = r.gen_range(0.2..3.0);
            let b: f64 = r.gen_range(0.2..3.0);
            let c = (b * (2.0 * a + b)).sqrt();
            let sign = if r.gen_range(0.0..1.0) < 0.5 { -1.0 } else { 1.0 };
            let mut x = vec![0.0; dim];
            let mut y = vec![0.0; dim];
            for m in 0..dim {
                if m != i && m != j {
                    x[m] = r.gen_range(-0.5..0.5) * a;
                    y[m] = r.gen_range(-0.5..0.5) * b;
                }
            }
            x[i] = sign * a;
            y[i] = -sign * b;
            y[j] = c;
            Some((Vector::new(x).unwrap(), Vector::new(y).unwrap()))
        }
        AmbientNorm::Lq(_) => {
            let x = random_nonzero(dim, r)?;
            let u = random_nonzero(dim, r)?;
            let psi = |t: f64| -> f64 {
                let y = u.scale(t);
                let nd = rel.ambient.norm(&x.sub(&y));
                let nx = rel.ambient.norm(&x);
                let ny = rel.ambient.norm(&y);
                nd * nd - nx * nx - ny * ny
            };
            let base = rel.ambient.norm(&x) / rel.ambient.norm(&u);
            // Scan away from the trivial root at t = 0 for a sign change.
            let mut prev_t = 0.05 * base;
            let mut prev = psi(prev_t);
            let mut bracket = None;
            for step in 1..=64 {
                let t = 0.05 * base + 6.0 * base * step as f64 / 64.0;
                let val = psi(t);
                if prev != 0.0 && val != 0.0 && prev.signum() != val.signum() {
                    bracket = Some((prev_t, t));
                    break;
                }
                prev_t = t;
                prev = val;
            }
            let (mut lo, mut hi) = bracket?;
            for _ in 0..128 {
                let mid = 0.5 * (lo + hi);
                if psi(lo).signum() == psi(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let y = u.scale(0.5 * (lo + hi));
            Some((x, y))
        }
    }
}

/// Per-consequence breakdown of the closure axiom check: for orthogonal
/// `(x, y)` the relation must also accept `(x, -y)`, `(-x, y)` and `(2x, 2y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Def14Report {
    pub pairs: usize,
    pub violations_negated_y: usize,
    pub violations_negated_x: usize,
    pub violations_doubled: usize,
    pub max_violation: f64,
    pub worst: Option<AxiomWitness>,
}

impl Def14Report {
    pub fn total_violations(&self) -> usize {
        self.violations_negated_y + self.violations_negated_x + self.violations_doubled
    }
}

/// Samples orthogonal pairs and tests the three closure consequences.
pub fn check_def14_axiom1(
    rel: &OrthoRelation,
    dim: usize,
    sample_count: usize,
    rng_seed: u64,
) -> Result<Def14Report, OrthoError> {
    let pairs = sample_orthogonal_pairs(rel, dim, sample_count, rng_seed)?;
    let mut report = Def14Report {
        pairs: pairs.len(),
        violations_negated_y: 0,
        violations_negated_x: 0,
        violations_doubled: 0,
        max_violation: 0.0,
        worst: None,
    };
    for (x, y) in &pairs {
        let consequences = [
            ("x⊥-y", x.clone(), y.neg()),
            ("-x⊥y", x.neg(), y.clone()),
            ("2x⊥2y", x.scale(2.0), y.scale(2.0)),
        ];
        for (label, cx, cy) in consequences {
            let residual = rel.relative_residual(&cx, &cy)?;
            if residual > rel.tol {
                match label {
                    "x⊥-y" => report.violations_negated_y += 1,
                    "-x⊥y" => report.violations_negated_x += 1,
                    _ => report.violations_doubled += 1,
                }
            }
            if residual > report.max_violation {
                report.max_violation = residual;
                report.worst = Some(AxiomWitness {
                    label: label.to_string(),
                    scalar: None,
                    inputs: vec![cx.coords().to_vec(), cy.coords().to_vec()],
                    lhs: rel.raw_residual(&cx, &cy)?,
                    rhs: 0.0,
                    violation: residual,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fspace::AmbientNorm;

    fn v(coords: &[f64]) -> Vector {
        Vector::new(coords.to_vec()).unwrap()
    }

    fn iso(ambient: AmbientNorm) -> OrthoRelation {
        OrthoRelation::new(RelationKind::Isosceles, ambient, 1e-9).unwrap()
    }

    #[test]
    fn isosceles_euclidean_basics() {
        let rel = iso(AmbientNorm::Euclidean);
        assert!(rel.is_orthogonal(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap());
        // y = 0 is orthogonal to everything.
        assert!(rel.is_orthogonal(&v(&[3.0, -2.0]), &Vector::zero(2)).unwrap());
        assert!(rel.is_orthogonal(&Vector::zero(2), &v(&[3.0, -2.0])).unwrap());
    }

    #[test]
    fn pythagorean_sup_explicit_pair() {
        let rel = OrthoRelation::new(RelationKind::Pythagorean, AmbientNorm::Sup, 1e-9).unwrap();
        let x = v(&[1.0, 0.0]);
        let y = v(&[-1.0, 3f64.sqrt()]);
        // ‖x-y‖_∞ = 2 and ‖x‖² + ‖y‖² = 1 + 3 = 4.
        assert!(rel.is_orthogonal(&x, &y).unwrap());
        // The negated consequence fails with squared residual exactly 1.
        assert!(!rel.is_orthogonal(&x, &y.neg()).unwrap());
        assert!((rel.raw_residual(&x, &y.neg()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let rel = iso(AmbientNorm::Euclidean);
        assert!(rel.is_orthogonal(&v(&[1.0, 0.0]), &v(&[1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn witness_on_axis_vector_is_the_other_axis() {
        let rel = iso(AmbientNorm::Euclidean);
        let res = find_witness(&rel, &v(&[1.0, 0.0]), 1e-9, 200).unwrap();
        assert!(res.residual_primary <= 1e-9);
        assert!(res.residual_secondary <= 1e-9);
        assert!((res.y.coords()[0]).abs() < 1e-9);
        assert!((res.y.coords()[1].abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn witness_zero_input() {
        let rel = iso(AmbientNorm::Sup);
        let res = find_witness(&rel, &Vector::zero(3), 1e-9, 200).unwrap();
        assert!(res.y.is_zero());
        assert_eq!(res.residual_primary, 0.0);
        assert_eq!(res.iterations, 0);
    }

    #[test]
    fn witness_l4_ambient() {
        let rel = iso(AmbientNorm::lq(4.0).unwrap());
        let norm = rel.ambient.norm(&v(&[1.0, 1.0]));
        let x = v(&[1.0, 1.0]).scale(1.0 / norm);
        let res = find_witness(&rel, &x, 1e-9, 200).unwrap();
        assert!(res.residual_primary <= 1e-9);
        assert!(res.residual_secondary <= 1e-9);
        // Direct confirmation by norm evaluation.
        let np = rel.ambient.norm(&x.add(&res.y));
        let nm = rel.ambient.norm(&x.sub(&res.y));
        assert!((np - nm).abs() <= 1e-9 * (1.0 + np + nm));
        assert!((rel.ambient.norm(&res.y) - rel.ambient.norm(&x)).abs() < 1e-12);
    }

    #[test]
    fn witness_requires_isosceles_and_dim_two() {
        let pyth = OrthoRelation::new(RelationKind::Pythagorean, AmbientNorm::Sup, 1e-9).unwrap();
        assert!(matches!(
            find_witness(&pyth, &v(&[1.0, 0.0]), 1e-9, 100),
            Err(OrthoError::UnsupportedRelation(_))
        ));
        let rel = iso(AmbientNorm::Euclidean);
        assert!(matches!(
            find_witness(&rel, &v(&[2.0]), 1e-9, 100),
            Err(OrthoError::UnsupportedDimension(1))
        ));
    }

    #[test]
    fn witness_success_across_dims_and_norms() {
        for dim in [2usize, 3, 8] {
            for ambient in [
                AmbientNorm::Euclidean,
                AmbientNorm::Sup,
                AmbientNorm::lq(4.0).unwrap(),
            ] {
                let rel = iso(ambient);
                for i in 0..50u64 {
                    let mut r = rng::sample_rng(101 + dim as u64, i);
                    let x = Vector::new(rng::uniform_coords(&mut r, dim)).unwrap();
                    let res = find_witness(&rel, &x, 1e-9, 200).unwrap();
                    assert!(res.residual_primary <= 1e-9);
                    assert!(res.iterations <= 200);
                }
            }
        }
    }

    #[test]
    fn sampled_pairs_pass_and_are_deterministic() {
        let rel = iso(AmbientNorm::Euclidean);
        let pairs = sample_orthogonal_pairs(&rel, 3, 10, 7).unwrap();
        assert_eq!(pairs.len(), 10);
        for (x, y) in &pairs {
            assert!(rel.is_orthogonal(x, y).unwrap());
            // Sign flip keeps isosceles pairs orthogonal.
            assert!(rel.is_orthogonal(x, &y.neg()).unwrap());
        }
        let again = sample_orthogonal_pairs(&rel, 3, 10, 7).unwrap();
        assert_eq!(pairs, again);
    }

    #[test]
    fn inner_product_pairs_reproducible() {
        let rel = OrthoRelation::new(
            RelationKind::InnerProduct,
            AmbientNorm::Euclidean,
            1e-9,
        )
        .unwrap();
        let a = sample_orthogonal_pairs(&rel, 4, 1, 99).unwrap();
        let b = sample_orthogonal_pairs(&rel, 4, 1, 99).unwrap();
        assert_eq!(a, b);
        assert!(rel.is_orthogonal(&a[0].0, &a[0].1).unwrap());
    }

    #[test]
    fn pythagorean_pairs_over_sup_and_lq() {
        for ambient in [AmbientNorm::Sup, AmbientNorm::lq(4.0).unwrap()] {
            let rel = OrthoRelation::new(RelationKind::Pythagorean, ambient, 1e-9).unwrap();
            let pairs = sample_orthogonal_pairs(&rel, 3, 20, 5).unwrap();
            for (x, y) in &pairs {
                assert!(rel.is_orthogonal(x, y).unwrap());
            }
        }
    }

    #[test]
    fn isosceles_residuals_symmetric_bitwise() {
        let rel = iso(AmbientNorm::lq(4.0).unwrap());
        for i in 0..100u64 {
            let mut r = rng::sample_rng(3, i);
            let x = Vector::new(rng::uniform_coords(&mut r, 4)).unwrap();
            let y = Vector::new(rng::uniform_coords(&mut r, 4)).unwrap();
            let a = rel.relative_residual(&x, &y).unwrap();
            let b = rel.relative_residual(&x, &y.neg()).unwrap();
            let c = rel.relative_residual(&x.neg(), &y).unwrap();
            // x + (-y) and x - y are the same float values coordinatewise.
            assert_eq!(a.to_bits(), b.to_bits());
            assert_eq!(a.to_bits(), c.to_bits());
        }
    }

    #[test]
    fn doubling_scales_raw_residual_by_homogeneity() {
        let rel = iso(AmbientNorm::Euclidean);
        for i in 0..100u64 {
            let mut r = rng::sample_rng(41, i);
            let x = Vector::new(rng::uniform_coords(&mut r, 3)).unwrap();
            let y = Vector::new(rng::uniform_coords(&mut r, 3)).unwrap();
            let raw = rel.raw_residual(&x, &y).unwrap();
            let doubled = rel.raw_residual(&x.scale(2.0), &y.scale(2.0)).unwrap();
            assert!((doubled - 2.0 * raw).abs() <= 1e-12 * (1.0 + doubled));
        }
    }

    #[test]
    fn def14_isosceles_clean_over_every_ambient() {
        for ambient in [
            AmbientNorm::Euclidean,
            AmbientNorm::Sup,
            AmbientNorm::lq(4.0).unwrap(),
        ] {
            let rel = iso(ambient);
            let report = check_def14_axiom1(&rel, 3, 200, 71).unwrap();
            assert_eq!(report.total_violations(), 0, "worst: {:?}", report.worst);
        }
    }

    #[test]
    fn def14_pythagorean_sup_violates_negation_but_not_doubling() {
        let rel = OrthoRelation::new(RelationKind::Pythagorean, AmbientNorm::Sup, 1e-9).unwrap();
        let report = check_def14_axiom1(&rel, 2, 500, 13).unwrap();
        assert!(report.violations_negated_y + report.violations_negated_x > 0);
        // ‖2x-2y‖² = 4‖x-y‖² scales both sides of the defining equation.
        assert_eq!(report.violations_doubled, 0);
    }
}
