//! Concrete carriers and the norm zoo.
//!
//! Carriers are real coordinate spaces of fixed dimension.  The target-space
//! norms are beta-homogeneous F-norms (`‖tx‖ = |t|^β ‖x‖` with the plain
//! triangle inequality); the domain side uses ordinary 1-homogeneous norms;
//! quasi-norms with a known quasi-constant cover the p-norm route.  Axiom
//! checkers are sampling-based and report the worst witness they saw.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("beta must lie in (0, 1], got {0}")]
    InvalidBeta(f64),
    #[error("p must lie in (0, 1], got {0}")]
    InvalidP(f64),
    #[error("ambient norm exponent must satisfy q >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("unknown ambient norm {0:?}")]
    UnknownAmbient(String),
    #[error("sample count must be at least 1")]
    EmptySample,
}

/// A point of a finite-dimensional carrier.  All entries are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector {
    coords: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = SpaceError;
    fn try_from(coords: Vec<f64>) -> Result<Self, SpaceError> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Vec<f64> {
        v.coords
    }
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self, SpaceError> {
        if coords.is_empty() {
            return Err(SpaceError::ZeroDimension);
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(SpaceError::NonFinite { index });
        }
        Ok(Vector { coords })
    }

    pub fn zero(dim: usize) -> Self {
        Vector {
            coords: vec![0.0; dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Vector {
        Vector {
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, t: f64) -> Vector {
        Vector {
            coords: self.coords.iter().map(|a| t * a).collect(),
        }
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }
}

pub(crate) fn l2_norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, c| m.max(c.abs()))
}

fn lq_norm(x: &[f64], q: f64) -> f64 {
    x.iter().map(|c| c.abs().powf(q)).sum::<f64>().powf(1.0 / q)
}

/// Anything that can evaluate a norm on raw coordinates.
pub trait NormEval {
    fn norm_slice(&self, x: &[f64]) -> f64;
}

/// Norm families for beta-homogeneous target spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaKind {
    /// `‖x‖₂^β`
    EuclideanPower,
    /// `Σᵢ |xᵢ|^β`
    BetaSum,
    /// `‖x‖_∞^β`
    SupPower,
}

/// A finite-dimensional carrier with a beta-homogeneous F-norm, beta in (0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaSpace {
    pub kind: BetaKind,
    pub dim: usize,
    pub beta: f64,
}

impl BetaSpace {
    pub fn new(kind: BetaKind, dim: usize, beta: f64) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::ZeroDimension);
        }
        if !(beta > 0.0 && beta <= 1.0) || !beta.is_finite() {
            return Err(SpaceError::InvalidBeta(beta));
        }
        Ok(BetaSpace { kind, dim, beta })
    }

    /// F-norm value.  Zero exactly on the zero vector.
    pub fn norm(&self, x: &Vector) -> Result<f64, SpaceError> {
        self.check_dim(x)?;
        Ok(self.norm_slice(x.coords()))
    }

    pub fn check_dim(&self, x: &Vector) -> Result<(), SpaceError> {
        if x.dim() != self.dim {
            return Err(SpaceError::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(())
    }
}

impl NormEval for BetaSpace {
    fn norm_slice(&self, x: &[f64]) -> f64 {
        match self.kind {
            BetaKind::EuclideanPower => {
                let n = l2_norm(x);
                if n == 0.0 {
                    0.0
                } else {
                    n.powf(self.beta)
                }
            }
            BetaKind::BetaSum => x.iter().map(|c| c.abs().powf(self.beta)).sum(),
            BetaKind::SupPower => {
                let n = sup_norm(x);
                if n == 0.0 {
                    0.0
                } else {
                    n.powf(self.beta)
                }
            }
        }
    }
}

/// Quasi-norm families with a known quasi-constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuasiKind {
    /// `(Σᵢ |xᵢ|^p)^{1/p}` for p in (0, 1]; quasi-constant `C = 2^{1/p - 1}`.
    LpQuasi,
}

/// A carrier with a quasi-norm: 1-homogeneous, triangle inequality relaxed to
/// `‖x+y‖ ≤ C(‖x‖+‖y‖)`, and p-subadditive: `‖x+y‖^p ≤ ‖x‖^p + ‖y‖^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiSpace {
    pub kind: QuasiKind,
    pub dim: usize,
    pub p: f64,
}

impl QuasiSpace {
    pub fn new(kind: QuasiKind, dim: usize, p: f64) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::ZeroDimension);
        }
        if !(p > 0.0 && p <= 1.0) || !p.is_finite() {
            return Err(SpaceError::InvalidP(p));
        }
        Ok(QuasiSpace { kind, dim, p })
    }

    /// Quasi-norm constant: smallest C with `‖x+y‖ ≤ C(‖x‖+‖y‖)`.
    pub fn quasi_constant(&self) -> f64 {
        match self.kind {
            QuasiKind::LpQuasi => 2f64.powf(1.0 / self.p - 1.0),
        }
    }

    pub fn norm(&self, x: &Vector) -> Result<f64, SpaceError> {
        if x.dim() != self.dim {
            return Err(SpaceError::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(self.norm_slice(x.coords()))
    }
}

impl NormEval for QuasiSpace {
    fn norm_slice(&self, x: &[f64]) -> f64 {
        match self.kind {
            QuasiKind::LpQuasi => {
                let s: f64 = x.iter().map(|c| c.abs().powf(self.p)).sum();
                if s == 0.0 {
                    0.0
                } else {
                    s.powf(1.0 / self.p)
                }
            }
        }
    }
}

/// The p-th power of a p-subadditive quasi-norm is a p-homogeneous F-norm.
///
/// For the Lp family the power collapses exactly onto the beta-sum kind:
/// `((Σ|xᵢ|^p)^{1/p})^p = Σ|xᵢ|^p`.
pub fn p_power_space(space: &QuasiSpace) -> Result<BetaSpace, SpaceError> {
    match space.kind {
        QuasiKind::LpQuasi => BetaSpace::new(BetaKind::BetaSum, space.dim, space.p),
    }
}

/// 1-homogeneous norms for the domain carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmbientNorm {
    Euclidean,
    Sup,
    /// `(Σ|xᵢ|^q)^{1/q}` with q >= 1.
    Lq(f64),
}

impl AmbientNorm {
    pub fn lq(q: f64) -> Result<Self, SpaceError> {
        if !(q >= 1.0) || !q.is_finite() {
            return Err(SpaceError::InvalidExponent(q));
        }
        Ok(AmbientNorm::Lq(q))
    }

    pub fn norm(&self, x: &Vector) -> f64 {
        self.norm_slice(x.coords())
    }
}

impl NormEval for AmbientNorm {
    fn norm_slice(&self, x: &[f64]) -> f64 {
        match self {
            AmbientNorm::Euclidean => l2_norm(x),
            AmbientNorm::Sup => sup_norm(x),
            AmbientNorm::Lq(q) => lq_norm(x, *q),
        }
    }
}

impl std::fmt::Display for AmbientNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AmbientNorm::Euclidean => write!(f, "euclidean"),
            AmbientNorm::Sup => write!(f, "sup"),
            AmbientNorm::Lq(q) => write!(f, "l{}", q),
        }
    }
}

impl std::str::FromStr for AmbientNorm {
    type Err = SpaceError;
    fn from_str(s: &str) -> Result<Self, SpaceError> {
        match s {
            "euclidean" => Ok(AmbientNorm::Euclidean),
            "sup" => Ok(AmbientNorm::Sup),
            _ => {
                if let Some(rest) = s.strip_prefix('l') {
                    let q: f64 = rest
                        .parse()
                        .map_err(|_| SpaceError::UnknownAmbient(s.to_string()))?;
                    AmbientNorm::lq(q)
                } else {
                    Err(SpaceError::UnknownAmbient(s.to_string()))
                }
            }
        }
    }
}

impl Serialize for AmbientNorm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AmbientNorm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Worst case seen by a sampling checker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomWitness {
    pub label: String,
    pub scalar: Option<f64>,
    pub inputs: Vec<Vec<f64>>,
    pub lhs: f64,
    pub rhs: f64,
    pub violation: f64,
}

/// Outcome of a sampling axiom check.  `max_violation` is normalized by
/// `1 + value` so it stays meaningful near zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub violations: usize,
    pub tolerance: f64,
    pub max_violation: f64,
    pub worst: Option<AxiomWitness>,
}

impl AxiomReport {
    fn new(tolerance: f64) -> Self {
        AxiomReport {
            samples: 0,
            violations: 0,
            tolerance,
            max_violation: 0.0,
            worst: None,
        }
    }

    fn record(&mut self, witness: AxiomWitness) {
        self.samples += 1;
        if witness.violation > self.tolerance {
            self.violations += 1;
        }
        if witness.violation > self.max_violation || self.worst.is_none() {
            self.max_violation = witness.violation.max(self.max_violation);
            self.worst = Some(witness);
        }
    }
}

/// Samples `(t, x)` pairs and measures `‖tx‖` against `|t|^β ‖x‖`.
pub fn check_beta_homogeneity(
    space: &BetaSpace,
    sample_count: usize,
    scalar_range: (f64, f64),
    rng_seed: u64,
    tol: f64,
) -> Result<AxiomReport, SpaceError> {
    if sample_count == 0 {
        return Err(SpaceError::EmptySample);
    }
    let mut report = AxiomReport::new(tol);
    for i in 0..sample_count {
        let mut r = rng::sample_rng(rng_seed, i as u64);
        let x = rng::uniform_coords(&mut r, space.dim);
        let t = {
            use rand::Rng;
            r.gen_range(scalar_range.0..scalar_range.1)
        };
        let scaled: Vec<f64> = x.iter().map(|c| t * c).collect();
        let lhs = space.norm_slice(&scaled);
        let rhs = t.abs().powf(space.beta) * space.norm_slice(&x);
        let violation = (lhs - rhs).abs() / (1.0 + lhs);
        report.record(AxiomWitness {
            label: "beta-homogeneity".to_string(),
            scalar: Some(t),
            inputs: vec![x],
            lhs,
            rhs,
            violation,
        });
    }
    Ok(report)
}

/// Triangle-type law of a space, exposed so one checker covers F-norms and
/// quasi-norms alike.
pub trait TriangleLaw: NormEval {
    fn dim(&self) -> usize;
    /// Normalized excess of the law on the pair; positive means violated.
    fn triangle_excess(&self, x: &[f64], y: &[f64]) -> (f64, f64, f64, &'static str);
}

impl TriangleLaw for BetaSpace {
    fn dim(&self) -> usize {
        self.dim
    }

    fn triangle_excess(&self, x: &[f64], y: &[f64]) -> (f64, f64, f64, &'static str) {
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let lhs = self.norm_slice(&sum);
        let rhs = self.norm_slice(x) + self.norm_slice(y);
        ((lhs - rhs) / (1.0 + rhs), lhs, rhs, "triangle")
    }
}

impl TriangleLaw for QuasiSpace {
    fn dim(&self) -> usize {
        self.dim
    }

    /// Checks the C-relaxed inequality and p-subadditivity, reporting the
    /// larger normalized excess of the two.
    fn triangle_excess(&self, x: &[f64], y: &[f64]) -> (f64, f64, f64, &'static str) {
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let n_sum = self.norm_slice(&sum);
        let n_x = self.norm_slice(x);
        let n_y = self.norm_slice(y);
        let c_rhs = self.quasi_constant() * (n_x + n_y);
        let c_excess = (n_sum - c_rhs) / (1.0 + c_rhs);
        let p_rhs = n_x.powf(self.p) + n_y.powf(self.p);
        let p_excess = (n_sum.powf(self.p) - p_rhs) / (1.0 + p_rhs);
        if p_excess > c_excess {
            (p_excess, n_sum.powf(self.p), p_rhs, "p-subadditivity")
        } else {
            (c_excess, n_sum, c_rhs, "quasi-triangle")
        }
    }
}

/// Samples `(x, y)` pairs and measures the space's triangle-type law.
pub fn check_triangle<S: TriangleLaw>(
    space: &S,
    sample_count: usize,
    rng_seed: u64,
    tol: f64,
) -> Result<AxiomReport, SpaceError> {
    if sample_count == 0 {
        return Err(SpaceError::EmptySample);
    }
    let mut report = AxiomReport::new(tol);
    for i in 0..sample_count {
        let mut r = rng::sample_rng(rng_seed, i as u64);
        let x = rng::uniform_coords(&mut r, space.dim());
        let y = rng::uniform_coords(&mut r, space.dim());
        let (excess, lhs, rhs, label) = space.triangle_excess(&x, &y);
        report.record(AxiomWitness {
            label: label.to_string(),
            scalar: None,
            inputs: vec![x, y],
            lhs,
            rhs,
            violation: excess.max(0.0),
        });
    }
    Ok(report)
}
