//! Test maps: additive cores plus bounded perturbations with a known budget.
//!
//! A map is `f(x) = A·x + δ(x)` with `‖δ(x)‖_Y ≤ amplitude` for every x.  The
//! perturbation is a pure function of the bit pattern of x — the corrector
//! evaluates f at the same points over and over, so a stateful noise source
//! would silently change f between calls.  The declared defect budget follows
//! `ε = 3·amplitude`: the defect combines three δ terms through the F-norm
//! triangle inequality.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fspace::{BetaSpace, NormEval, SpaceError, Vector};
use crate::rng::{splitmix64, unit_f64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("matrix data length {len} does not match {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("matrix entries must be finite")]
    NonFiniteMatrix,
    #[error("noise amplitude must be non-negative and finite, got {0}")]
    InvalidAmplitude(f64),
    #[error("map produced a non-finite value; argument magnitude {magnitude:e}")]
    NonFiniteResult { magnitude: f64 },
}

/// Dense row-major matrix: the additive core `x ↦ A·x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, MapError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(MapError::BadShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if data.iter().any(|c| !c.is_finite()) {
            return Err(MapError::NonFiniteMatrix);
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MapError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(MapError::BadShape {
                rows: r,
                cols: c,
                len: rows.iter().map(|row| row.len()).sum(),
            });
        }
        Matrix::new(r, c, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { rows: n, cols: n, data }
    }

    /// Entries uniform on [-scale, scale], deterministic in the generator.
    pub fn random(rows: usize, cols: usize, scale: f64, r: &mut rand_chacha::ChaCha8Rng) -> Self {
        use rand::Rng;
        let data = (0..rows * cols)
            .map(|_| r.gen_range(-scale..scale))
            .collect();
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    None,
    SeededHashNoise,
    ConstantShift,
    Radial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub amplitude: f64,
    pub seed: u64,
    /// Force `δ(-x) = -δ(x)`.  Off by default: the corrector treats
    /// `f(2ⁿx)` and `f(-2ⁿx)` asymmetrically, and unsymmetrized noise is the
    /// harder case.
    pub odd_symmetrized: bool,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec {
            kind: NoiseKind::None,
            amplitude: 0.0,
            seed: 0,
            odd_symmetrized: false,
        }
    }
}

/// An evaluable map `f: X → Y` with exact knowledge of its perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestMap {
    core: Matrix,
    noise: NoiseSpec,
    /// Declared defect budget for the orthogonal-additivity hypothesis.
    epsilon: f64,
    /// Norm in which the noise budget is enforced.
    y_space: BetaSpace,
}

/// Exactly additive map with zero defect budget.
pub fn make_additive(core: Matrix, y_space: BetaSpace) -> Result<TestMap, MapError> {
    if core.rows() != y_space.dim {
        return Err(MapError::Space(SpaceError::DimensionMismatch {
            expected: y_space.dim,
            got: core.rows(),
        }));
    }
    Ok(TestMap {
        core,
        noise: NoiseSpec::none(),
        epsilon: 0.0,
        y_space,
    })
}

/// Replaces the perturbation of `f`, keeping its additive core.  The declared
/// budget becomes `3·amplitude`.
pub fn perturb(
    f: &TestMap,
    kind: NoiseKind,
    amplitude: f64,
    rng_seed: u64,
    odd_symmetrized: bool,
) -> Result<TestMap, MapError> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(MapError::InvalidAmplitude(amplitude));
    }
    let noise = NoiseSpec {
        kind,
        amplitude,
        seed: rng_seed,
        odd_symmetrized,
    };
    Ok(TestMap {
        core: f.core.clone(),
        noise,
        epsilon: 3.0 * amplitude,
        y_space: f.y_space.clone(),
    })
}

impl TestMap {
    pub fn dim_x(&self) -> usize {
        self.core.cols()
    }

    pub fn dim_y(&self) -> usize {
        self.core.rows()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn y_space(&self) -> &BetaSpace {
        &self.y_space
    }

    pub fn core(&self) -> &Matrix {
        &self.core
    }

    /// Overrides the declared budget; used to build adversarial instances
    /// whose declaration understates the measured defect.
    pub fn with_declared_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn is_exactly_additive(&self) -> bool {
        self.noise.kind == NoiseKind::None || self.noise.amplitude == 0.0
    }

    /// Evaluates the map.  Total and deterministic: the same x gives
    /// bit-identical output on every call.
    pub fn evaluate(&self, x: &Vector) -> Result<Vector, MapError> {
        if x.dim() != self.core.cols() {
            return Err(MapError::Space(SpaceError::DimensionMismatch {
                expected: self.core.cols(),
                got: x.dim(),
            }));
        }
        let out = self.eval_slice(x.coords());
        if out.iter().any(|c| !c.is_finite()) {
            return Err(MapError::NonFiniteResult {
                magnitude: crate::fspace::sup_norm(x.coords()),
            });
        }
        Ok(Vector::new(out).expect("finite checked above"))
    }

    pub(crate) fn eval_slice(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.core.mul(x);
        if self.noise.kind != NoiseKind::None && self.noise.amplitude > 0.0 {
            let delta = self.delta(x);
            for (o, d) in out.iter_mut().zip(delta) {
                *o += d;
            }
        }
        out
    }

    /// The perturbation alone.
    pub fn delta(&self, x: &[f64]) -> Vec<f64> {
        let dim_y = self.core.rows();
        match self.noise.kind {
            NoiseKind::None => vec![0.0; dim_y],
            NoiseKind::SeededHashNoise => {
                if self.noise.odd_symmetrized {
                    // Hash a sign-canonical representative so δ(-x) = -δ(x)
                    // holds bit-exactly.
                    let (canon, sigma) = canonicalize(x);
                    if sigma == 0.0 {
                        return vec![0.0; dim_y];
                    }
                    let raw = self.hash_draw(&canon);
                    raw.into_iter().map(|c| sigma * c).collect()
                } else {
                    self.hash_draw(x)
                }
            }
            NoiseKind::ConstantShift => {
                let mut h = splitmix64(self.noise.seed ^ 0xC0FF_EE00);
                let mut raw: Vec<f64> = Vec::with_capacity(dim_y);
                for _ in 0..dim_y {
                    h = splitmix64(h);
                    raw.push(2.0 * unit_f64(h) - 1.0);
                }
                self.rescale(raw, self.noise.amplitude)
            }
            NoiseKind::Radial => {
                let r = crate::fspace::l2_norm(x);
                if r == 0.0 {
                    return vec![0.0; dim_y];
                }
                let profile = r * r / (1.0 + r * r);
                // Embed x into the target dimension by cycling coordinates.
                let raw: Vec<f64> = (0..dim_y).map(|i| x[i % x.len()]).collect();
                self.rescale(raw, self.noise.amplitude * profile)
            }
        }
    }

    fn hash_draw(&self, x: &[f64]) -> Vec<f64> {
        let dim_y = self.core.rows();
        let mut h = splitmix64(self.noise.seed);
        for c in x {
            // Normalize -0.0 to +0.0 so arithmetic identities keep the key.
            h = splitmix64(h ^ (c + 0.0).to_bits());
        }
        let mut raw: Vec<f64> = Vec::with_capacity(dim_y);
        for _ in 0..dim_y {
            h = splitmix64(h);
            raw.push(2.0 * unit_f64(h) - 1.0);
        }
        h = splitmix64(h);
        let magnitude = self.noise.amplitude * unit_f64(h);
        self.rescale(raw, magnitude)
    }

    /// Post-scales a raw direction to the exact Y-norm target; the budget is
    /// stated in the Y-norm, which may be far from Euclidean.
    fn rescale(&self, raw: Vec<f64>, target: f64) -> Vec<f64> {
        let n = self.y_space.norm_slice(&raw);
        if n == 0.0 || target == 0.0 {
            return vec![0.0; raw.len()];
        }
        // ‖s·r‖_Y = s^β ‖r‖_Y for s ≥ 0.
        let s = (target / n).powf(1.0 / self.y_space.beta);
        raw.into_iter().map(|c| s * c).collect()
    }
}

/// Sign-canonical representative of {x, -x}: the one whose first nonzero
/// coordinate is positive.  Returns the applied sign, 0.0 for the zero vector.
fn canonicalize(x: &[f64]) -> (Vec<f64>, f64) {
    for &c in x {
        if c != 0.0 {
            return if c > 0.0 {
                (x.to_vec(), 1.0)
            } else {
                (x.iter().map(|v| -v).collect(), -1.0)
            };
        }
    }
    (x.to_vec(), 0.0)
}
