//! Experiment configuration: one versioned TOML document.
//!
//! Unknown keys are hard errors — a misspelled tolerance must not silently
//! fall back to a default.  Round-tripping a parsed config through the
//! serializer yields a semantically identical document.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::fspace::{p_power_space, AmbientNorm, BetaKind, BetaSpace, QuasiKind, QuasiSpace};
use crate::maps::{make_additive, perturb, Matrix, NoiseKind, TestMap};
use crate::ortho::{OrthoRelation, RelationKind};
use crate::stability::VerifyConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub space_y: SpaceYConfig,
    pub space_x: SpaceXConfig,
    pub relation: RelationConfig,
    #[serde(default)]
    pub map: MapConfig,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceYKind {
    EuclideanPower,
    BetaSum,
    SupPower,
    LpQuasi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceYConfig {
    pub kind: SpaceYKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceXConfig {
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationConfig {
    pub kind: RelationKind,
    pub ambient: AmbientNorm,
    /// Acceptance tolerance; defaults to `tolerances.relation_tol`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MapConfig {
    /// Additive core, row-major; identity when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    /// Whitespace-separated text file with one matrix row per line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<String>,
    pub noise: NoiseKind,
    pub amplitude: f64,
    pub noise_seed: u64,
    pub odd: bool,
    /// Declared defect budget override; the default rule is 3·amplitude.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            matrix: None,
            matrix_file: None,
            noise: NoiseKind::None,
            amplitude: 0.0,
            noise_seed: 0,
            odd: false,
            epsilon: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub samples: usize,
    /// Orthogonal pairs; defaults to `samples`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_samples: Option<usize>,
    pub seed: u64,
    pub n_max: u32,
    /// Worker threads (default 1).  An execution detail: reports omit it so
    /// byte-identical output does not depend on it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            samples: 500,
            pair_samples: None,
            seed: 42,
            n_max: 40,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSection {
    pub cauchy_tol: f64,
    pub series_tol: f64,
    pub report_tol: f64,
    pub relation_tol: f64,
    pub noise_floor: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        ToleranceSection {
            cauchy_tol: 1e-10,
            series_tol: 1e-12,
            report_tol: 1e-9,
            relation_tol: 1e-9,
            noise_floor: crate::measure::DEFAULT_NOISE_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub beta_grid: Vec<f64>,
    pub amplitude_grid: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            beta_grid: Vec::new(),
            amplitude_grid: Vec::new(),
        }
    }
}

/// Everything a run needs, built and validated from one config.
#[derive(Debug, Clone)]
pub struct BuiltExperiment {
    pub map: TestMap,
    pub relation: OrthoRelation,
    /// Target of the corrector run (the p-power conversion for quasi targets).
    pub target: BetaSpace,
    /// Present for quasi-norm targets: the original space and its exponent.
    pub quasi: Option<QuasiSpace>,
    pub verify: VerifyConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.version != SCHEMA_VERSION {
            return Err(HarnessError::Invalid(format!(
                "unsupported schema version {}, expected {}",
                self.version, SCHEMA_VERSION
            )));
        }
        if self.space_x.dim < 2 {
            return Err(HarnessError::Invalid(
                "space_x.dim must be at least 2".into(),
            ));
        }
        match self.space_y.kind {
            SpaceYKind::LpQuasi => {
                if self.space_y.p.is_none() || self.space_y.beta.is_some() {
                    return Err(HarnessError::Invalid(
                        "lp-quasi target takes `p`, not `beta`".into(),
                    ));
                }
            }
            _ => {
                if self.space_y.beta.is_none() || self.space_y.p.is_some() {
                    return Err(HarnessError::Invalid(
                        "beta-homogeneous target takes `beta`, not `p`".into(),
                    ));
                }
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("cauchy_tol", t.cauchy_tol),
            ("series_tol", t.series_tol),
            ("report_tol", t.report_tol),
            ("relation_tol", t.relation_tol),
            ("noise_floor", t.noise_floor),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(HarnessError::Invalid(format!(
                    "tolerances.{name} must be positive and finite"
                )));
            }
        }
        if self.run.samples == 0 || self.run.pair_samples == Some(0) {
            return Err(HarnessError::Invalid("samples must be at least 1".into()));
        }
        if self.run.n_max < 2 {
            return Err(HarnessError::Invalid("run.n_max must be at least 2".into()));
        }
        if self.map.amplitude > 0.0 && self.map.noise == NoiseKind::None {
            return Err(HarnessError::Invalid(
                "map.amplitude > 0 requires a noise kind".into(),
            ));
        }
        if self.map.matrix.is_some() && self.map.matrix_file.is_some() {
            return Err(HarnessError::Invalid(
                "give map.matrix or map.matrix_file, not both".into(),
            ));
        }
        Ok(())
    }

    fn core_matrix(&self) -> Result<Matrix, HarnessError> {
        if let Some(rows) = &self.map.matrix {
            return Ok(Matrix::from_rows(rows)?);
        }
        if let Some(path) = &self.map.matrix_file {
            let text = std::fs::read_to_string(path)?;
            let rows: Vec<Vec<f64>> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| {
                    l.split_whitespace()
                        .map(|w| {
                            w.parse::<f64>().map_err(|e| {
                                HarnessError::Invalid(format!("matrix file entry {w:?}: {e}"))
                            })
                        })
                        .collect()
                })
                .collect::<Result<_, _>>()?;
            return Ok(Matrix::from_rows(&rows)?);
        }
        if self.space_y.dim != self.space_x.dim {
            return Err(HarnessError::Invalid(
                "identity core needs space_x.dim == space_y.dim; give map.matrix".into(),
            ));
        }
        Ok(Matrix::identity(self.space_x.dim))
    }

    /// Builds the map, relation and target spaces this config describes.
    pub fn build(&self) -> Result<BuiltExperiment, HarnessError> {
        self.validate()?;
        let (target, quasi) = match self.space_y.kind {
            SpaceYKind::EuclideanPower => (
                BetaSpace::new(
                    BetaKind::EuclideanPower,
                    self.space_y.dim,
                    self.space_y.beta.unwrap(),
                )?,
                None,
            ),
            SpaceYKind::BetaSum => (
                BetaSpace::new(BetaKind::BetaSum, self.space_y.dim, self.space_y.beta.unwrap())?,
                None,
            ),
            SpaceYKind::SupPower => (
                BetaSpace::new(BetaKind::SupPower, self.space_y.dim, self.space_y.beta.unwrap())?,
                None,
            ),
            SpaceYKind::LpQuasi => {
                let quasi =
                    QuasiSpace::new(QuasiKind::LpQuasi, self.space_y.dim, self.space_y.p.unwrap())?;
                (p_power_space(&quasi)?, Some(quasi))
            }
        };
        let relation = OrthoRelation::new(
            self.relation.kind,
            self.relation.ambient,
            self.relation.tol.unwrap_or(self.tolerances.relation_tol),
        )?;
        let core = self.core_matrix()?;
        if core.cols() != self.space_x.dim || core.rows() != self.space_y.dim {
            return Err(HarnessError::Invalid(format!(
                "matrix is {}x{}, expected {}x{}",
                core.rows(),
                core.cols(),
                self.space_y.dim,
                self.space_x.dim
            )));
        }
        let mut map = make_additive(core, target.clone())?;
        if self.map.noise != NoiseKind::None {
            map = perturb(
                &map,
                self.map.noise,
                self.map.amplitude,
                self.map.noise_seed,
                self.map.odd,
            )?;
        }
        if let Some(eps) = self.map.epsilon {
            map = map.with_declared_epsilon(eps);
        }
        let verify = VerifyConfig {
            bound_samples: self.run.samples,
            pair_samples: self.run.pair_samples.unwrap_or(self.run.samples),
            seed: self.run.seed,
            cauchy_tol: self.tolerances.cauchy_tol,
            series_tol: self.tolerances.series_tol,
            report_tol: self.tolerances.report_tol,
            noise_floor: self.tolerances.noise_floor,
            n_max: self.run.n_max,
            workers: self.run.workers.unwrap_or(1),
        };
        Ok(BuiltExperiment {
            map,
            relation,
            target,
            quasi,
            verify,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
version = 1

[space_y]
kind = "beta-sum"
dim = 3
beta = 0.5

[space_x]
dim = 3

[relation]
kind = "isosceles"
ambient = "euclidean"

[map]
noise = "seeded-hash-noise"
amplitude = 0.05
noise_seed = 7

[run]
samples = 100
seed = 42
n_max = 80

[tolerances]
cauchy_tol = 1e-8
"#;

    #[test]
    fn parses_and_round_trips() {
        let config = ExperimentConfig::from_toml(SAMPLE).unwrap();
        let text = config.to_toml().unwrap();
        let again = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(config, again);
    }

    #[test]
    fn unknown_keys_are_hard_errors() {
        let bad = SAMPLE.replace("cauchy_tol", "cauchy_tolerance");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn version_mismatch_rejected() {
        let bad = SAMPLE.replace("version = 1", "version = 2");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn beta_p_cross_wiring_rejected() {
        let bad = SAMPLE.replace("beta = 0.5", "p = 0.5");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn builds_an_experiment() {
        let config = ExperimentConfig::from_toml(SAMPLE).unwrap();
        let built = config.build().unwrap();
        assert_eq!(built.map.dim_x(), 3);
        assert_eq!(built.verify.bound_samples, 100);
        assert!((built.map.epsilon() - 0.15).abs() < 1e-15);
        assert!(built.quasi.is_none());
    }

    #[test]
    fn quasi_target_converts_to_beta_sum() {
        let text = SAMPLE
            .replace("kind = \"beta-sum\"", "kind = \"lp-quasi\"")
            .replace("beta = 0.5", "p = 0.5");
        let built = ExperimentConfig::from_toml(&text).unwrap().build().unwrap();
        assert!(built.quasi.is_some());
        assert_eq!(built.target.kind, crate::fspace::BetaKind::BetaSum);
        assert_eq!(built.target.beta, 0.5);
    }

    #[test]
    fn amplitude_without_noise_kind_rejected() {
        let bad = SAMPLE.replace("noise = \"seeded-hash-noise\"", "noise = \"none\"");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }
}
