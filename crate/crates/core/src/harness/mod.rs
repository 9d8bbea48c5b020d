//! Configuration, experiment orchestration and report emission — the
//! operational surface behind the CLI.

mod config;
mod report;
mod run;

pub use config::{
    BuiltExperiment, ExperimentConfig, MapConfig, RelationConfig, RunSection, SpaceXConfig,
    SpaceYConfig, SpaceYKind, SweepSection, ToleranceSection,
};
pub use report::{fmt_f64, samples_csv, sweep_csv, QuasiReport, SweepRow, VerifyDocument};
pub use run::{
    run_axioms, run_constants, run_sweep, run_verify, AxiomsOutcome, AxiomsRequest,
    ConstantsOutcome, ConstantsRequest, SweepOutcome, VerifyOutcome,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Invalid(String),
    #[error("config parse error: {0}")]
    TomlParse(#[from] toml::de::Error),
    #[error("config serialize error: {0}")]
    TomlSer(#[from] toml::ser::Error),
    #[error("report serialize error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Space(#[from] crate::fspace::SpaceError),
    #[error(transparent)]
    Map(#[from] crate::maps::MapError),
    #[error(transparent)]
    Ortho(#[from] crate::ortho::OrthoError),
    #[error(transparent)]
    Stability(#[from] crate::stability::StabilityError),
}
