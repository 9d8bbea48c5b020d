use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use orthostab::fspace::{AmbientNorm, BetaKind, BetaSpace};
use orthostab::harness::{
    run_axioms, run_constants, run_sweep, run_verify, AxiomsRequest, ConstantsRequest,
    ExperimentConfig, HarnessError,
};
use orthostab::ortho::{OrthoRelation, RelationKind};

/// Numerical laboratory for the stability of orthogonally additive maps into
/// beta-homogeneous F-spaces and quasi-Banach spaces.
#[derive(Parser)]
#[command(name = "orthostab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the stability constants a, b (and b^(1/p) for quasi targets)
    Constants {
        /// Homogeneity exponent of the target F-norm
        #[arg(long)]
        beta: Option<f64>,
        /// Subadditivity exponent of a quasi-norm target (implies the
        /// corollary bound)
        #[arg(long)]
        p: Option<f64>,
        /// Series truncation tolerance
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Print the quasi-norm corollary bound (implied by --p)
        #[arg(long)]
        quasi: bool,
        /// Write the table to a file (format from --json/--csv, default csv)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit JSON instead of the text table
        #[arg(long)]
        json: bool,
        /// Emit CSV instead of the text table
        #[arg(long)]
        csv: bool,
    },
    /// Run one verification experiment from a config file
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.json and samples.csv
        /// (default: $ORTHOSTAB_OUT_DIR or ".")
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override run.seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override run.samples
        #[arg(long)]
        samples: Option<usize>,
        /// Override run.workers
        #[arg(long)]
        workers: Option<usize>,
        /// Print the JSON document to stdout
        #[arg(long)]
        json: bool,
        /// Print the per-sample CSV to stdout
        #[arg(long)]
        csv: bool,
    },
    /// Sampling checks of the norm axioms and the relation closure axioms
    Axioms {
        /// Read space/relation descriptors from a config file
        #[arg(long)]
        config: Option<PathBuf>,
        /// Target norm kind: euclidean-power | beta-sum | sup-power
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        /// Relation kind: isosceles | pythagorean | inner-product
        #[arg(long)]
        relation: Option<String>,
        /// Ambient norm: euclidean | sup | l<q>
        #[arg(long)]
        ambient: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Violation threshold for the norm checks
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Expect the relation check to find violations (exit 0 iff it does)
        #[arg(long)]
        expect_violation: bool,
        /// Print the reports as JSON
        #[arg(long)]
        json: bool,
    },
    /// Run the verification across a beta/amplitude grid; one CSV row per point
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for sweep.csv (default: $ORTHOSTAB_OUT_DIR or ".")
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("ORTHOSTAB_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn parse_beta_kind(s: &str) -> Result<BetaKind, HarnessError> {
    match s {
        "euclidean-power" => Ok(BetaKind::EuclideanPower),
        "beta-sum" => Ok(BetaKind::BetaSum),
        "sup-power" => Ok(BetaKind::SupPower),
        other => Err(HarnessError::Invalid(format!("unknown norm kind {other:?}"))),
    }
}

fn parse_relation_kind(s: &str) -> Result<RelationKind, HarnessError> {
    match s {
        "isosceles" => Ok(RelationKind::Isosceles),
        "pythagorean" => Ok(RelationKind::Pythagorean),
        "inner-product" => Ok(RelationKind::InnerProduct),
        other => Err(HarnessError::Invalid(format!(
            "unknown relation kind {other:?}"
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Constants {
            beta,
            p,
            tol,
            quasi: _,
            out,
            json,
            csv,
        } => {
            let outcome = run_constants(&ConstantsRequest { beta, p, tol })?;
            if json {
                print!("{}", outcome.to_json()?);
            } else if csv {
                print!("{}", outcome.csv);
            } else {
                print!("{}", outcome.table);
            }
            if let Some(path) = out {
                let payload = if json { outcome.to_json()? } else { outcome.csv.clone() };
                std::fs::write(&path, payload)?;
            }
            Ok(true)
        }
        Command::Verify {
            config,
            out,
            seed,
            samples,
            workers,
            json,
            csv,
        } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                config.run.seed = seed;
            }
            if let Some(samples) = samples {
                config.run.samples = samples;
            }
            if workers.is_some() {
                config.run.workers = workers;
            }
            let outcome = run_verify(&config)?;
            let dir = out_dir(out);
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("report.json"), &outcome.json)?;
            if let Some(samples_csv) = &outcome.csv {
                std::fs::write(dir.join("samples.csv"), samples_csv)?;
            }
            if json {
                print!("{}", outcome.json);
            }
            if csv {
                if let Some(samples_csv) = &outcome.csv {
                    print!("{samples_csv}");
                }
            }
            print!("{}", outcome.summary);
            Ok(outcome.ok)
        }
        Command::Axioms {
            config,
            kind,
            dim,
            beta,
            relation,
            ambient,
            samples,
            seed,
            tol,
            expect_violation,
            json,
        } => {
            let loaded = config.map(|p| ExperimentConfig::load(&p)).transpose()?;
            let space = build_axioms_space(&loaded, kind.as_deref(), dim, beta)?;
            let rel = build_axioms_relation(&loaded, relation.as_deref(), ambient.as_deref(), dim)?;
            let outcome = run_axioms(&AxiomsRequest {
                space,
                relation: rel,
                samples,
                seed,
                tol,
                expect_violation,
            })?;
            if json {
                print!("{}", outcome.to_json()?);
            }
            print!("{}", outcome.summary);
            Ok(outcome.ok)
        }
        Command::Sweep {
            config,
            out,
            seed,
            samples,
            workers,
        } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                config.run.seed = seed;
            }
            if let Some(samples) = samples {
                config.run.samples = samples;
            }
            if workers.is_some() {
                config.run.workers = workers;
            }
            let outcome = run_sweep(&config)?;
            let dir = out_dir(out);
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("sweep.csv"), &outcome.csv)?;
            print!("{}", outcome.summary);
            Ok(outcome.ok)
        }
    }
}

fn build_axioms_space(
    loaded: &Option<ExperimentConfig>,
    kind: Option<&str>,
    dim: Option<usize>,
    beta: Option<f64>,
) -> Result<Option<BetaSpace>, HarnessError> {
    if let Some(kind) = kind {
        let dim = dim.ok_or_else(|| HarnessError::Invalid("--kind needs --dim".into()))?;
        let beta = beta.ok_or_else(|| HarnessError::Invalid("--kind needs --beta".into()))?;
        return Ok(Some(BetaSpace::new(parse_beta_kind(kind)?, dim, beta)?));
    }
    if let Some(config) = loaded {
        return Ok(Some(config.build()?.target));
    }
    Ok(None)
}

fn build_axioms_relation(
    loaded: &Option<ExperimentConfig>,
    relation: Option<&str>,
    ambient: Option<&str>,
    dim: Option<usize>,
) -> Result<Option<(OrthoRelation, usize)>, HarnessError> {
    if let Some(relation) = relation {
        let ambient: AmbientNorm = ambient
            .ok_or_else(|| HarnessError::Invalid("--relation needs --ambient".into()))?
            .parse()?;
        let dim = dim.ok_or_else(|| HarnessError::Invalid("--relation needs --dim".into()))?;
        let rel = OrthoRelation::new(parse_relation_kind(relation)?, ambient, 1e-9)?;
        return Ok(Some((rel, dim)));
    }
    if let Some(config) = loaded {
        let built = config.build()?;
        return Ok(Some((built.relation, config.space_x.dim)));
    }
    Ok(None)
}
