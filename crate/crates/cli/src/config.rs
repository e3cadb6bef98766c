//! Run configuration: command-line flags merged over an optional JSON file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;
/// Environment variable that overrides `--out`.
pub const OUT_ENV: &str = "MOMENTA_OUT";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Clone, Debug, Default, Args)]
pub struct CommonArgs {
    /// Scenario id (see the README for the list).
    #[arg(long)]
    pub scenario: Option<String>,
    /// Algebra for `roots`: so3, su2, su3, u2, tN, or a product such as su2xsu2.
    #[arg(long)]
    pub algebra: Option<String>,
    /// Integration horizon.
    #[arg(long = "T", value_name = "T")]
    pub t_end: Option<f64>,
    /// Time step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Seed for all random sampling [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random sample points per check.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output directory; files are printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for point batches.
    #[arg(long)]
    pub parallel: Option<usize>,
    /// Output format [default: json].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Record wall time in reports (makes them non-reproducible).
    #[arg(long)]
    pub timing: bool,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<String>,
    pub algebra: Option<String>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub parallel: Option<usize>,
    pub format: Option<Format>,
    pub timing: Option<bool>,
    /// Per-check tolerance overrides keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Overrides {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for Overrides {
    fn default() -> Self {
        Overrides { t_end: None, dt: None, seed: DEFAULT_SEED, samples: None, tolerances: BTreeMap::new() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario_id: String,
    pub algebra: Option<String>,
    pub overrides: Overrides,
    pub output_dir: Option<PathBuf>,
    pub parallel: usize,
    pub format: Format,
    pub timing: bool,
}

impl ScenarioConfig {
    pub fn new(scenario_id: &str) -> Self {
        ScenarioConfig {
            scenario_id: scenario_id.to_string(),
            algebra: None,
            overrides: Overrides::default(),
            output_dir: None,
            parallel: 1,
            format: Format::Json,
            timing: false,
        }
    }

    /// Merge flags over the file config; `env_out` (from [`OUT_ENV`]) beats both.
    pub fn resolve(args: &CommonArgs, env_out: Option<PathBuf>) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let cfg = ScenarioConfig {
            scenario_id: args.scenario.clone().or(file.scenario).unwrap_or_default(),
            algebra: args.algebra.clone().or(file.algebra),
            overrides: Overrides {
                t_end: args.t_end.or(file.t_end),
                dt: args.dt.or(file.dt),
                seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
                samples: args.samples.or(file.samples),
                tolerances: file.tolerances,
            },
            output_dir: env_out.or_else(|| args.out.clone()).or(file.out),
            parallel: args.parallel.or(file.parallel).unwrap_or(1),
            format: args.format.or(file.format).unwrap_or_default(),
            timing: args.timing || file.timing.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let o = &self.overrides;
        if let Some(dt) = o.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(CliError::Usage(format!("--dt must be positive, got {dt}")));
            }
        }
        if let Some(t) = o.t_end {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("--T must be nonnegative, got {t}")));
            }
        }
        if o.samples == Some(0) {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        if self.parallel == 0 {
            return Err(CliError::Usage("--parallel must be at least 1".into()));
        }
        if let Some((name, tol)) = o.tolerances.iter().find(|(_, t)| t.is_nan() || **t < 0.0) {
            return Err(CliError::Usage(format!("tolerance for {name} must be nonnegative, got {tol}")));
        }
        Ok(())
    }
}
