use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SEED_ENV: &str = "QSVLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// lambda = (1, 1/kappa, ...), b on the top eigenvector
    WorstCase,
    /// Porter-Thomas b over a uniform spectrum pinned to 1 and 1/kappa
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Pure,
    Mixed,
}

impl From<Kind> for qsvlab::TestStateKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Pure => qsvlab::TestStateKind::Pure,
            Kind::Mixed => qsvlab::TestStateKind::Mixed,
        }
    }
}

/// Flags shared by every command. Anything left unset falls back to the
/// `--config` file, then to the built-in default.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Dimension N
    #[arg(long)]
    pub n: Option<usize>,
    /// Condition number; cost-gap takes a comma-separated list
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub kappa: Option<Vec<f64>>,
    /// Monte Carlo trials or verifier runs
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed (default: $QSVLAB_SEED, else 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Solver error of the QLSP oracle, at most 0.01
    #[arg(long)]
    pub eps: Option<f64>,
    /// Trace distance of the test state from the solution
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Confidence z for the shot count
    #[arg(long)]
    pub z: Option<f64>,
    /// Output path stem (report-all: output directory)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for Monte Carlo commands
    #[arg(long)]
    pub jobs: Option<usize>,
    /// JSON file with any of the above keys
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(Some(match Raw::deserialize(d)? {
        Raw::One(k) => vec![k],
        Raw::Many(v) => v,
    }))
}

impl Params {
    fn overlay(self, file: Params) -> Params {
        Params {
            n: self.n.or(file.n),
            kappa: self.kappa.or(file.kappa),
            trials: self.trials.or(file.trials),
            seed: self.seed.or(file.seed),
            eps: self.eps.or(file.eps),
            d: self.d.or(file.d),
            kind: self.kind.or(file.kind),
            family: self.family.or(file.family),
            z: self.z.or(file.z),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            jobs: self.jobs.or(file.jobs),
            config: self.config,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub n: usize,
    pub kappa: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub eps: f64,
    pub d: f64,
    pub kind: Kind,
    pub family: Family,
    pub z: f64,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl Settings {
    pub fn resolve(flags: Params, command: &str) -> Result<Settings, CliError> {
        let file = match &flags.config {
            Some(path) => read_config(path)?,
            None => Params::default(),
        };
        let p = flags.overlay(file);
        let seed = match p.seed {
            Some(s) => s,
            None => env_seed()?,
        };
        let s = Settings {
            n: p.n.unwrap_or(16),
            kappa: p.kappa.unwrap_or_else(|| vec![10.0]),
            trials: p.trials.unwrap_or(1000),
            seed,
            eps: p.eps.unwrap_or(0.0),
            d: p.d.unwrap_or(0.125),
            kind: p.kind.unwrap_or(Kind::Pure),
            family: p.family.unwrap_or(Family::Random),
            z: p.z.unwrap_or(1.0),
            out: p
                .out
                .unwrap_or_else(|| PathBuf::from(format!("qsvlab-{command}"))),
            format: p.format.unwrap_or(Format::Json),
            jobs: p.jobs,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        if self.n < 2 {
            return bad(format!("--n {} must be >= 2", self.n));
        }
        if self.kappa.is_empty() {
            return bad("--kappa needs at least one value".into());
        }
        if let Some(k) = self.kappa.iter().find(|k| !(k.is_finite() && **k >= 1.0)) {
            return bad(format!("--kappa {k} must be a finite number >= 1"));
        }
        if self.trials == 0 {
            return bad("--trials must be >= 1".into());
        }
        if !(0.0..=qsvlab::verifier::MAX_SOLVER_ERROR).contains(&self.eps) {
            return bad(format!("--eps {} must lie in [0, 0.01]", self.eps));
        }
        if !(0.0..=1.0).contains(&self.d) {
            return bad(format!("--d {} must lie in [0, 1]", self.d));
        }
        if !(self.z.is_finite() && self.z > 0.0) {
            return bad(format!("--z {} must be > 0", self.z));
        }
        if self.jobs == Some(0) {
            return bad("--jobs must be >= 1".into());
        }
        Ok(())
    }

    pub fn single_kappa(&self, command: &str) -> Result<f64, CliError> {
        match self.kappa.as_slice() {
            [k] => Ok(*k),
            _ => Err(CliError::Validation(format!(
                "{command} takes a single --kappa"
            ))),
        }
    }
}

fn read_config(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("bad config {}: {e}", path.display())))
}

fn env_seed() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("{SEED_ENV}={v:?} is not a u64"))),
        Err(_) => Ok(0),
    }
}
