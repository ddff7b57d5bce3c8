//! `qsvlab` command line: every experiment behind one binary, seeded and
//! reproducible, with JSON/CSV output.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod output;
pub mod settings;

use output::{write_atomic, Artifact};
use settings::{Params, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Model(#[from] qsvlab::QsvError),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qsvlab",
    version,
    about = "Query lower bounds for quantum state verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a QLSP instance
    GenInstance(Params),
    /// Certify the adversarial instance pair
    AdversaryPair(Params),
    /// Monte Carlo of the swap-test verifier
    Verify(Params),
    /// Concentration of ||A^{-1}|b>|| for typical instances
    TypicalSweep(Params),
    /// Copy-count bounds for verifiers that only see |b>
    PmBound(Params),
    /// Spectral gap of the cost Hamiltonian and shot scaling
    CostGap(Params),
    /// All of the above into one directory
    ReportAll(Params),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GenInstance(_) => "gen-instance",
            Command::AdversaryPair(_) => "adversary-pair",
            Command::Verify(_) => "verify",
            Command::TypicalSweep(_) => "typical-sweep",
            Command::PmBound(_) => "pm-bound",
            Command::CostGap(_) => "cost-gap",
            Command::ReportAll(_) => "report-all",
        }
    }

    fn params(self) -> Params {
        match self {
            Command::GenInstance(p)
            | Command::AdversaryPair(p)
            | Command::Verify(p)
            | Command::TypicalSweep(p)
            | Command::PmBound(p)
            | Command::CostGap(p)
            | Command::ReportAll(p) => p,
        }
    }
}

/// Runs a parsed command, returning the files written.
pub fn execute(command: Command) -> Result<Vec<PathBuf>, CliError> {
    let name = command.name();
    let settings = Settings::resolve(command.params(), name)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = settings.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| {
        CliError::Validation(format!("cannot start {:?} workers: {e}", settings.jobs))
    })?;
    let stem = settings.out.clone();
    let artifacts: Vec<Artifact> = pool.install(|| match name {
        "gen-instance" => commands::gen_instance(&settings, &stem),
        "adversary-pair" => commands::adversary_pair(&settings, &stem),
        "verify" => commands::verify(&settings, &stem),
        "typical-sweep" => commands::typical_sweep(&settings, &stem),
        "pm-bound" => commands::pm_bound(&settings, &stem),
        "cost-gap" => commands::cost_gap(&settings, &stem),
        _ => commands::report_all(&settings, &stem),
    })?;
    if name == "report-all" {
        std::fs::create_dir_all(&stem).map_err(|source| CliError::Io {
            path: stem.clone(),
            source,
        })?;
    }
    for a in &artifacts {
        write_atomic(a)?;
    }
    Ok(artifacts.into_iter().map(|a| a.path).collect())
}

/// Parse `args` (program name first) and run; returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("qsvlab: {e}");
            e.exit_code()
        }
    }
}
