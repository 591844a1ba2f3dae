//! `cutoff-lab`: reproducible cutoff experiments.
//!
//! Every command computes its outputs in memory first; they are then
//! written to stdout or files, and a run manifest records the argument
//! vector so `replay` can regenerate and byte-compare them.

mod commands;
mod manifest;
mod render;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cutoff_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("replay mismatch: {0} differs from the regenerated output")]
    Mismatch(PathBuf),
    #[error("check failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Manifest(_) => "manifest",
            CliError::Mismatch(_) => "replay-mismatch",
            CliError::Assertion(_) => "assertion",
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "cutoff-lab", version, about = "Random-walk cutoff experiments on Ã buildings and finite graphs")]
pub struct Cli {
    /// Write the primary output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Run-manifest path; defaults to `<out>.manifest.json` when `--out` is
    /// set and to `cutoff-lab.manifest.json` otherwise.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Do not write a run manifest.
    #[arg(long, global = true, conflicts_with = "manifest")]
    pub no_manifest: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Drift and degree polynomials, and the walk constants at a given q.
    Constants(commands::ConstantsArgs),
    /// Monte Carlo of the projected walk on the sector.
    SectorSim(commands::SectorSimArgs),
    /// Exact distribution of the projected walk at a fixed horizon.
    SectorExact(commands::SectorExactArgs),
    /// Mixing profile, mixing times, cutoff ratios and spectrum of graphs.
    Analyze(commands::AnalyzeArgs),
    /// Cayley graph of the group generated by a set of projective matrices.
    Cayley(commands::CayleyArgs),
    /// Predicted cutoff schedule for an n-vertex quotient.
    Predict(commands::PredictArgs),
    /// Re-run a manifest and compare the outputs byte for byte.
    Replay(commands::ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::SectorSim(_) => "sector-sim",
            Command::SectorExact(_) => "sector-exact",
            Command::Analyze(_) => "analyze",
            Command::Cayley(_) => "cayley",
            Command::Predict(_) => "predict",
            Command::Replay(_) => "replay",
        }
    }
}

/// Everything a command produces: the primary text and side files.
#[derive(Debug, Default)]
pub struct Outputs {
    pub primary: String,
    pub files: Vec<(PathBuf, String)>,
}

pub fn write_file(path: &PathBuf, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.clone(), source })
}

fn run(argv: Vec<OsString>) -> CliResult<()> {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            return Err(CliError::Usage(first));
        }
    };
    if let Command::Replay(args) = &cli.command {
        let out = manifest::replay(args)?;
        print!("{out}");
        return Ok(());
    }
    let outputs = commands::execute(&cli.command)?;
    match &cli.out {
        Some(p) => write_file(p, &outputs.primary)?,
        None => print!("{}", outputs.primary),
    }
    for (p, contents) in &outputs.files {
        write_file(p, contents)?;
    }
    if cli.no_manifest {
        return Ok(());
    }
    let manifest_path = cli.manifest.clone().unwrap_or_else(|| match &cli.out {
        Some(o) => {
            let mut s = o.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
        None => PathBuf::from(manifest::DEFAULT_MANIFEST),
    });
    let m = manifest::RunManifest::new(&cli, &argv[1..], &outputs)?;
    write_file(&manifest_path, &m.to_json())
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
