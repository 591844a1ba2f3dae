use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commands::{self, ReplayArgs};
use crate::{Cli, CliError, CliResult, Command, Outputs};

/// Where the manifest goes when neither `--manifest` nor `--out` is given.
pub const DEFAULT_MANIFEST: &str = "cutoff-lab.manifest.json";

/// One output of a run. `path` is `None` for standard output.
#[derive(Debug, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: Option<PathBuf>,
    pub bytes: usize,
    pub sha256: String,
}

impl OutputRecord {
    fn new(path: Option<PathBuf>, contents: &str) -> Self {
        Self { path, bytes: contents.len(), sha256: sha256(contents) }
    }

    fn label(&self) -> String {
        self.path.as_ref().map_or_else(|| "<stdout>".to_string(), |p| p.display().to_string())
    }
}

fn sha256(contents: &str) -> String {
    Sha256::digest(contents.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Enough to regenerate a run: the argument vector and the directory it
/// ran in. Outputs contain no timestamps, so a replay is byte-identical.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub argv: Vec<String>,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub working_dir: PathBuf,
    /// Primary output first, then side files.
    pub outputs: Vec<OutputRecord>,
}

impl RunManifest {
    pub fn new(cli: &Cli, argv: &[OsString], outputs: &Outputs) -> CliResult<Self> {
        let argv = argv
            .iter()
            .map(|a| a.to_str().map(str::to_owned))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| CliError::Manifest("arguments are not valid UTF-8".into()))?;
        let seed = match &cli.command {
            Command::SectorSim(a) => Some(a.seed),
            _ => None,
        };
        let working_dir = std::env::current_dir().map_err(|source| CliError::Io { path: ".".into(), source })?;
        let mut records = vec![OutputRecord::new(cli.out.clone(), &outputs.primary)];
        records.extend(outputs.files.iter().map(|(p, c)| OutputRecord::new(Some(p.clone()), c)));
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: cli.command.name().into(),
            argv,
            parameters: serde_json::to_value(&cli.command).expect("serializable"),
            seed,
            working_dir,
            outputs: records,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

/// Re-executes the recorded command in its working directory. Every
/// regenerated output must match its recorded digest, and files must also
/// match what is on disk; with `--write` the files are rewritten instead.
pub fn replay(args: &ReplayArgs) -> CliResult<String> {
    let text = std::fs::read_to_string(&args.manifest)
        .map_err(|source| CliError::Io { path: args.manifest.clone(), source })?;
    let m: RunManifest = serde_json::from_str(&text).map_err(|e| CliError::Manifest(e.to_string()))?;
    if m.version != env!("CARGO_PKG_VERSION") {
        return Err(CliError::Manifest(format!(
            "written by version {}, this is {}",
            m.version,
            env!("CARGO_PKG_VERSION")
        )));
    }
    let argv = std::iter::once("cutoff-lab".to_string()).chain(m.argv.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Manifest(e.to_string()))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Manifest("a manifest cannot replay a replay".into()));
    }
    std::env::set_current_dir(&m.working_dir).map_err(|source| CliError::Io { path: m.working_dir.clone(), source })?;
    let outputs = commands::execute(&cli.command)?;
    let mut produced = vec![(cli.out.clone(), outputs.primary)];
    produced.extend(outputs.files.into_iter().map(|(p, c)| (Some(p), c)));
    if produced.len() != m.outputs.len() {
        return Err(CliError::Manifest(format!(
            "manifest records {} outputs, the replay produced {}",
            m.outputs.len(),
            produced.len()
        )));
    }
    let mut report = String::new();
    for ((path, contents), record) in produced.iter().zip(&m.outputs) {
        if *path != record.path {
            return Err(CliError::Manifest(format!(
                "output {} is not {}",
                record.label(),
                path.as_ref().map_or("<stdout>".into(), |p| p.display().to_string())
            )));
        }
        if sha256(contents) != record.sha256 {
            return Err(CliError::Mismatch(record.label().into()));
        }
        let Some(path) = path else {
            report.push_str("identical <stdout>\n");
            continue;
        };
        if args.write {
            crate::write_file(path, contents)?;
            report.push_str(&format!("wrote {}\n", path.display()));
        } else {
            let old = std::fs::read(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            if old != contents.as_bytes() {
                return Err(CliError::Mismatch(path.clone()));
            }
            report.push_str(&format!("identical {}\n", path.display()));
        }
    }
    Ok(report)
}
