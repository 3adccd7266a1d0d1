mod commands;
mod manifest;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{CommandFactory, Parser, Subcommand};

use crate::commands::{execute, Command};
use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "ngd", version, about = "Non-local dynamics on weighted graphs")]
struct Cli {
    /// Directory for CSV outputs and manifest.json.
    #[arg(long, global = true, default_value = "ngd-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Top,
}

#[derive(Debug, Subcommand)]
enum Top {
    #[command(flatten)]
    Run(Command),
    /// Re-execute a recorded run and check its outputs are byte-identical.
    Replay {
        /// manifest.json, or the directory containing it.
        manifest: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn error_kind(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ngd::Error>() {
            return e.kind();
        }
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return f.kind;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return "IoError";
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return "ManifestError";
        }
    }
    "Error"
}

fn replay(path: &std::path::Path, out: &std::path::Path) -> Result<()> {
    let recorded = RunManifest::load(path)?;
    for input in &recorded.inputs {
        let now = RunManifest::input_record(&input.path)?;
        if now.sha256 != input.sha256 {
            return Err(Failure {
                kind: "InputChanged",
                message: format!("{} no longer matches the recorded hash", input.path.display()),
            }
            .into());
        }
    }
    let fresh = execute(&recorded.command, recorded.argv.clone(), out)?;
    if fresh.outputs != recorded.outputs {
        let differing: Vec<&str> =
            recorded.outputs.iter().filter(|o| !fresh.outputs.contains(o)).map(|o| o.file.as_str()).collect();
        return Err(
            Failure { kind: "ReplayMismatch", message: format!("outputs differ: {}", differing.join(", ")) }.into()
        );
    }
    println!("reproduced {} outputs", fresh.outputs.len());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Top::Replay { manifest } => replay(&manifest, &cli.out),
        Top::Run(mut command) => {
            command.canonicalize()?;
            let argv: Vec<String> = std::env::args().skip(1).collect();
            execute(&command, argv, &cli.out).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Top::Run(command) = &cli.command {
        if let Err(msg) = command.check() {
            Cli::command().error(clap::error::ErrorKind::ArgumentConflict, msg).exit();
        }
    }
    if let Some(threads) = std::env::var("NGD_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not size thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let message = format!("{err:#}");
            let body = serde_json::json!({ "error": error_kind(&err), "message": message });
            eprintln!("{body}");
            ExitCode::from(1)
        }
    }
}
