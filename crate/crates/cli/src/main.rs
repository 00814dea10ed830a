mod args;
mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;

use args::{Cli, Command, RunConfig};
use error::{CliError, CliResult, ErrorReport};
use manifest::{default_manifest_path, RunManifest};

const THREADS_VAR: &str = "FRAMETHRESH_THREADS";

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| {
            CliError::validation(THREADS_VAR, format!("`{value}` is not a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::validation(THREADS_VAR, e.to_string()))
}

fn seed_of(config: &RunConfig) -> Option<u64> {
    match config {
        RunConfig::Simulate(a) => Some(a.seed),
        _ => None,
    }
}

/// Runs `config` and records it; the manifest goes to `manifest_path`, or
/// next to the primary output when there is one.
fn execute(config: RunConfig, argv: Vec<String>, manifest_path: Option<PathBuf>) -> CliResult<()> {
    let config = commands::resolve(config)?;
    let started_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let clock = Instant::now();
    let output = commands::run(&config)?;
    if let Some(text) = &output.stdout {
        print!("{text}");
    }
    let manifest_path =
        manifest_path.or_else(|| output.files.first().map(|p| default_manifest_path(p)));
    if let Some(path) = manifest_path {
        let manifest = RunManifest {
            command: config.name().to_string(),
            argv,
            seed: seed_of(&config),
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads: rayon::current_num_threads(),
            started_at,
            elapsed_seconds: clock.elapsed().as_secs_f64(),
            outputs: output.files,
            config,
        };
        manifest.write(&path)?;
    }
    Ok(())
}

fn real_main() -> CliResult<()> {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            return Err(CliError::Usage(
                e.render().to_string().trim_end().to_string(),
            ))
        }
    };
    configure_threads()?;
    let config = match cli.command {
        Command::Thresholds(a) => RunConfig::Thresholds(a),
        Command::Denoise(a) => RunConfig::Denoise(a),
        Command::Simulate(a) => RunConfig::Simulate(a),
        Command::Diagnose(a) => RunConfig::Diagnose(a),
        Command::Replay(r) => {
            let mut config = RunManifest::read(&r.manifest_path)?.config;
            if let Some(dir) = &r.output_dir {
                commands::redirect_outputs(&mut config, dir);
            }
            config
        }
    };
    execute(config, argv, cli.manifest)
}

fn main() {
    if let Err(e) = real_main() {
        let report = ErrorReport::from(&e);
        eprintln!(
            "{}",
            serde_json::to_string(&report).expect("error reports serialize")
        );
        std::process::exit(report.code);
    }
}
