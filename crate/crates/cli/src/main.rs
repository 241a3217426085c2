use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sta_core::harness::presets::preset;
use sta_core::harness::{run, scan, HarnessError, PresetOptions, ScanSpec, SystemConfig, PRESET_IDS};

/// Counterdiabatic driving of decaying two- and three-level systems.
#[derive(Parser)]
#[command(name = "sta", version)]
struct Cli {
    /// Worker threads for scans (default: all logical CPUs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the integration step [s].
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one configuration and print its summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Trajectory CSV (default: from the config, else next to it).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a figure preset into a directory.
    Preset {
        id: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a two-dimensional fidelity scan.
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// Grid CSV (default: from the spec, else next to it).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the preset ids.
    Presets,
}

fn beside(config: &Path, suffix: &str) -> PathBuf {
    let stem = config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    config.with_file_name(format!("{stem}{suffix}"))
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { config, out } => {
            let mut cfg = SystemConfig::load(&config)?;
            if let Some(dt) = cli.dt {
                cfg.integrator.dt = Some(dt);
            }
            let result = run::run_config(&cfg)?;
            let csv = out
                .or_else(|| cfg.outputs.trajectory.clone())
                .unwrap_or_else(|| beside(&config, ".csv"));
            run::write_run(&cfg, &result, Some(&csv))?;
            println!("{}", result.summary.to_json());
        }
        Command::Preset { id, out } => {
            let opts = PresetOptions {
                threads: cli.threads,
                dt: cli.dt,
            };
            let summary = sta_core::harness::run_preset(&id, &out, &opts)?;
            println!("{summary}");
        }
        Command::Scan { config, out } => {
            let mut spec = ScanSpec::load(&config)?;
            if let Some(dt) = cli.dt {
                spec.base.integrator.dt = Some(dt);
            }
            if cli.threads.is_some() {
                spec.threads = cli.threads;
            }
            let result = scan::run_scan(&spec)?;
            let csv = out
                .or_else(|| spec.outputs.csv.clone())
                .unwrap_or_else(|| beside(&config, ".scan.csv"));
            scan::write_scan(&result, &csv)?;
            println!("{}", result.summary_json());
        }
        Command::Presets => {
            for id in PRESET_IDS {
                println!("{id}\t{}", preset(id)?.description);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
