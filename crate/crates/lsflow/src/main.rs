use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lsflow::config::ExperimentConfig;
use lsflow::presets::{preset, PRESET_NAMES};
use lsflow::runner::{self, RunnerError};

/// Distributed least-squares flow simulator over fixed and switching
/// networks.
#[derive(Parser)]
#[command(name = "lsflow", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigSource {
    /// Path to an experiment config JSON file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name (see `lsflow preset --list`).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an experiment and write CSV/JSON artifacts.
    Run {
        #[command(flatten)]
        source: ConfigSource,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Simulation horizon (overrides the config).
        #[arg(long)]
        horizon: Option<f64>,
        /// Also emit log-log SVG plots.
        #[arg(long)]
        emit_svg: bool,
        /// Run even if the (scenario, step size) pair is inadmissible.
        #[arg(long)]
        force: bool,
    },
    /// Report scenario class, assumption profile, and admissibility.
    Check {
        #[command(flatten)]
        source: ConfigSource,
    },
    /// Re-fit a log-log slope on an existing error-series CSV.
    Analyze {
        csv_path: PathBuf,
        t_lo: f64,
        t_hi: f64,
    },
    /// Print a preset's config JSON.
    Preset {
        name: Option<String>,
        /// List available preset names.
        #[arg(long)]
        list: bool,
    },
}

fn load_config(source: &ConfigSource) -> Result<ExperimentConfig, String> {
    match (&source.config, &source.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            ExperimentConfig::from_json(&text).map_err(|e| e.to_string())
        }
        (None, Some(name)) => {
            preset(name).ok_or_else(|| format!("unknown preset `{name}`; available: {}", PRESET_NAMES.join(", ")))
        }
        _ => Err("exactly one of --config or --preset is required".to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, RunnerError> {
    match cli.command {
        Command::Run {
            source,
            out,
            horizon,
            emit_svg,
            force,
        } => {
            let mut cfg = load_config(&source).map_err(config_error)?;
            if let Some(dir) = out {
                cfg.outputs.dir = dir.display().to_string();
            }
            if let Some(h) = horizon {
                cfg.horizon = h;
            }
            if emit_svg {
                cfg.outputs.emit_svg = true;
            }
            let report = runner::run(&cfg, force)?;
            println!(
                "{}: scenario {}, t = {:.3e}, consensus_error = {:.3e}, solution_error = {:.3e}",
                cfg.label,
                report.scenario.name(),
                report.terminal_time,
                report.terminal_consensus_error,
                report.terminal_solution_error
            );
            if let Some(fit) = &report.slope_solution {
                println!("fitted solution-error slope: {:.4}", fit.slope);
            }
            println!("artifacts in {}", report.out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { source } => {
            let cfg = load_config(&source).map_err(config_error)?;
            let report = runner::check(&cfg)?;
            print!("{}", report.render());
            Ok(if report.admissible {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Analyze {
            csv_path,
            t_lo,
            t_hi,
        } => {
            let fit = runner::analyze(&csv_path, t_lo, t_hi)?;
            println!(
                "{{\"slope\": {:.6}, \"intercept\": {:.6}, \"t_lo\": {}, \"t_hi\": {}, \"rms_residual\": {:.6e}}}",
                fit.slope, fit.intercept, fit.t_lo, fit.t_hi, fit.rms_residual
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Preset { name, list } => {
            if list || name.is_none() {
                for n in PRESET_NAMES {
                    println!("{n}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let name = name.unwrap();
            let cfg = preset(&name).ok_or_else(|| {
                config_error(format!(
                    "unknown preset `{name}`; available: {}",
                    PRESET_NAMES.join(", ")
                ))
            })?;
            print!("{}", cfg.to_json_pretty());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn config_error(message: String) -> RunnerError {
    RunnerError::Usage(message)
}
