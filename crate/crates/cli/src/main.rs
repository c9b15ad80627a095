//! Command-line front end for the cavity electro-optics toolkit.
//!
//! Exit codes: 0 success, 2 configuration/validation failure, 3 solver
//! instability where a steady state was demanded, 1 anything else.

mod commands;
mod config;
mod output;
mod presets;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use commands::{ConfigFailure, Ctx, OutputFormat, SteadyStateUnavailable};
use config::{apply_override, RunConfig};

#[derive(Parser)]
#[command(
    name = "cavity-eo",
    version,
    about = "Cavity electro-optics: sideband cooling, parametric entanglement, parasitic limits and back-action-evading measurement of a microwave mode"
)]
struct Cli {
    /// Preset name (see `cavity-eo presets`) or a path to a config JSON.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Override a config field, e.g. --set pump.power_W=1e-3 (repeatable).
    #[arg(long = "set", global = true, value_name = "PATH=VALUE")]
    set: Vec<String>,
    /// Output directory for CSV/JSON files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for the trajectory oracle.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads for sweeps and ensembles (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output format for data files.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Device parameters to coupling-rate report.
    Coupling,
    /// Red-detuned sideband cooling: gain, limit, steady occupation.
    Cooling,
    /// Blue-detuned parametric amplification: threshold and entanglement.
    Pa,
    /// Three-mode cooling with the parasitic blue sideband.
    Parasitic,
    /// Back-action-evading measurement time series.
    Bae,
    /// Closed form vs Lyapunov vs trajectory oracle, with pass/fail.
    Compare {
        /// Also dump every Nth oracle step of every trajectory to
        /// trajectories.csv (debugging; large files).
        #[arg(long, value_name = "STRIDE")]
        dump_trajectories: Option<usize>,
    },
    /// Sweep one or two config paths and tabulate the observables.
    Sweep {
        /// Axis spec `path=start:stop:points[:log|:lin]` (max 2).
        #[arg(long = "axis", value_name = "PATH=START:STOP:POINTS[:log]")]
        axes: Vec<String>,
    },
    /// List the built-in presets.
    Presets,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Coupling => "coupling",
            Command::Cooling => "cooling",
            Command::Pa => "pa",
            Command::Parasitic => "parasitic",
            Command::Bae => "bae",
            Command::Compare { .. } => "compare",
            Command::Sweep { .. } => "sweep",
            Command::Presets => "presets",
        }
    }
}

fn load_config(cli: &Cli) -> Result<(serde_json::Value, RunConfig, Option<String>)> {
    let preset = cli.preset.as_deref().ok_or_else(|| {
        anyhow!(ConfigFailure(format!(
            "--preset <name|path> is required; built-ins: {}",
            presets::names().join(", ")
        )))
    })?;
    let (text, name) = match presets::lookup(preset) {
        Some(text) => (text.to_owned(), Some(preset.to_owned())),
        None => {
            let path = PathBuf::from(preset);
            if !path.exists() {
                return Err(anyhow!(ConfigFailure(format!(
                    "`{preset}` is neither a built-in preset nor a file; built-ins: {}",
                    presets::names().join(", ")
                ))));
            }
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            (text, None)
        }
    };
    let mut doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        anyhow!(ConfigFailure(format!(
            "config JSON at line {}: {e}",
            e.line()
        )))
    })?;
    for assignment in &cli.set {
        apply_override(&mut doc, assignment)
            .map_err(|e| anyhow!(ConfigFailure(format!("{e:#}"))))?;
    }
    let cfg =
        RunConfig::from_value(doc.clone()).map_err(|e| anyhow!(ConfigFailure(format!("{e:#}"))))?;
    Ok((doc, cfg, name))
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("initializing the thread pool")?;
    }
    if let Command::Presets = cli.command {
        for (name, text) in presets::PRESETS {
            let description = serde_json::from_str::<serde_json::Value>(text)
                .ok()
                .and_then(|v| {
                    v.get("description")
                        .and_then(|d| d.as_str())
                        .map(String::from)
                })
                .unwrap_or_default();
            println!("{name}: {description}");
        }
        for (alias, target) in presets::ALIASES {
            println!("{alias} (alias of {target})");
        }
        return Ok(());
    }

    let (raw_config, config, preset_name) = load_config(&cli)?;
    let ctx = Ctx {
        raw_config,
        config,
        preset_name,
        overrides: cli.set.clone(),
        out_dir: cli.out.clone(),
        seed: cli.seed,
        format: cli.format,
        command: cli.command.name(),
    };
    match &cli.command {
        Command::Coupling => commands::run_coupling(&ctx),
        Command::Cooling => commands::run_cooling(&ctx),
        Command::Pa => commands::run_pa(&ctx),
        Command::Parasitic => commands::run_parasitic(&ctx),
        Command::Bae => commands::run_bae(&ctx),
        Command::Compare { dump_trajectories } => commands::run_compare(&ctx, *dump_trajectories),
        Command::Sweep { axes } => sweep::run_sweep(&ctx, axes),
        Command::Presets => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigFailure>().is_some()
                || e.root_cause().downcast_ref::<ConfigFailure>().is_some()
            {
                ExitCode::from(2)
            } else if e.downcast_ref::<SteadyStateUnavailable>().is_some()
                || e.root_cause()
                    .downcast_ref::<SteadyStateUnavailable>()
                    .is_some()
            {
                ExitCode::from(3)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
