//! Command-line front end: scenario runs, identity verification and plot
//! emission. Exit codes: 0 on pass, 1 on a criterion failure, 2 on a
//! configuration error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scalerel::scenario::{emit_plots, parse_kv, run, ScenarioConfig};
use scalerel::{Error, Result};

#[derive(Parser)]
#[command(name = "scalerel", version, about = "stochastic-geodesic quantum laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Random seed (mandatory unless the config file provides one).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for snapshots, reports and the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Walker count override.
    #[arg(long)]
    walkers: Option<usize>,
    /// Noise law override.
    #[arg(long, value_parser = ["gaussian", "uniform", "rademacher"])]
    noise: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a wave scenario (free-packet, plane-wave or sho).
    Solve(CommonOpts),
    /// Walker-ensemble Born-emergence run.
    Walk(CommonOpts),
    /// Fractal-dimension scale scan.
    Fractal(CommonOpts),
    /// Run the identity suite and print the reports.
    Verify(CommonOpts),
    /// Two-slit interference with which-way selection.
    Twoslit(CommonOpts),
    /// Emit gnuplot scripts for a completed run directory.
    Plots(CommonOpts),
}

impl Command {
    fn opts(&self) -> &CommonOpts {
        match self {
            Command::Solve(o)
            | Command::Walk(o)
            | Command::Fractal(o)
            | Command::Verify(o)
            | Command::Twoslit(o)
            | Command::Plots(o) => o,
        }
    }

    fn default_scenario(&self) -> &'static str {
        match self {
            Command::Solve(_) => "sho",
            Command::Walk(_) => "born-emergence",
            Command::Fractal(_) => "fractal-scan",
            Command::Verify(_) => "verify-all",
            Command::Twoslit(_) => "double-slit",
            Command::Plots(_) => "",
        }
    }
}

fn build_config(cmd: &Command) -> Result<ScenarioConfig> {
    let opts = cmd.opts();
    let mut map: BTreeMap<String, String> = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_kv(&text)?
        }
        None => BTreeMap::new(),
    };
    map.entry("scenario".into()).or_insert_with(|| cmd.default_scenario().into());
    if let Some(seed) = opts.seed {
        map.insert("seed".into(), seed.to_string());
    }
    if let Some(out) = &opts.out {
        map.insert("out".into(), out.display().to_string());
    }
    if let Some(walkers) = opts.walkers {
        map.insert("walkers".into(), walkers.to_string());
    }
    if let Some(noise) = &opts.noise {
        map.insert("noise".into(), noise.clone());
    }
    ScenarioConfig::from_map(&map)
}

fn execute(cmd: &Command) -> Result<bool> {
    if let Command::Plots(opts) = cmd {
        let dir = opts
            .out
            .clone()
            .ok_or_else(|| Error::Config("plots needs --out <run directory>".into()))?;
        let written = emit_plots(&dir)?;
        for name in written {
            println!("{}", dir.join(name).display());
        }
        return Ok(true);
    }

    let cfg = build_config(cmd)?;
    let manifest = run(&cfg)?;
    if let Command::Verify(_) = cmd {
        let raw = std::fs::read_to_string(cfg.out_dir.join("identity_reports.json"))?;
        println!("{raw}");
    } else {
        println!(
            "{}: {} in {:.1}s, {} files, flags {:?}",
            manifest.scenario,
            if manifest.pass { "pass" } else { "FAIL" },
            manifest.wall_seconds,
            manifest.files.len(),
            manifest.flags
        );
    }
    Ok(manifest.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
