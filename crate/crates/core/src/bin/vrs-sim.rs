//! `vrs-sim <config.ini> [--svg] [--out DIR] [--grid-points N]`
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 numerical failure.

use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use vrs_core::run::{run, RunOptions};
use vrs_core::{parse_config, Error};

#[derive(Parser)]
#[command(version, about = "Polarization-resolved emission spectra of a cavity-coupled emitter")]
struct Cli {
    /// INI configuration file.
    config: PathBuf,
    /// Also write SVG line plots.
    #[arg(long)]
    svg: bool,
    /// Output directory (overrides `out_dir`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Points on the default frequency grid (overrides `n_points`).
    #[arg(long, value_name = "N")]
    grid_points: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 1,
        e if e.is_config() => 2,
        _ => 3,
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("VRS_SIM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("VRS_SIM_THREADS must be a non-negative integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(1);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(dir) = cli.out {
        cfg.out_dir = dir;
    }
    if let Some(n) = cli.grid_points {
        cfg.grid_points = n;
        if let Some(g) = cfg.grid {
            match vrs_core::FrequencyGrid::new(g.start(), g.stop(), n) {
                Ok(g) => cfg.grid = Some(g),
                Err(e) => {
                    eprintln!("error: --grid-points: {e}");
                    return ExitCode::from(2);
                }
            }
        }
    }
    match run(&cfg, RunOptions { svg: cli.svg }) {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
