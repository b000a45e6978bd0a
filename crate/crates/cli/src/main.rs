mod commands;
mod config;
mod verify;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use config::{Cli, Command, RunConfig};

fn run(cfg: &RunConfig) -> Result<bool> {
    match cfg.command {
        Command::Verify => {
            let report = verify::run_verify(cfg);
            match &cfg.out {
                Some(path) => emergence_core::export::write_json(&report, path)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => commands::print_json(&report)?,
            }
            let failing = report.failing();
            if !failing.is_empty() {
                eprintln!("failing checks: {}", failing.join(", "));
            }
            return Ok(failing.is_empty());
        }
        Command::Trajectory => commands::run_trajectory(cfg)?,
        Command::Profile => commands::run_profile(cfg, false)?,
        Command::BoostProfile => commands::run_profile(cfg, true)?,
        Command::Residual => commands::run_residual(cfg)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let outcome = RunConfig::resolve(Cli::parse()).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
