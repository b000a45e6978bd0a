//! Data-emitting commands: trajectory, profile, boost-profile, residual.

use std::io::Write;

use anyhow::{Context, Result};
use serde::Serialize;

use emergence_core::dynamics::closed_form_amplitude;
use emergence_core::export::{write_json, write_profile, write_trajectory};
use emergence_core::{
    integrate_trajectory, residual_study, BoostVariant, BoostedFrame, Complex64, FieldProfile,
    ProfileModel, ResidualReport, ShellSpec,
};

use crate::config::RunConfig;

/// Residual levels start at this spacing and halve twice.
pub const RESIDUAL_H0: f64 = 0.1;
pub const RESIDUAL_LEVELS: usize = 3;
pub const SLOPE_TOLERANCE: f64 = 0.1;

/// Pretty JSON on stdout; a closed pipe is an error, not a panic.
pub fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string_pretty(value)?).context("writing to stdout")
}

pub fn shell_spec(cfg: &RunConfig) -> Result<ShellSpec> {
    Ok(ShellSpec::new(cfg.mu, cfg.side)?.with_order(cfg.order)?)
}

pub fn rest_model(cfg: &RunConfig) -> Result<ProfileModel> {
    Ok(ProfileModel::rest(shell_spec(cfg)?, cfg.profile_variant.into()))
}

pub fn boosted_model(cfg: &RunConfig, velocity: f64) -> Result<ProfileModel> {
    let frame = BoostedFrame::new(velocity, cfg.boost_variant.into())?;
    Ok(ProfileModel::boosted(shell_spec(cfg)?, cfg.profile_variant.into(), frame))
}

pub fn render_profile(cfg: &RunConfig, boosted: bool) -> Result<FieldProfile> {
    let model = if boosted { boosted_model(cfg, cfg.velocity)? } else { rest_model(cfg)? };
    Ok(FieldProfile::sample(model, cfg.parsed_grid()?.points()))
}

pub fn run_profile(cfg: &RunConfig, boosted: bool) -> Result<()> {
    let out = cfg.require_out()?;
    let profile = render_profile(cfg, boosted)?;
    let sidecar = write_profile(&profile, out).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {} points to {} (+ {})", profile.points.len(), out.display(), sidecar.display());
    Ok(())
}

pub fn run_trajectory(cfg: &RunConfig) -> Result<()> {
    let out = cfg.require_out()?;
    let omega = shell_spec(cfg)?.omega;
    let q0 = Complex64::new(closed_form_amplitude(omega), 0.0);
    let traj = integrate_trajectory(q0, omega, cfg.horizon, cfg.dt)?;
    write_trajectory(&traj, out).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {} samples to {}", traj.samples.len(), out.display());
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ResidualOutput {
    pub model: ProfileModel,
    pub mass: f64,
    pub points: usize,
    #[serde(flatten)]
    pub report: ResidualReport,
    pub converged: bool,
    /// What the configured variant is expected to do.
    pub expected: &'static str,
}

pub fn residual_output(cfg: &RunConfig, model: ProfileModel) -> Result<ResidualOutput> {
    let region = cfg.residual_region()?;
    let mass = model.spec.mass;
    let report = residual_study(&model, mass, RESIDUAL_H0, RESIDUAL_LEVELS, &region)?;
    let converged = report.pairwise_slopes.iter().all(|s| (s - 2.0).abs() <= SLOPE_TOLERANCE);
    let literal = matches!(model.frame, Some(f) if f.variant == BoostVariant::Literal && f.boost.velocity() != 0.0);
    let expected = if literal { "no convergence (literal boost variant)" } else { "second-order convergence" };
    Ok(ResidualOutput { model, mass, points: region.points.len(), report, converged, expected })
}

pub fn run_residual(cfg: &RunConfig) -> Result<()> {
    let model = if cfg.velocity > 0.0 { boosted_model(cfg, cfg.velocity)? } else { rest_model(cfg)? };
    let output = residual_output(cfg, model)?;
    match &cfg.out {
        Some(path) => write_json(&output, path).with_context(|| format!("writing {}", path.display()))?,
        None => print_json(&output)?,
    }
    Ok(())
}
