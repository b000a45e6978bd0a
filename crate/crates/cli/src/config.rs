//! Run configuration: TOML file, command-line overrides, defaults.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use emergence_core::{BoostVariant, Grid, ProfileVariant, ResidualRegion, SignConvention};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Trajectory,
    Profile,
    BoostProfile,
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaSign {
    /// `Ω = +h/ω`
    #[value(name = "paper")]
    #[serde(rename = "paper")]
    Hamiltonian,
    Energy,
}

impl From<OmegaSign> for SignConvention {
    fn from(s: OmegaSign) -> Self {
        match s {
            OmegaSign::Hamiltonian => SignConvention::Hamiltonian,
            OmegaSign::Energy => SignConvention::EnergyConsistent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileVariantArg {
    /// Keeps the `μ/ω` factor
    #[value(name = "eq35")]
    #[serde(rename = "eq35")]
    ExplicitRatio,
    /// Drops it
    #[value(name = "eq37")]
    #[serde(rename = "eq37")]
    UnitRatio,
}

impl From<ProfileVariantArg> for ProfileVariant {
    fn from(v: ProfileVariantArg) -> Self {
        match v {
            ProfileVariantArg::ExplicitRatio => ProfileVariant::ExplicitRatio,
            ProfileVariantArg::UnitRatio => ProfileVariant::UnitRatio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoostVariantArg {
    Substitution,
    Literal,
}

impl From<BoostVariantArg> for BoostVariant {
    fn from(v: BoostVariantArg) -> Self {
        match v {
            BoostVariantArg::Substitution => BoostVariant::Substitution,
            BoostVariantArg::Literal => BoostVariant::Literal,
        }
    }
}

/// Emergent-particle toolkit: verification suite, trajectories, profiles
/// and Klein-Gordon residual reports.
#[derive(Debug, Parser)]
#[command(name = "emergence", version)]
pub struct Cli {
    /// TOML file with any of the keys below; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Shell radius μ (also the mass)
    #[arg(long)]
    pub mu: Option<f64>,
    /// Box side L
    #[arg(long = "box")]
    pub side: Option<f64>,
    /// Boost velocity along z, in [0, 1)
    #[arg(long)]
    pub velocity: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Gauss-Legendre order of the shell quadrature
    #[arg(long)]
    pub order: Option<usize>,
    /// Sample grid `x,y,z,t`, each axis `value` or `start:end:count`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub omega_sign: Option<OmegaSign>,
    #[arg(long, value_enum)]
    pub profile_variant: Option<ProfileVariantArg>,
    #[arg(long, value_enum)]
    pub boost_variant: Option<BoostVariantArg>,
}

/// Contents of a `--config` file. Keys match the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    command: Option<Command>,
    mu: Option<f64>,
    #[serde(rename = "box")]
    side: Option<f64>,
    velocity: Option<f64>,
    dt: Option<f64>,
    horizon: Option<f64>,
    order: Option<usize>,
    grid: Option<String>,
    out: Option<PathBuf>,
    omega_sign: Option<OmegaSign>,
    profile_variant: Option<ProfileVariantArg>,
    boost_variant: Option<BoostVariantArg>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

pub const DEFAULT_GRID: &str = "0,0,-5:5:101,1";

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub mu: f64,
    #[serde(rename = "box")]
    pub side: f64,
    pub velocity: f64,
    pub dt: f64,
    pub horizon: f64,
    pub order: usize,
    /// `None` selects the command's default sample set.
    pub grid: Option<String>,
    pub out: Option<PathBuf>,
    pub omega_sign: OmegaSign,
    pub profile_variant: ProfileVariantArg,
    pub boost_variant: BoostVariantArg,
    /// Per-check tolerance overrides for `verify`.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Verify,
            mu: 1.0,
            side: 60.0,
            velocity: 0.0,
            dt: 1e-3,
            horizon: 20.0 * PI,
            order: 32,
            grid: None,
            out: None,
            omega_sign: OmegaSign::Energy,
            profile_variant: ProfileVariantArg::UnitRatio,
            boost_variant: BoostVariantArg::Substitution,
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn resolve(cli: Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let d = RunConfig::default();
        let cfg = RunConfig {
            command: cli.command.or(file.command).unwrap_or(d.command),
            mu: cli.mu.or(file.mu).unwrap_or(d.mu),
            side: cli.side.or(file.side).unwrap_or(d.side),
            velocity: cli.velocity.or(file.velocity).unwrap_or(d.velocity),
            dt: cli.dt.or(file.dt).unwrap_or(d.dt),
            horizon: cli.horizon.or(file.horizon).unwrap_or(d.horizon),
            order: cli.order.or(file.order).unwrap_or(d.order),
            grid: cli.grid.or(file.grid),
            out: cli.out.or(file.out),
            omega_sign: cli.omega_sign.or(file.omega_sign).unwrap_or(d.omega_sign),
            profile_variant: cli.profile_variant.or(file.profile_variant).unwrap_or(d.profile_variant),
            boost_variant: cli.boost_variant.or(file.boost_variant).unwrap_or(d.boost_variant),
            tolerances: file.tolerances,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("mu", self.mu), ("box", self.side), ("dt", self.dt), ("horizon", self.horizon)] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("--{name} must be positive, got {v}");
            }
        }
        if !(0.0..1.0).contains(&self.velocity) {
            bail!("--velocity must lie in [0, 1), got {}", self.velocity);
        }
        if self.order < 8 {
            bail!("--order must be at least 8, got {}", self.order);
        }
        self.parsed_grid()?;
        for (name, tol) in &self.tolerances {
            if tol.is_nan() || *tol < 0.0 {
                bail!("tolerance for {name} must be non-negative, got {tol}");
            }
        }
        Ok(())
    }

    /// The `--grid` value, or a line along `z` at `t = 1`.
    pub fn parsed_grid(&self) -> Result<Grid> {
        let text = self.grid.as_deref().unwrap_or(DEFAULT_GRID);
        text.parse::<Grid>().map_err(|e| anyhow::anyhow!("--grid: {e}"))
    }

    /// The `--grid` points, or the standard region clear of the origin
    /// and the wavefront.
    pub fn residual_region(&self) -> Result<ResidualRegion> {
        Ok(match &self.grid {
            Some(_) => ResidualRegion::from_grid(&self.parsed_grid()?),
            None => ResidualRegion::standard(),
        })
    }

    pub fn require_out(&self) -> Result<&Path> {
        match &self.out {
            Some(p) => Ok(p),
            None => bail!("--out is required for this command"),
        }
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }
}
