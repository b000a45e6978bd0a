//! File writers: profile CSV with a JSON sidecar, residual reports, and
//! trajectory CSV.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dynamics::ModeTrajectory;
use crate::error::Result;
use crate::synth::FieldProfile;

/// `profile.csv` → `profile.json`
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_profile(profile: &FieldProfile, csv_path: &Path) -> Result<PathBuf> {
    profile.write_csv(BufWriter::new(File::create(csv_path)?))?;
    let sidecar = sidecar_path(csv_path);
    write_json(&profile.metadata(), &sidecar)?;
    Ok(sidecar)
}

pub fn write_trajectory(traj: &ModeTrajectory, csv_path: &Path) -> Result<()> {
    traj.write_csv(BufWriter::new(File::create(csv_path)?))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
