//! Output writers. Column names and JSON keys are fixed here:
//!
//! - `profile.csv`: `site,sz`
//! - `delta_sz.csv`: `t,delta_sz`
//! - `omega.csv`: `t,left,right,size,w_out`
//! - `fcs_<t>.csv`: `m,P`
//! - `neff.csv`: `t,omega_size,neff,converged`
//! - `qtrace.csv`: `iter,value`
//! - `levels.csv`: `index,E`
//! - `spacing_cdf.csv`: `s,cdf`
//! - `fit.json`: `{b0, b1, b2, resid}`
//! - `u1.json`: `{max_ratio_expectation, max_ratio_variance}`
//!
//! CSV uses a header row and '.' decimals; floats print in the shortest
//! round-trip form, so outputs are byte-stable for identical inputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use scargrow_core::analysis::FitResult;
use scargrow_core::observables::{FcsDistribution, MagnetizationProfile, QuantumnessResult};
use scargrow_core::pauli::HamiltonianSpec;
use scargrow_core::spectral::{SectorSpectrum, SpacingStats};

use crate::Result;

pub fn ensure_dir(dir: &str) -> Result<PathBuf> {
    let path = PathBuf::from(dir);
    fs::create_dir_all(&path)?;
    Ok(path)
}

/// Short deterministic tag for a time value, used in per-time file names.
pub fn time_tag(t: f64) -> String {
    let rounded = (t * 1e6).round() / 1e6;
    format!("{rounded}")
}

fn write(path: &Path, content: String) -> Result<()> {
    fs::write(path, content)?;
    Ok(())
}

pub fn write_csv<I>(dir: &Path, name: &str, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = String>,
{
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    write(&dir.join(name), out)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(&dir.join(name), text)
}

pub fn profile_csv(dir: &Path, name: &str, profile: &MagnetizationProfile) -> Result<()> {
    write_csv(
        dir,
        name,
        "site,sz",
        profile.values.iter().enumerate().map(|(site, sz)| format!("{site},{sz}")),
    )
}

pub fn delta_sz_csv(dir: &Path, rows: &[(f64, f64)]) -> Result<()> {
    write_csv(dir, "delta_sz.csv", "t,delta_sz", rows.iter().map(|(t, d)| format!("{t},{d}")))
}

pub fn omega_csv(dir: &Path, rows: &[(f64, usize, usize, usize, f64)]) -> Result<()> {
    write_csv(
        dir,
        "omega.csv",
        "t,left,right,size,w_out",
        rows.iter().map(|(t, l, r, s, w)| format!("{t},{l},{r},{s},{w}")),
    )
}

pub fn fcs_csv(dir: &Path, t: f64, fcs: &FcsDistribution) -> Result<()> {
    let name = format!("fcs_{}.csv", time_tag(t));
    write_csv(dir, &name, "m,P", fcs.ms.iter().zip(&fcs.p).map(|(m, p)| format!("{m},{p}")))
}

pub fn neff_csv(dir: &Path, name: &str, rows: &[(f64, usize, f64, bool)]) -> Result<()> {
    write_csv(
        dir,
        name,
        "t,omega_size,neff,converged",
        rows.iter().map(|(t, s, n, c)| format!("{t},{s},{n},{c}")),
    )
}

pub fn qtrace_csv(dir: &Path, result: &QuantumnessResult) -> Result<()> {
    write_csv(
        dir,
        "qtrace.csv",
        "iter,value",
        result.trace.iter().enumerate().map(|(i, v)| format!("{i},{v}")),
    )
}

#[derive(Serialize)]
struct FitJson {
    b0: f64,
    b1: f64,
    b2: f64,
    resid: f64,
}

pub fn fit_json(dir: &Path, name: &str, fit: &FitResult) -> Result<()> {
    write_json(
        dir,
        name,
        &FitJson { b0: fit.beta0, b1: fit.beta1, b2: fit.beta2, resid: fit.residual_norm },
    )
}

pub fn levels_csv(dir: &Path, blocks: &[SectorSpectrum]) -> Result<()> {
    let mut all: Vec<f64> = blocks.iter().flat_map(|b| b.eigenvalues.iter().copied()).collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    write_csv(
        dir,
        "levels.csv",
        "index,E",
        all.iter().enumerate().map(|(i, e)| format!("{i},{e}")),
    )
}

pub fn spacing_cdf_csv(dir: &Path, stats: &SpacingStats) -> Result<()> {
    write_csv(
        dir,
        "spacing_cdf.csv",
        "s,cdf",
        stats.cdf.iter().map(|(s, f)| format!("{s},{f}")),
    )
}

/// Structured-text form of a Hamiltonian, for golden-file comparisons:
/// `length`, `boundary`, `label`, then one `[[terms]]` table per string
/// with `coefficient` and `factors = [{site, axis}]`.
pub fn hamiltonian_toml(spec: &HamiltonianSpec) -> Result<String> {
    toml::to_string(spec).map_err(|e| crate::CliError::Config(e.to_string()))
}
