//! Scenario configuration: flat key = value TOML with one section per
//! component. Unknown keys are rejected everywhere, and model parameters
//! are validated against the builder preconditions before any compute.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use scargrow_core::pauli::{
    build_h0, build_h1, build_h2, build_h_tau, Boundary, H0Params, H0Variant, H1Params, H2Params,
    HamiltonianSpec, HTauParams,
};
use scargrow_core::state::{center_site, Evolver, KrylovOptions};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    H1,
    H2,
    Ising,
    TiltedIsing,
    HTau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    #[default]
    Open,
    Periodic,
}

impl From<BoundaryKind> for Boundary {
    fn from(b: BoundaryKind) -> Boundary {
        match b {
            BoundaryKind::Open => Boundary::Open,
            BoundaryKind::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EvolverKind {
    #[default]
    Krylov,
    Trotter,
}

/// Measurement site: an index or the chain center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SiteChoice {
    Index(usize),
    Named(String),
}

impl Default for SiteChoice {
    fn default() -> Self {
        SiteChoice::Named("center".into())
    }
}

/// Evaluation times: an explicit list or a uniform grid up to `t_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimesSpec {
    Grid { t_max: f64, steps: usize },
    List { list: Vec<f64> },
}

impl TimesSpec {
    pub fn materialize(&self) -> Result<Vec<f64>> {
        let times = match self {
            TimesSpec::List { list } => list.clone(),
            TimesSpec::Grid { t_max, steps } => {
                if *steps == 0 || !(*t_max > 0.0) {
                    return Err(CliError::Config("times: t_max > 0 and steps > 0 required".into()));
                }
                (1..=*steps).map(|i| t_max * i as f64 / *steps as f64).collect()
            }
        };
        if times.is_empty() {
            return Err(CliError::Config("times: empty list".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) || times[0] < 0.0 {
            return Err(CliError::Config("times: must be non-negative and increasing".into()));
        }
        Ok(times)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(f64),
    // integers in TOML (J = 1) arrive as i64
    Int(i64),
    List(Vec<f64>),
}

pub type ParamMap = BTreeMap<String, ParamValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreQuenchConfig {
    pub model: ModelKind,
    pub t0: f64,
    pub params: ParamMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default = "default_trim")]
    pub trim: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { degree: default_degree(), trim: default_trim() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct U1Config {
    /// Number of adjacent spins flipped around the measurement site.
    #[serde(default = "default_flips")]
    pub s: usize,
    /// Observable density: "sz", "xx" or "hopping" (xx + yy).
    #[serde(default = "default_observable")]
    pub observable: String,
}

impl Default for U1Config {
    fn default() -> Self {
        Self { s: default_flips(), observable: default_observable() }
    }
}

fn default_degree() -> usize {
    7
}
fn default_trim() -> f64 {
    0.05
}
fn default_flips() -> usize {
    1
}
fn default_observable() -> String {
    "sz".into()
}
fn default_theta() -> f64 {
    std::f64::consts::FRAC_PI_2
}
fn default_epsilon() -> f64 {
    1e-3
}
fn default_dt() -> f64 {
    0.01
}
fn default_valley() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelKind,
    #[serde(rename = "L")]
    pub length: usize,
    #[serde(default)]
    pub boundary: BoundaryKind,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub site: SiteChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<TimesSpec>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub evolver: EvolverKind,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Valley threshold of the bimodality detector.
    #[serde(default = "default_valley")]
    pub valley_threshold: f64,
    pub outputs: String,
    #[serde(default)]
    pub seed: u64,
    pub params: ParamMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_quench: Option<PreQuenchConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1: Option<U1Config>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ScenarioConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Builder preconditions are enforced here, before any compute.
    pub fn validate(&self) -> Result<()> {
        if self.length == 0 || self.length > scargrow_core::state::LENGTH_CAP {
            return Err(CliError::Config(format!(
                "L = {} outside [1, {}]",
                self.length,
                scargrow_core::state::LENGTH_CAP
            )));
        }
        if !self.theta.is_finite() {
            return Err(CliError::Config("theta must be finite".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(CliError::Config(format!("epsilon = {} outside (0, 1)", self.epsilon)));
        }
        if !(self.dt > 0.0) {
            return Err(CliError::Config(format!("dt = {} must be positive", self.dt)));
        }
        self.hamiltonian()?;
        if let Some(pq) = &self.pre_quench {
            build_model(pq.model, &pq.params, self.length, self.boundary.into())?;
            if !(pq.t0 >= 0.0) {
                return Err(CliError::Config("pre_quench.t0 must be non-negative".into()));
            }
        }
        if let Some(times) = &self.times {
            times.materialize()?;
        }
        self.measurement_site()?;
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianSpec> {
        build_model(self.model, &self.params, self.length, self.boundary.into())
    }

    pub fn measurement_site(&self) -> Result<usize> {
        match &self.site {
            SiteChoice::Index(i) => {
                if *i >= self.length {
                    Err(CliError::Config(format!("site {} outside the chain", i)))
                } else {
                    Ok(*i)
                }
            }
            SiteChoice::Named(name) if name == "center" => Ok(center_site(self.length)),
            SiteChoice::Named(other) => {
                Err(CliError::Config(format!("site: expected an index or \"center\", got {other:?}")))
            }
        }
    }

    pub fn evolver(&self) -> Evolver {
        match self.evolver {
            EvolverKind::Krylov => Evolver::Krylov(KrylovOptions::default()),
            EvolverKind::Trotter => Evolver::Trotter { dt: self.dt },
        }
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        match &self.times {
            Some(t) => t.materialize(),
            None => Err(CliError::Config("this command needs a [times] section".into())),
        }
    }

    pub fn pre_quench(&self) -> Result<Option<scargrow_core::state::PreQuench>> {
        match &self.pre_quench {
            None => Ok(None),
            Some(pq) => {
                let h0 = build_model(pq.model, &pq.params, self.length, self.boundary.into())?;
                Ok(Some(scargrow_core::state::PreQuench { h0, t0: pq.t0 }))
            }
        }
    }
}

struct Params<'a> {
    model: &'static str,
    map: &'a ParamMap,
    used: std::cell::RefCell<Vec<String>>,
}

impl<'a> Params<'a> {
    fn new(model: &'static str, map: &'a ParamMap) -> Self {
        Self { model, map, used: std::cell::RefCell::new(Vec::new()) }
    }

    fn scalar(&self, key: &str) -> Result<f64> {
        self.used.borrow_mut().push(key.to_string());
        match self.map.get(key) {
            None => Ok(0.0),
            Some(ParamValue::Scalar(v)) => Ok(*v),
            Some(ParamValue::Int(v)) => Ok(*v as f64),
            Some(ParamValue::List(_)) => {
                Err(CliError::Config(format!("params.{key}: expected a scalar")))
            }
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        self.used.borrow_mut().push(key.to_string());
        match self.map.get(key) {
            None => Ok(Vec::new()),
            Some(ParamValue::List(v)) => Ok(v.clone()),
            Some(ParamValue::Scalar(v)) => Ok(vec![*v]),
            Some(ParamValue::Int(v)) => Ok(vec![*v as f64]),
        }
    }

    fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        for key in self.map.keys() {
            if !used.iter().any(|u| u == key) {
                return Err(CliError::Config(format!(
                    "params.{key}: unknown key for model {}",
                    self.model
                )));
            }
        }
        Ok(())
    }
}

pub fn build_model(
    model: ModelKind,
    params: &ParamMap,
    length: usize,
    boundary: Boundary,
) -> Result<HamiltonianSpec> {
    let spec = match model {
        ModelKind::H1 => {
            let p = Params::new("h1", params);
            let built = H1Params {
                j: p.scalar("J")?,
                gamma: p.scalar("gamma")?,
                w: p.scalar("w")?,
                delta: p.scalar("Delta")?,
                dz: p.scalar("Dz")?,
                hz: p.scalar("hz")?,
            };
            p.finish()?;
            build_h1(&built, length, boundary)?
        }
        ModelKind::H2 => {
            let p = Params::new("h2", params);
            let built = H2Params {
                j: p.list("Jr")?,
                gamma_x: p.list("gammar_x")?,
                gamma_y: p.list("gammar_y")?,
                gamma_z: p.list("gammar_z")?,
                d_x: p.list("Dr_x")?,
                d_y: p.list("Dr_y")?,
                d_z: p.list("Dr_z")?,
                hz: p.scalar("hz")?,
            };
            p.finish()?;
            build_h2(&built, length, boundary)?
        }
        ModelKind::Ising | ModelKind::TiltedIsing => {
            let p = Params::new("ising", params);
            let variant = match model {
                ModelKind::Ising => H0Variant::Ising,
                _ => H0Variant::TiltedIsing,
            };
            let built = H0Params {
                h0z: p.scalar("h0z")?,
                h0x: if variant == H0Variant::TiltedIsing { p.scalar("h0x")? } else { 0.0 },
            };
            p.finish()?;
            build_h0(variant, &built, length, boundary)?
        }
        ModelKind::HTau => {
            let p = Params::new("h_tau", params);
            let built = HTauParams {
                j: p.scalar("J")?,
                gamma: p.scalar("gamma")?,
                w: p.scalar("w")?,
                dz: p.scalar("Dz")?,
                hz: p.scalar("hz")?,
            };
            p.finish()?;
            build_h_tau(&built, length, boundary)?
        }
    };
    Ok(spec)
}

/// Couplings for the duality check: either tau-chain keys directly, or the
/// transistor-chain keys (whose `Delta` must vanish, as the dual mapping is
/// stated without it).
pub fn dual_params(model: ModelKind, params: &ParamMap) -> Result<HTauParams> {
    match model {
        ModelKind::HTau => h_tau_params(params),
        ModelKind::H1 => {
            let p = Params::new("h1", params);
            let built = HTauParams {
                j: p.scalar("J")?,
                gamma: p.scalar("gamma")?,
                w: p.scalar("w")?,
                dz: p.scalar("Dz")?,
                hz: p.scalar("hz")?,
            };
            let delta = p.scalar("Delta")?;
            p.finish()?;
            if delta != 0.0 {
                return Err(CliError::Config(
                    "dualcheck: the dual mapping requires Delta = 0".into(),
                ));
            }
            Ok(built)
        }
        _ => Err(CliError::Config("dualcheck needs model = \"h1\" or \"h_tau\"".into())),
    }
}

/// The tau-chain couplings shared by the spectrum and duality commands.
pub fn h_tau_params(params: &ParamMap) -> Result<HTauParams> {
    let p = Params::new("h_tau", params);
    let built = HTauParams {
        j: p.scalar("J")?,
        gamma: p.scalar("gamma")?,
        w: p.scalar("w")?,
        dz: p.scalar("Dz")?,
        hz: p.scalar("hz")?,
    };
    p.finish()?;
    Ok(built)
}
