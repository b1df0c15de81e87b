//! The scenario pipelines behind each subcommand.

use std::path::Path;

use serde::Serialize;

use scargrow_core::analysis::{
    classify_spreading, detect_bimodality, fit_growth, trailing_slope, FitResult, SpreadingClass,
};
use scargrow_core::observables::{
    covariance_matrix, delta_sz, effective_region, fcs as fcs_of, magnetization_profile,
    quantumness_iterative, EffectiveRegion, QuantumnessOptions,
};
use scargrow_core::pauli::{
    commutator_norm_symbolic, parity_z, semilocal_charge, sz_total, verify_scar, Axis,
    Boundary, HamiltonianSpec, PauliTerm,
};
use scargrow_core::spectral::{
    duality_spectrum_check, gap_ratios, spacing_stats_pooled, unfold, zero_magnetization_blocks,
};
use scargrow_core::state::{
    apply_y_rotation, basis_state, expectation_of, product_state_up, Evolver, StateVector,
};
use scargrow_core::Error as CoreError;

use crate::config::{dual_params, h_tau_params, ModelKind, ScenarioConfig};
use crate::emit;
use crate::{CliError, Result};

/// Incremental protocol evolution shared by the time-series commands.
///
/// Without a pre-quench only the flipped branch is evolved; the polarized
/// branch is an exact eigenstate and enters through the energy gauge. With
/// a pre-quench the full post-measurement states are evolved for both the
/// requested angle and pi/2.
enum Runner {
    Branch {
        h: HamiltonianSpec,
        evolver: Evolver,
        energy: f64,
        site: usize,
        theta: f64,
        raw: StateVector,
        reached: f64,
    },
    Full {
        h: HamiltonianSpec,
        evolver: Evolver,
        theta_state: StateVector,
        half_pi_state: StateVector,
        reached: f64,
    },
}

impl Runner {
    fn new(config: &ScenarioConfig) -> Result<Self> {
        let h = config.hamiltonian()?;
        let evolver = config.evolver();
        let site = config.measurement_site()?;
        match config.pre_quench()? {
            None => {
                let energy = verify_scar(&h)?;
                let raw = basis_state(config.length, 1usize << site)?;
                Ok(Runner::Branch { h, evolver, energy, site, theta: config.theta, raw, reached: 0.0 })
            }
            Some(pq) => {
                let before = evolver.evolve(&pq.h0, &product_state_up(config.length)?, pq.t0)?;
                let theta_state = apply_y_rotation(&before, site, config.theta)?;
                let half_pi_state =
                    apply_y_rotation(&before, site, std::f64::consts::FRAC_PI_2)?;
                Ok(Runner::Full { h, evolver, theta_state, half_pi_state, reached: 0.0 })
            }
        }
    }

    fn has_branch(&self) -> bool {
        matches!(self, Runner::Branch { .. })
    }

    fn site(&self) -> Option<usize> {
        match self {
            Runner::Branch { site, .. } => Some(*site),
            Runner::Full { .. } => None,
        }
    }

    fn hamiltonian(&self) -> &HamiltonianSpec {
        match self {
            Runner::Branch { h, .. } | Runner::Full { h, .. } => h,
        }
    }

    fn advance(&mut self, t: f64) -> Result<()> {
        match self {
            Runner::Branch { h, evolver, raw, reached, .. } => {
                *raw = evolver.evolve(h, raw, t - *reached)?;
                *reached = t;
            }
            Runner::Full { h, evolver, theta_state, half_pi_state, reached } => {
                *theta_state = evolver.evolve(h, theta_state, t - *reached)?;
                *half_pi_state = evolver.evolve(h, half_pi_state, t - *reached)?;
                *reached = t;
            }
        }
        Ok(())
    }

    /// The evolved single-flip branch, gauged so the polarized branch
    /// carries no phase. Equals the pi/2 post-measurement state.
    fn half_pi_state(&self) -> StateVector {
        match self {
            Runner::Branch { energy, raw, reached, .. } => {
                let gauge = num_complex::Complex64::new(0.0, energy * reached).exp();
                raw.clone().scaled(gauge)
            }
            Runner::Full { half_pi_state, .. } => half_pi_state.clone(),
        }
    }

    /// The post-measurement state at the configured angle.
    fn theta_state(&self) -> StateVector {
        match self {
            Runner::Branch { theta, raw, .. } => {
                let branch = self.half_pi_state();
                let (c, s) = (theta.cos(), theta.sin());
                let mut amps = branch.amplitudes().to_vec();
                for a in amps.iter_mut() {
                    *a *= s;
                }
                amps[0] += num_complex::Complex64::from(c);
                StateVector::from_amplitudes(raw.length(), amps, 0.0).expect("same dimension")
            }
            Runner::Full { theta_state, .. } => theta_state.clone(),
        }
    }
}

fn require_branch(runner: &Runner, what: &str) -> Result<()> {
    if runner.has_branch() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{what} is defined on the flipped branch; remove [pre_quench] from the config"
        )))
    }
}

#[derive(Serialize)]
struct ScarJson {
    model: String,
    length: usize,
    is_eigenstate: bool,
    eigenvalue: Option<f64>,
    residual: f64,
    commutator_semilocal_sz: f64,
    commutator_total_sz: f64,
    commutator_parity_z: f64,
}

pub fn scarcheck(config: &ScenarioConfig) -> Result<()> {
    let dir = emit::ensure_dir(&config.outputs)?;
    let h = config.hamiltonian()?;
    let l = config.length;
    let (_, charge) = semilocal_charge(l)?;
    let report = match verify_scar(&h) {
        Ok(e) => (true, Some(e), 0.0),
        Err(CoreError::ResidualTooLarge { residual }) => (false, None, residual),
        Err(other) => return Err(other.into()),
    };
    let json = ScarJson {
        model: h.label().to_string(),
        length: l,
        is_eigenstate: report.0,
        eigenvalue: report.1,
        residual: report.2,
        commutator_semilocal_sz: commutator_norm_symbolic(&h, &charge)?,
        commutator_total_sz: commutator_norm_symbolic(&h, &sz_total(l))?,
        commutator_parity_z: commutator_norm_symbolic(&h, &parity_z(l))?,
    };
    emit::write_json(&dir, "scar.json", &json)?;
    if !report.0 {
        return Err(CoreError::ResidualTooLarge { residual: report.2 }.into());
    }
    Ok(())
}

pub fn evolve(config: &ScenarioConfig) -> Result<()> {
    let dir = emit::ensure_dir(&config.outputs)?;
    let times = config.times()?;
    let mut runner = Runner::new(config)?;
    let h = runner.hamiltonian().clone();

    let mut summary: Vec<String> = Vec::new();
    let mut ds_rows: Vec<(f64, f64)> = Vec::new();
    let mut last = None;
    for &t in &times {
        runner.advance(t)?;
        let state = runner.theta_state();
        let energy = expectation_of(&h, &state)?;
        let ds = delta_sz(&state);
        summary.push(format!("{t},{},{energy},{ds}", state.norm()));
        ds_rows.push((t, ds));
        last = Some(state);
    }
    emit::write_csv(&dir, "summary.csv", "t,norm,energy,delta_sz", summary)?;
    emit::delta_sz_csv(&dir, &ds_rows)?;
    let final_state = last.expect("at least one time");
    emit::profile_csv(&dir, "profile.csv", &magnetization_profile(&final_state, config.theta))?;
    Ok(())
}

pub fn omega(config: &ScenarioConfig) -> Result<()> {
    let dir = emit::ensure_dir(&config.outputs)?;
    let times = config.times()?;
    let mut runner = Runner::new(config)?;
    require_branch(&runner, "the effective region")?;
    let site = runner.site().expect("branch runner");

    let mut rows = Vec::new();
    for &t in &times {
        runner.advance(t)?;
        let region = effective_region(&runner.half_pi_state(), site, config.epsilon)?;
        rows.push((t, region.left, region.right, region.size(), region.outside_weight));
    }
    emit::omega_csv(&dir, &rows)?;
    Ok(())
}

pub fn fcs(config: &ScenarioConfig) -> Result<()> {
    let dir = emit::ensure_dir(&config.outputs)?;
    let times = config.times()?;
    let mut runner = Runner::new(config)?;
    for &t in &times {
        runner.advance(t)?;
        let f = fcs_of(&runner.theta_state(), config.theta);
        emit::fcs_csv(&dir, t, &f)?;
    }
    Ok(())
}

fn neff_fit(sizes: &[f64], values: &[f64]) -> Result<FitResult> {
    fit_growth(sizes, values).map_err(|e| match e {
        CoreError::TooFewPoints { .. } => CliError::Config(
            "the quantumness fit needs at least 4 distinct region sizes; extend the time grid"
                .into(),
        ),
        other => other.into(),
    })
}

pub fn quantumness(config: &ScenarioConfig) -> Result<()> {
    let dir = emit::ensure_dir(&config.outputs)?;
    let times = config.times()?;
    let mut runner = Runner::new(config)?;
    require_branch(&runner, "the quantumness pipeline")?;
    let site = runner.site().expect("branch runner");
    let options = QuantumnessOptions { seed: config.seed, ..QuantumnessOptions::default() };

    let mut rows: Vec<(f64, usize, f64, bool)> = Vec::new();
    let mut last_trace = None;
    for &t in &times {
        runner.advance(t)?;
        let branch = runner.half_pi_state();
        let region = effective_region(&branch, site, config.epsilon)?;
        let state = runner.theta_state();
        let k = covariance_matrix(&state, &region)?;
        let q = quantumness_iterative(&k, &options)?;
        rows.push((t, region.size(), q.value, q.converged));
        last_trace = Some(q);
    }
    emit::neff_csv(&dir, "neff.csv", &rows)?;
    if let Some(q) = &last_trace {
        emit::qtrace_csv(&dir, q)?;
    }
    let sizes: Vec<f64> = rows.iter().map(|r| r.1 as f64).collect();
    let values: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let fit = neff_fit(&sizes, &values)?;
    emit::fit_json(&dir, "fit.json", &fit)?;
    Ok(())
}

#[derive(Serialize)]
struct BlockJson {
    k: usize,
    parity_x: i8,
    dimension: usize,
}

#[derive(Serialize)]
struct StatsJson {
    r_mean: f64,
    r_count: usize,
    ks_poisson: f64,
    ks_wigner: f64,
    mean_spacing: f64,
    merged_degeneracies: usize,
    levels_total: usize,
    low_statistics: bool,
    blocks: Vec<BlockJson>,
}

pub fn spectrum(config: &ScenarioConfig) -> Result<()> {
    if config.model != ModelKind::HTau {
        return Err(CliError::Config(
            "spectrum runs on the dual chain; set model = \"h_tau\"".into(),
        ));
    }
    if config.length % 2 != 0 {
        return Err(CliError::Config("spectrum needs an even L".into()));
    }
    let dir = emit::ensure_dir(&config.outputs)?;
    let params = h_tau_params(&config.params)?;
    let h = scargrow_core::pauli::build_h_tau(&params, config.length, Boundary::Periodic)?;
    let settings = config.spectrum.clone().unwrap_or_default();

    let blocks = zero_magnetization_blocks(&h, config.length)?;
    let mut pooled_spacings: Vec<f64> = Vec::new();
    let mut pooled_ratios: Vec<f64> = Vec::new();
    let mut merged = 0usize;
    let mut block_rows = Vec::new();
    let mut levels_total = 0usize;
    for block in &blocks {
        let spec = &block.spec;
        block_rows.push(BlockJson {
            k: spec.momentum.unwrap_or(0),
            parity_x: spec.parity_x.unwrap_or(0),
            dimension: block.dimension,
        });
        levels_total += block.dimension;
        if block.dimension >= settings.degree + 3 {
            let u = unfold(&block.eigenvalues, settings.degree, settings.trim)?;
            pooled_spacings.extend(u.spacings);
        }
        let (ratios, m) = gap_ratios(&block.eigenvalues);
        pooled_ratios.extend(ratios);
        merged += m;
    }
    if pooled_ratios.is_empty() {
        return Err(CliError::Config("no sector has enough levels for statistics".into()));
    }
    let stats = spacing_stats_pooled(&pooled_spacings, &pooled_ratios, merged);
    emit::levels_csv(&dir, &blocks)?;
    emit::spacing_cdf_csv(&dir, &stats)?;
    emit::write_json(
        &dir,
        "stats.json",
        &StatsJson {
            r_mean: stats.mean_gap_ratio,
            r_count: stats.gap_ratio_count,
            ks_poisson: stats.ks_poisson,
            ks_wigner: stats.ks_wigner,
            mean_spacing: stats.mean_spacing,
            merged_degeneracies: stats.merged_degeneracies,
            levels_total,
            low_statistics: pooled_spacings.len() < 200,
            blocks: block_rows,
        },
    )?;
    Ok(())
}

pub fn dualcheck(config: &ScenarioConfig) -> Result<()> {
    let dir = emit::ensure_dir(&config.outputs)?;
    let params = dual_params(config.model, &config.params)?;
    let report = duality_spectrum_check(&params, config.length)?;
    emit::write_json(&dir, "dual.json", &report)?;
    if !report.matches {
        return Err(CoreError::Invalid(format!(
            "dual sector spectra disagree (dims {} vs {}, deviation {:?})",
            report.dimension_direct, report.dimension_dual, report.max_deviation
        ))
        .into());
    }
    Ok(())
}

#[derive(Serialize)]
struct U1Json {
    max_ratio_expectation: f64,
    max_ratio_variance: f64,
}

fn u1_density(observable: &str) -> Result<Vec<PauliTerm>> {
    let density = match observable {
        "sz" => vec![PauliTerm::new(1.0, &[(0, Axis::Z)]).expect("valid")],
        "xx" => vec![PauliTerm::new(1.0, &[(0, Axis::X), (1, Axis::X)]).expect("valid")],
        "hopping" => vec![
            PauliTerm::new(1.0, &[(0, Axis::X), (1, Axis::X)]).expect("valid"),
            PauliTerm::new(1.0, &[(0, Axis::Y), (1, Axis::Y)]).expect("valid"),
        ],
        other => {
            return Err(CliError::Config(format!(
                "u1.observable: expected sz, xx or hopping, got {other:?}"
            )))
        }
    };
    Ok(density)
}

pub fn u1check(config: &ScenarioConfig) -> Result<()> {
    let dir = emit::ensure_dir(&config.outputs)?;
    let times = config.times()?;
    let settings = config.u1.clone().unwrap_or_default();
    let h = config.hamiltonian()?;
    if commutator_norm_symbolic(&h, &sz_total(config.length))? > 1e-10 {
        return Err(CliError::Config(
            "u1check needs a magnetization-conserving model (only Jr, gammar_z, Dr_z, hz)".into(),
        ));
    }
    if settings.s == 0 || settings.s >= config.length {
        return Err(CliError::Config(format!("u1.s = {} outside [1, L)", settings.s)));
    }
    let site = config.measurement_site()?;
    let start = site.saturating_sub(settings.s / 2).min(config.length - settings.s);
    let flips: Vec<usize> = (start..start + settings.s).collect();
    let density = u1_density(&settings.observable)?;
    let report = scargrow_core::analysis::u1_macroscopic_check(
        &h,
        &flips,
        &density,
        &times,
        config.epsilon,
    )?;
    emit::write_json(
        &dir,
        "u1.json",
        &U1Json {
            max_ratio_expectation: report.max_ratio_expectation,
            max_ratio_variance: report.max_ratio_variance,
        },
    )?;
    if report.max_ratio_expectation > 1.0 + 1e-9 || report.max_ratio_variance > 1.0 + 1e-9 {
        return Err(CoreError::Invalid("a U(1) bound is violated".into()).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct VerdictJson {
    macroscopically_different: bool,
    cat_state: bool,
    spreading: SpreadingClass,
}

pub fn catreport(config: &ScenarioConfig) -> Result<()> {
    let dir = emit::ensure_dir(&config.outputs)?;
    let times = config.times()?;
    let mut runner = Runner::new(config)?;
    let has_branch = runner.has_branch();
    let options = QuantumnessOptions { seed: config.seed, ..QuantumnessOptions::default() };

    let mut ds_rows: Vec<(f64, f64)> = Vec::new();
    let mut omega_rows: Vec<(f64, usize, usize, usize, f64)> = Vec::new();
    let mut neff_theta: Vec<(f64, usize, f64, bool)> = Vec::new();
    let mut neff_half: Vec<(f64, usize, f64, bool)> = Vec::new();
    let mut regions: Vec<EffectiveRegion> = Vec::new();
    let mut last_fcs = None;
    let mut last_state = None;

    for &t in &times {
        runner.advance(t)?;
        let half = runner.half_pi_state();
        let state = runner.theta_state();
        ds_rows.push((t, delta_sz(&half)));
        let f = fcs_of(&state, config.theta);
        emit::fcs_csv(&dir, t, &f)?;
        last_fcs = Some(f);

        if has_branch {
            let site = runner.site().expect("branch runner");
            let region = effective_region(&half, site, config.epsilon)?;
            omega_rows.push((t, region.left, region.right, region.size(), region.outside_weight));
            let k_theta = covariance_matrix(&state, &region)?;
            let q_theta = quantumness_iterative(&k_theta, &options)?;
            neff_theta.push((t, region.size(), q_theta.value, q_theta.converged));
            let k_half = covariance_matrix(&half, &region)?;
            let q_half = quantumness_iterative(&k_half, &options)?;
            neff_half.push((t, region.size(), q_half.value, q_half.converged));
            regions.push(region);
        }
        last_state = Some(state);
    }

    emit::delta_sz_csv(&dir, &ds_rows)?;
    emit::profile_csv(
        &dir,
        "profile.csv",
        &magnetization_profile(&last_state.expect("at least one time"), config.theta),
    )?;

    let bimodal = detect_bimodality(last_fcs.as_ref().expect("at least one time"), config.valley_threshold);
    emit::write_json(&dir, "bimodality.json", &bimodal)?;

    let ds: Vec<f64> = ds_rows.iter().map(|r| r.1).collect();
    let (_, (slope_low, _)) = trailing_slope(&times, &ds)?;
    let macroscopically_different = slope_low > 0.0;

    let (spreading, beta1_zero) = if has_branch {
        emit::omega_csv(&dir, &omega_rows)?;
        emit::neff_csv(&dir, "neff.csv", &neff_theta)?;
        emit::neff_csv(&dir, "neff_half_pi.csv", &neff_half)?;
        let sizes: Vec<f64> = omega_rows.iter().map(|r| r.3 as f64).collect();
        let fit_theta = neff_fit(&sizes, &neff_theta.iter().map(|r| r.2).collect::<Vec<_>>())?;
        let fit_half = neff_fit(&sizes, &neff_half.iter().map(|r| r.2).collect::<Vec<_>>())?;
        emit::fit_json(&dir, "fit.json", &fit_theta)?;
        emit::fit_json(&dir, "fit_half_pi.json", &fit_half)?;
        let spreading = classify_spreading(&times, &regions)?.classification;
        (spreading, Some(fit_half.beta1_consistent_with_zero()))
    } else {
        // a pre-quench disturbs the whole chain: the flipped-branch region
        // is undefined and the quantumness pipeline is skipped
        (SpreadingClass::Undetermined, None)
    };

    let cat_state = bimodal.separated && beta1_zero.unwrap_or(true);
    emit::write_json(
        &dir,
        "verdict.json",
        &VerdictJson { macroscopically_different, cat_state, spreading },
    )?;
    Ok(())
}

/// Golden-file serialization of a built model (used by tests and handy for
/// debugging configs).
pub fn dump_hamiltonian(config: &ScenarioConfig, dir: &Path) -> Result<()> {
    let h = config.hamiltonian()?;
    let text = emit::hamiltonian_toml(&h)?;
    std::fs::write(dir.join("hamiltonian.toml"), text)?;
    Ok(())
}
