use std::time::Instant;

use edtherm_core::dynamics::{product_thermal_initial, SiteState};
use edtherm_core::ensembles::{canonical_weights, solve_beta, BetaSolverOptions};
use edtherm_core::reduction::{hs_distance_sq, GlobalState, ReducedState};
use edtherm_core::{DensityMatrix, Mat};
use serde::Serialize;

use super::{entropy, expect_kind, finish, pairwise_distances, Model, PairDistance};
use crate::config::{LoadedScenario, ScenarioKind};
use crate::error::{AppError, AppResult};
use crate::output::OutputDir;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnapshotRow {
    pub t: f64,
    pub energy: f64,
    pub trace: f64,
    pub entropy: f64,
    pub purity: f64,
    pub d_thermal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedSummary {
    pub lattice: String,
    pub dim: usize,
    pub n_system: usize,
    pub n_bath: usize,
    pub beta_system: f64,
    pub beta_bath: f64,
    pub components: usize,
    pub snapshots: Vec<SnapshotRow>,
    /// Largest `‖ρ_S(t) − ρ_S(t')‖²` among the early snapshots.
    pub early_max_change: f64,
    /// Same among the late snapshots.
    pub late_max_change: f64,
    pub change_ratio: f64,
    pub initial_energy: f64,
    pub max_energy_drift: f64,
    pub relative_energy_drift: f64,
    /// Inverse temperature whose canonical energy matches the state.
    pub beta_average: f64,
    /// Late-snapshot mean compared with the thermal, canonical and diagonal
    /// ensembles at `beta_average`.
    pub late_mean_distances: Vec<PairDistance>,
}

fn max_pairwise(states: &[&ReducedState]) -> AppResult<f64> {
    let mut worst = 0.0f64;
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            worst = worst.max(hs_distance_sq(&a.density, &b.density)?);
        }
    }
    Ok(worst)
}

fn mean_state(states: &[&ReducedState]) -> AppResult<DensityMatrix> {
    let dim = states[0].density.dim();
    let scale = 1.0 / states.len() as f64;
    let m = Mat::from_fn(dim, dim, |i, j| states.iter().map(|s| s.density.get(i, j)).sum::<edtherm_core::Complex64>() * scale);
    Ok(DensityMatrix::new(m, states[0].density.basis())?)
}

/// Quench from a product of thermal states at different temperatures.
pub fn run_mixed_temperature(scenario: &LoadedScenario, out: &OutputDir) -> AppResult<MixedSummary> {
    let started = Instant::now();
    let config = &scenario.config;
    expect_kind(config, ScenarioKind::MixedTemperature)?;
    let [n_system, n_bath] = config
        .mixed_split
        .ok_or_else(|| AppError::Config("mixed_temperature needs mixed_split".into()))?;
    let model = Model::load(&config.lattice, scenario)?;
    let eig = model.diagonalize(config.dense_guard)?;
    let state = product_thermal_initial(
        &model.lattice,
        &model.bipartition,
        &model.sector,
        &eig,
        n_system,
        n_bath,
        config.beta_system,
        config.beta_bath,
    )?;
    let initial_energy = state.energy();
    let beta_average = solve_beta(eig.values(), initial_energy, BetaSolverOptions::default())?;
    let thermal = model.thermal_state(beta_average, config.chemical_potential)?;

    let mut times: Vec<f64> = config.early_times.iter().chain(&config.late_times).copied().collect();
    times.sort_by(f64::total_cmp);
    times.dedup();

    let snaps_dir = out.subdir("snapshots")?;
    let mut snapshots = Vec::new();
    let mut reduced_at = Vec::new();
    for &t in &times {
        let site = state.site_state(t);
        let SiteState::Mixed { weights, components } = &site else {
            unreachable!("a thermal product is a mixture")
        };
        let mut energy = 0.0;
        let mut trace = 0.0;
        for (k, &w) in weights.iter().enumerate() {
            let column: Vec<_> = components.col(k).iter().copied().collect();
            energy += w * model.hamiltonian.expectation(&column);
            trace += w * column.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        let reduced = model.trace.reduce(site.as_global())?;
        snapshots.push(SnapshotRow {
            t,
            energy,
            trace,
            entropy: entropy(&reduced)?,
            purity: reduced.density.purity(),
            d_thermal: hs_distance_sq(&reduced.density, &thermal)?,
        });
        snaps_dir.matrix(&format!("rho_t{t}"), reduced.density.matrix())?;
        reduced_at.push((t, reduced));
    }
    let pick = |set: &[f64]| -> Vec<&ReducedState> {
        reduced_at.iter().filter(|(t, _)| set.contains(t)).map(|(_, r)| r).collect()
    };
    let early = pick(&config.early_times);
    let late = pick(&config.late_times);
    let early_max_change = max_pairwise(&early)?;
    let late_max_change = max_pairwise(&late)?;

    let late_mean = mean_state(&late)?;
    let values = eig.values();
    let canonical = model.trace.reduce(GlobalState::RealMixture {
        weights: &canonical_weights(values, beta_average),
        components: eig.vectors(),
    })?;
    let diagonal = model.trace.reduce(GlobalState::RealMixture {
        weights: &state.populations(),
        components: eig.vectors(),
    })?;
    let late_mean_distances: Vec<PairDistance> = pairwise_distances(&[
        ("late_mean", &late_mean),
        ("thermal", &thermal),
        ("canonical", &canonical.density),
        ("gibbs", &diagonal.density),
    ])?
    .into_iter()
    .filter(|p| p.a == "late_mean")
    .collect();

    let max_energy_drift = snapshots.iter().map(|s| (s.energy - initial_energy).abs()).fold(0.0, f64::max);
    out.csv("snapshots.csv", &snapshots)?;
    out.csv("late_mean_distances.csv", &late_mean_distances)?;
    out.matrix("rho_late_mean", late_mean.matrix())?;
    out.matrix("rho_thermal", thermal.matrix())?;

    let summary = MixedSummary {
        lattice: model.name.clone(),
        dim: eig.dim(),
        n_system,
        n_bath,
        beta_system: config.beta_system,
        beta_bath: config.beta_bath,
        components: match state.kind() {
            edtherm_core::dynamics::StateKind::Mixed { weights, .. } => weights.len(),
            edtherm_core::dynamics::StateKind::Pure(_) => 1,
        },
        snapshots,
        early_max_change,
        late_max_change,
        change_ratio: late_max_change / early_max_change,
        initial_energy,
        max_energy_drift,
        relative_energy_drift: max_energy_drift / initial_energy.abs().max(f64::MIN_POSITIVE),
        beta_average,
        late_mean_distances,
    };
    finish(out, config, &summary, started)?;
    Ok(summary)
}
