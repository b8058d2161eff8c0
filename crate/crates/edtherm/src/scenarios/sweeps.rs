use std::time::Instant;

use edtherm_core::dynamics::product_pure_initial;
use edtherm_core::reduction::hs_distance_sq;
use serde::Serialize;

use super::quench::analyze_quench;
use super::{expect_kind, finish, Model, QuenchAnalysis};
use crate::config::{LoadedScenario, ScenarioKind};
use crate::error::{AppError, AppResult};
use crate::output::OutputDir;

fn gibbs_micro_distance(analysis: &QuenchAnalysis) -> f64 {
    analysis
        .summary
        .ensemble_distances
        .iter()
        .find(|p| p.a == "gibbs" && p.b == "micro")
        .map_or(f64::NAN, |p| p.hilbert_schmidt_sq)
}

/// One initial particle split and what its quench produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitRow {
    pub n_system: usize,
    pub n_bath: usize,
    pub system_energy: f64,
    pub bath_energy: f64,
    pub energy_sum: f64,
    pub total_energy: f64,
    pub coupling_energy: f64,
    /// `|E − (E_S + E_B)| / |E|`, small when the coupling is weak.
    pub relative_mismatch: f64,
    pub degenerate: bool,
    pub beta: f64,
    pub micro_levels: usize,
    pub gibbs_micro: f64,
    pub d_gibbs_late_mean: f64,
    pub d_thermal_late_mean: f64,
}

/// Microcanonical comparison between two splits of similar energy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MicroPair {
    pub n_system_a: usize,
    pub n_system_b: usize,
    pub energy_gap: f64,
    pub d_micro: f64,
    pub within_threshold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitialSweepSummary {
    pub lattice: String,
    pub splits: Vec<SplitRow>,
    pub micro_pairs: Vec<MicroPair>,
    pub all_pairs_within_threshold: bool,
}

/// Every `n_S` for which both sides can hold their share, largest first.
fn feasible_splits(model: &Model, n: usize, requested: &[usize]) -> AppResult<Vec<usize>> {
    let n_sys = model.bipartition.system_sites().len();
    let n_bath = model.bipartition.bath_sites().len();
    let fits = |n_s: usize| n_s <= n && n_s <= n_sys && n - n_s <= n_bath;
    if requested.is_empty() {
        return Ok((0..=n).rev().filter(|&n_s| fits(n_s)).collect());
    }
    match requested.iter().find(|&&n_s| !fits(n_s)) {
        Some(n_s) => Err(AppError::Config(format!(
            "{n_s} of {n} bosons in the system does not fit {n_sys} system and {n_bath} bath sites"
        ))),
        None => Ok(requested.to_vec()),
    }
}

/// Quenches from `|g_S⟩ ⊗ |g_B⟩` for every requested particle split.
pub fn run_initial_state_sweep(scenario: &LoadedScenario, out: &OutputDir) -> AppResult<InitialSweepSummary> {
    let started = Instant::now();
    let config = &scenario.config;
    expect_kind(config, ScenarioKind::InitialStateSweep)?;
    let model = Model::load(&config.lattice, scenario)?;
    let eig = model.diagonalize(config.dense_guard)?;
    let n = config.n_particles;

    let mut splits = Vec::new();
    let mut analyses = Vec::new();
    for n_s in feasible_splits(&model, n, &config.system_particles)? {
        let initial = product_pure_initial(&model.lattice, &model.bipartition, &model.sector, &model.split, n_s, n - n_s)?;
        let analysis = analyze_quench(&model, &eig, &initial.complex(), config)?;
        analysis.write(&out.subdir(&format!("split_{}_{}", n_s, n - n_s))?, &model, &eig)?;
        splits.push(SplitRow {
            n_system: n_s,
            n_bath: n - n_s,
            system_energy: initial.system_energy,
            bath_energy: initial.bath_energy,
            energy_sum: initial.system_energy + initial.bath_energy,
            total_energy: initial.total_energy,
            coupling_energy: initial.coupling_energy,
            relative_mismatch: (initial.total_energy - initial.system_energy - initial.bath_energy).abs()
                / initial.total_energy.abs(),
            degenerate: initial.degenerate,
            beta: analysis.summary.beta,
            micro_levels: analysis.summary.micro_levels,
            gibbs_micro: gibbs_micro_distance(&analysis),
            d_gibbs_late_mean: analysis.summary.d_gibbs_late_mean,
            d_thermal_late_mean: analysis.summary.late_means.thermal,
        });
        analyses.push(analysis);
    }

    let mut micro_pairs = Vec::new();
    for a in 0..splits.len() {
        for b in a + 1..splits.len() {
            let gap = (splits[a].total_energy - splits[b].total_energy).abs();
            if gap < config.delta_e {
                let d = hs_distance_sq(&analyses[a].micro.density, &analyses[b].micro.density)?;
                micro_pairs.push(MicroPair {
                    n_system_a: splits[a].n_system,
                    n_system_b: splits[b].n_system,
                    energy_gap: gap,
                    d_micro: d,
                    within_threshold: d < config.micro_match_threshold,
                });
            }
        }
    }

    out.csv("splits.csv", &splits)?;
    out.csv("micro_pairs.csv", &micro_pairs)?;
    let summary = InitialSweepSummary {
        lattice: model.name.clone(),
        all_pairs_within_threshold: micro_pairs.iter().all(|p| p.within_threshold),
        splits,
        micro_pairs,
    };
    finish(out, config, &summary, started)?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeRow {
    pub lattice: String,
    pub n_sites: usize,
    pub n_system_sites: usize,
    pub coupling_edges: usize,
    pub dim: usize,
    pub energy: f64,
    pub beta: f64,
    pub gibbs_micro: f64,
    pub d_gibbs_ratio: f64,
    pub d_thermal_late_mean: f64,
    pub entropy_late_mean: f64,
    pub entropy_relative_fluctuation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeSweepSummary {
    pub lattices: Vec<LatticeRow>,
}

fn directory_name(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' }).collect()
}

/// The standard quench repeated on each listed lattice.
pub fn run_lattice_sweep(scenario: &LoadedScenario, out: &OutputDir) -> AppResult<LatticeSweepSummary> {
    let started = Instant::now();
    let config = &scenario.config;
    expect_kind(config, ScenarioKind::LatticeSweep)?;
    let mut rows = Vec::new();
    for source in &config.lattices {
        let model = Model::load(source, scenario)?;
        let eig = model.diagonalize(config.dense_guard)?;
        let initial = product_pure_initial(
            &model.lattice,
            &model.bipartition,
            &model.sector,
            &model.split,
            config.n_particles,
            0,
        )?;
        let analysis = analyze_quench(&model, &eig, &initial.complex(), config)?;
        analysis.write(&out.subdir(&directory_name(&model.name))?, &model, &eig)?;
        let s = &analysis.summary;
        rows.push(LatticeRow {
            lattice: model.name.clone(),
            n_sites: model.lattice.n_sites(),
            n_system_sites: model.bipartition.system_sites().len(),
            coupling_edges: model.bipartition.coupling_edges().len(),
            dim: s.dim,
            energy: s.initial_energy,
            beta: s.beta,
            gibbs_micro: gibbs_micro_distance(&analysis),
            d_gibbs_ratio: s.d_gibbs_ratio,
            d_thermal_late_mean: s.late_means.thermal,
            entropy_late_mean: s.entropy.late_mean,
            entropy_relative_fluctuation: s.entropy.late_relative_fluctuation,
        });
    }
    out.csv("lattices.csv", &rows)?;
    let summary = LatticeSweepSummary { lattices: rows };
    finish(out, config, &summary, started)?;
    Ok(summary)
}
