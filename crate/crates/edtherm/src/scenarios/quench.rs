use std::time::Instant;

use edtherm_core::dynamics::{product_pure_initial, time_average_reduced, EvolvingState, SiteState};
use edtherm_core::ensembles::{canonical_weights, microcanonical_weights, solve_beta, BetaSolverOptions};
use edtherm_core::reduction::{energy_resolved_profile, hs_distance_sq, GlobalState, ReducedState};
use edtherm_core::spectral::SpectralDecomposition;
use edtherm_core::{Complex64, DensityMatrix};
use serde::Serialize;

use super::{entropy, expect_kind, finish, pairwise_distances, EntropyStats, Model, PairDistance};
use crate::config::{LoadedScenario, ScenarioConfig, ScenarioKind};
use crate::error::AppResult;
use crate::output::OutputDir;

/// One row of `trajectory.csv`: squared Hilbert–Schmidt distances of
/// `ρ_S(t)` to each reference state, plus entropy and energy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub d_thermal: f64,
    pub d_micro: f64,
    pub d_canonical: f64,
    pub d_gibbs: f64,
    pub entropy: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowDistance {
    pub window: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub d_gibbs: f64,
    pub d_micro: f64,
}

/// Distances along instantaneous state → time average → diagonal ensemble →
/// microcanonical ensemble.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceChain {
    pub final_time: f64,
    pub instant_to_average: f64,
    pub average_to_gibbs: f64,
    pub gibbs_to_micro: f64,
    pub instant_to_micro: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LateMeans {
    pub thermal: f64,
    pub micro: f64,
    pub canonical: f64,
    pub gibbs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuenchSummary {
    pub lattice: String,
    pub dim: usize,
    pub subsystem_dim: usize,
    pub initial_energy: f64,
    /// Standard deviation of the energy distribution of the initial state.
    pub energy_width: f64,
    pub beta: f64,
    pub micro_levels: usize,
    /// Effective number of populated eigenstates, `1 / Σ p²`.
    pub participation: f64,
    pub ensemble_distances: Vec<PairDistance>,
    pub closest_pair: PairDistance,
    pub d_gibbs_initial: f64,
    pub d_gibbs_late_mean: f64,
    pub d_gibbs_ratio: f64,
    pub late_means: LateMeans,
    pub time_averages: Vec<WindowDistance>,
    pub chain: DistanceChain,
    pub entropy: EntropyStats,
    pub max_energy_drift: f64,
}

/// Full result of a pure-state quench: the summary plus the states behind it.
#[derive(Clone, Debug)]
pub struct QuenchAnalysis {
    pub summary: QuenchSummary,
    pub trajectory: Vec<TrajectoryRow>,
    pub populations: Vec<f64>,
    pub thermal: DensityMatrix,
    pub micro: ReducedState,
    pub canonical: ReducedState,
    pub gibbs: ReducedState,
    pub time_average: ReducedState,
    pub final_state: ReducedState,
}

fn eigen_mixture_reduced(model: &Model, eig: &SpectralDecomposition, weights: &[f64]) -> AppResult<ReducedState> {
    Ok(model.trace.reduce(GlobalState::RealMixture {
        weights,
        components: eig.vectors(),
    })?)
}

/// Evolves `psi` under the model Hamiltonian and compares the subsystem with
/// every reference ensemble.
pub fn analyze_quench(
    model: &Model,
    eig: &SpectralDecomposition,
    psi: &[Complex64],
    config: &ScenarioConfig,
) -> AppResult<QuenchAnalysis> {
    let state = EvolvingState::pure(eig, psi)?;
    let populations = state.populations();
    let energy = state.energy();
    let values = eig.values();
    let energy_width = populations
        .iter()
        .zip(values)
        .map(|(p, e)| p * (e - energy) * (e - energy))
        .sum::<f64>()
        .sqrt();
    let participation = 1.0 / populations.iter().map(|p| p * p).sum::<f64>();

    let beta = solve_beta(values, energy, BetaSolverOptions::default())?;
    let micro_weights = microcanonical_weights(values, energy, config.delta_e)?;
    let micro_levels = micro_weights.iter().filter(|&&w| w > 0.0).count();

    let thermal = model.thermal_state(beta, config.chemical_potential)?;
    let micro = eigen_mixture_reduced(model, eig, &micro_weights)?;
    let canonical = eigen_mixture_reduced(model, eig, &canonical_weights(values, beta))?;
    let gibbs = eigen_mixture_reduced(model, eig, &populations)?;

    let ensemble_distances = pairwise_distances(&[
        ("gibbs", &gibbs.density),
        ("micro", &micro.density),
        ("canonical", &canonical.density),
        ("thermal", &thermal),
    ])?;
    let closest_pair = ensemble_distances
        .iter()
        .min_by(|a, b| a.hilbert_schmidt_sq.total_cmp(&b.hilbert_schmidt_sq))
        .cloned()
        .expect("four states give six pairs");

    let mut trajectory = Vec::new();
    let mut final_state = None;
    for t in config.time.points() {
        let SiteState::Pure(psi_t) = state.site_state(t) else {
            unreachable!("pure states stay pure")
        };
        let reduced = model.trace.reduce(GlobalState::Pure(&psi_t))?;
        trajectory.push(TrajectoryRow {
            t,
            d_thermal: hs_distance_sq(&reduced.density, &thermal)?,
            d_micro: hs_distance_sq(&reduced.density, &micro.density)?,
            d_canonical: hs_distance_sq(&reduced.density, &canonical.density)?,
            d_gibbs: hs_distance_sq(&reduced.density, &gibbs.density)?,
            entropy: entropy(&reduced)?,
            energy: model.hamiltonian.expectation(&psi_t),
        });
        final_state = Some(reduced);
    }
    let final_state = final_state.expect("time grid contains t = 0");
    let final_time = trajectory.last().map_or(0.0, |r| r.t);

    let late: Vec<&TrajectoryRow> = trajectory.iter().filter(|r| r.t >= config.relaxed_from).collect();
    let late = if late.is_empty() { vec![trajectory.last().expect("non-empty")] } else { late };
    let late_mean = |f: fn(&TrajectoryRow) -> f64| late.iter().map(|r| f(r)).sum::<f64>() / late.len() as f64;
    let late_means = LateMeans {
        thermal: late_mean(|r| r.d_thermal),
        micro: late_mean(|r| r.d_micro),
        canonical: late_mean(|r| r.d_canonical),
        gibbs: late_mean(|r| r.d_gibbs),
    };
    let late_entropies: Vec<f64> = late.iter().map(|r| r.entropy).collect();
    let entropy_stats = EntropyStats::new(trajectory[0].entropy, &late_entropies);
    let max_energy_drift = trajectory.iter().map(|r| (r.energy - energy).abs()).fold(0.0, f64::max);

    let mut time_averages = Vec::new();
    let mut longest: Option<(f64, ReducedState)> = None;
    for &window in &config.average_windows {
        let samples = (window / config.average_step).round() as usize + 1;
        let (t0, t1) = (config.relaxed_from, config.relaxed_from + window);
        let avg = time_average_reduced(&state, &model.trace, t0, t1, samples.max(2))?;
        time_averages.push(WindowDistance {
            window,
            t_start: t0,
            t_end: t1,
            samples: samples.max(2),
            d_gibbs: hs_distance_sq(&avg.density, &gibbs.density)?,
            d_micro: hs_distance_sq(&avg.density, &micro.density)?,
        });
        if longest.as_ref().map_or(true, |(w, _)| window > *w) {
            longest = Some((window, avg));
        }
    }
    let time_average = match longest {
        Some((_, avg)) => avg,
        None => gibbs.clone(),
    };

    let chain = DistanceChain {
        final_time,
        instant_to_average: hs_distance_sq(&final_state.density, &time_average.density)?,
        average_to_gibbs: hs_distance_sq(&time_average.density, &gibbs.density)?,
        gibbs_to_micro: hs_distance_sq(&gibbs.density, &micro.density)?,
        instant_to_micro: hs_distance_sq(&final_state.density, &micro.density)?,
    };

    let d_gibbs_initial = trajectory[0].d_gibbs;
    let summary = QuenchSummary {
        lattice: model.name.clone(),
        dim: eig.dim(),
        subsystem_dim: model.fock.dim(),
        initial_energy: energy,
        energy_width,
        beta,
        micro_levels,
        participation,
        ensemble_distances,
        closest_pair,
        d_gibbs_initial,
        d_gibbs_late_mean: late_means.gibbs,
        d_gibbs_ratio: late_means.gibbs / d_gibbs_initial,
        late_means,
        time_averages,
        chain,
        entropy: entropy_stats,
        max_energy_drift,
    };
    Ok(QuenchAnalysis {
        summary,
        trajectory,
        populations,
        thermal,
        micro,
        canonical,
        gibbs,
        time_average,
        final_state,
    })
}

#[derive(Serialize)]
struct OverlapRow {
    index: usize,
    energy: f64,
    population: f64,
}

#[derive(Serialize)]
struct ProfileRow {
    energy: f64,
    weight: f64,
}

impl QuenchAnalysis {
    /// Writes trajectory, ensemble, overlap and profile tables plus the
    /// reference density matrices.
    pub fn write(&self, out: &OutputDir, model: &Model, eig: &SpectralDecomposition) -> AppResult<()> {
        out.csv("trajectory.csv", &self.trajectory)?;
        out.csv("ensembles.csv", &self.summary.ensemble_distances)?;
        out.csv("time_averages.csv", &self.summary.time_averages)?;
        out.csv(
            "overlaps.csv",
            eig.values().iter().zip(&self.populations).enumerate().map(|(index, (&energy, &population))| OverlapRow {
                index,
                energy,
                population,
            }),
        )?;
        let states: [(&str, &DensityMatrix); 6] = [
            ("thermal", &self.thermal),
            ("micro", &self.micro.density),
            ("canonical", &self.canonical.density),
            ("gibbs", &self.gibbs.density),
            ("time_average", &self.time_average.density),
            ("final", &self.final_state.density),
        ];
        for (name, rho) in states {
            let profile = energy_resolved_profile(rho, &model.system_fock_hamiltonian)?;
            out.csv(
                &format!("profile_{name}.csv"),
                profile.iter().map(|p| ProfileRow {
                    energy: p.energy,
                    weight: p.weight,
                }),
            )?;
            out.matrix(&format!("rho_{name}"), rho.matrix())?;
        }
        Ok(())
    }
}

/// Quench from all bosons in the system's ground state and an empty bath.
pub fn run_quench(scenario: &LoadedScenario, out: &OutputDir) -> AppResult<QuenchSummary> {
    let started = Instant::now();
    let config = &scenario.config;
    expect_kind(config, ScenarioKind::Quench)?;
    let model = Model::load(&config.lattice, scenario)?;
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
    analysis.write(out, &model, &eig)?;
    finish(out, config, &analysis.summary, started)?;
    Ok(analysis.summary)
}
