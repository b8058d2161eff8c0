//! Scenario runners. Each `run_*` function reads a validated config, writes
//! its files into an output directory and returns the summary it wrote.

mod entanglement;
mod mixed;
mod quench;
mod spectrum;
mod sweeps;

use std::path::Path;
use std::time::Instant;

use edtherm_core::ensembles::thermal_subsystem;
use edtherm_core::hamiltonian::{split_hamiltonian, subsystem_hamiltonian, SparseOperator, SplitHamiltonian};
use edtherm_core::hilbert::{BasisSector, SubsystemFockSpace};
use edtherm_core::lattice::{Bipartition, Lattice};
use edtherm_core::reduction::{von_neumann_entropy, PartialTrace, ReducedState};
use edtherm_core::spectral::SpectralDecomposition;
use edtherm_core::DensityMatrix;
use serde::Serialize;

pub use entanglement::{run_entanglement, EntanglementSummary, PairLocation, PairSummary};
pub use mixed::{run_mixed_temperature, MixedSummary};
pub use quench::{analyze_quench, run_quench, QuenchAnalysis, QuenchSummary, TrajectoryRow};
pub use spectrum::{run_spectrum_stats, SpectrumSummary};
pub use sweeps::{run_initial_state_sweep, run_lattice_sweep, InitialSweepSummary, LatticeSweepSummary};

use crate::config::{resolve_lattice, LoadedLattice, LoadedScenario, ScenarioConfig, ScenarioKind};
use crate::error::{AppError, AppResult};
use crate::output::{OutputDir, RunSummary, Timing, SCHEMA_VERSION};

/// Everything about one lattice that does not depend on the initial state.
#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub lattice: Lattice,
    pub bipartition: Bipartition,
    pub sector: BasisSector,
    pub split: SplitHamiltonian,
    /// `H_S + H_B + H_I`, the post-quench Hamiltonian.
    pub hamiltonian: SparseOperator,
    pub fock: SubsystemFockSpace,
    /// `H_S` on the subsystem Fock space.
    pub system_fock_hamiltonian: SparseOperator,
    pub trace: PartialTrace,
}

impl Model {
    pub fn build(loaded: LoadedLattice, config: &ScenarioConfig) -> AppResult<Self> {
        let lattice = match config.interaction {
            Some(u) => loaded.lattice.with_interaction(u)?,
            None => loaded.lattice,
        };
        let bipartition = loaded.bipartition;
        let terms = config.coupling_terms.unwrap_or(loaded.coupling_terms);
        let sector = BasisSector::new(lattice.n_sites(), config.n_particles)?;
        let split = split_hamiltonian(&lattice, &bipartition, &sector, terms.into())?;
        let hamiltonian = split.total();
        let fock = SubsystemFockSpace::for_system(&bipartition)?;
        let system_fock_hamiltonian = subsystem_hamiltonian(&lattice, &bipartition, &fock)?;
        let trace = PartialTrace::new(&sector, &bipartition)?;
        Ok(Model {
            name: loaded.name,
            lattice,
            bipartition,
            sector,
            split,
            hamiltonian,
            fock,
            system_fock_hamiltonian,
            trace,
        })
    }

    pub fn load(source: &str, scenario: &LoadedScenario) -> AppResult<Self> {
        Self::build(resolve_lattice(source, &scenario.base_dir)?, &scenario.config)
    }

    pub fn diagonalize(&self, guard: usize) -> AppResult<SpectralDecomposition> {
        Ok(SpectralDecomposition::diagonalize_with_guard(&self.hamiltonian, guard)?)
    }

    /// `Ω_S = e^{−βH_S}/Z` on the subsystem Fock space.
    pub fn thermal_state(&self, beta: f64, mu: Option<f64>) -> AppResult<DensityMatrix> {
        Ok(thermal_subsystem(&self.system_fock_hamiltonian, &self.fock, beta, mu)?)
    }
}

/// Squared Hilbert–Schmidt and trace distance between two named states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairDistance {
    pub a: String,
    pub b: String,
    pub hilbert_schmidt_sq: f64,
    pub trace_distance: f64,
}

pub(crate) fn pairwise_distances(states: &[(&str, &DensityMatrix)]) -> AppResult<Vec<PairDistance>> {
    let mut out = Vec::new();
    for (i, (na, a)) in states.iter().enumerate() {
        for (nb, b) in &states[i + 1..] {
            out.push(PairDistance {
                a: na.to_string(),
                b: nb.to_string(),
                hilbert_schmidt_sq: edtherm_core::reduction::hs_distance_sq(a, b)?,
                trace_distance: edtherm_core::reduction::trace_distance(a, b)?,
            });
        }
    }
    Ok(out)
}

/// Mean, spread and range of a series of entropies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyStats {
    pub initial: f64,
    pub late_mean: f64,
    pub late_std: f64,
    /// `late_std / late_mean`.
    pub late_relative_fluctuation: f64,
    /// `(max − min) / late_mean` over the late window.
    pub late_relative_range: f64,
}

impl EntropyStats {
    pub(crate) fn new(initial: f64, late: &[f64]) -> Self {
        let n = late.len().max(1) as f64;
        let mean = late.iter().sum::<f64>() / n;
        let var = late.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        let (lo, hi) = late
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        EntropyStats {
            initial,
            late_mean: mean,
            late_std: var.sqrt(),
            late_relative_fluctuation: var.sqrt() / mean,
            late_relative_range: (hi - lo) / mean,
        }
    }
}

pub(crate) fn entropy(reduced: &ReducedState) -> AppResult<f64> {
    Ok(von_neumann_entropy(&reduced.density)?)
}

/// Writes `summary.json` and `timing.json` for a finished run.
pub(crate) fn finish<T: Serialize>(
    out: &OutputDir,
    config: &ScenarioConfig,
    results: &T,
    started: Instant,
) -> AppResult<()> {
    out.json(
        "summary.json",
        &RunSummary {
            schema_version: SCHEMA_VERSION,
            scenario: config.scenario.command(),
            config,
            results,
        },
    )?;
    out.json(
        "timing.json",
        &Timing {
            schema_version: SCHEMA_VERSION,
            wall_clock_seconds: started.elapsed().as_secs_f64(),
        },
    )
}

pub(crate) fn expect_kind(config: &ScenarioConfig, kind: ScenarioKind) -> AppResult<()> {
    if config.scenario != kind {
        return Err(AppError::Config(format!(
            "config describes scenario `{}` but `{}` was requested",
            config.scenario.command(),
            kind.command()
        )));
    }
    Ok(())
}

/// Dispatches on the config's scenario field.
pub fn run_scenario(scenario: &LoadedScenario, out_dir: &Path) -> AppResult<serde_json::Value> {
    let out = OutputDir::create(out_dir)?;
    let value = match scenario.config.scenario {
        ScenarioKind::SpectrumStats => serde_json::to_value(run_spectrum_stats(scenario, &out)?)?,
        ScenarioKind::Quench => serde_json::to_value(run_quench(scenario, &out)?)?,
        ScenarioKind::InitialStateSweep => serde_json::to_value(run_initial_state_sweep(scenario, &out)?)?,
        ScenarioKind::LatticeSweep => serde_json::to_value(run_lattice_sweep(scenario, &out)?)?,
        ScenarioKind::MixedTemperature => serde_json::to_value(run_mixed_temperature(scenario, &out)?)?,
        ScenarioKind::Entanglement => serde_json::to_value(run_entanglement(scenario, &out)?)?,
    };
    Ok(value)
}
