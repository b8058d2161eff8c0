//! JSON configuration files: lattice descriptions and scenario parameters.

use std::fs;
use std::path::{Path, PathBuf};

use edtherm_core::hamiltonian::CouplingTerms;
use edtherm_core::lattice::{example_lattice, Bipartition, Lattice};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// Prefix selecting a built-in lattice instead of a file, e.g.
/// `catalog:irregular17`.
pub const CATALOG_PREFIX: &str = "catalog:";

/// Serde mirror of [`CouplingTerms`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingTermsConfig {
    #[default]
    Both,
    HoppingOnly,
    InteractionOnly,
}

impl From<CouplingTermsConfig> for CouplingTerms {
    fn from(c: CouplingTermsConfig) -> Self {
        match c {
            CouplingTermsConfig::Both => CouplingTerms::Both,
            CouplingTermsConfig::HoppingOnly => CouplingTerms::HoppingOnly,
            CouplingTermsConfig::InteractionOnly => CouplingTerms::InteractionOnly,
        }
    }
}

/// On-disk lattice description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n_sites: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(rename = "J")]
    pub hopping: f64,
    #[serde(rename = "U")]
    pub interaction: f64,
    pub system_sites: Vec<usize>,
    #[serde(default)]
    pub coupling_terms: CouplingTermsConfig,
}

/// A validated lattice with its cut.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedLattice {
    pub name: String,
    pub lattice: Lattice,
    pub bipartition: Bipartition,
    pub coupling_terms: CouplingTermsConfig,
}

impl LatticeConfig {
    pub fn from_model(name: Option<String>, lattice: &Lattice, bipartition: &Bipartition, coupling_terms: CouplingTermsConfig) -> Self {
        LatticeConfig {
            name,
            n_sites: lattice.n_sites(),
            edges: lattice.edges().iter().map(|e| {
                let (a, b) = e.sites();
                [a, b]
            }).collect(),
            hopping: lattice.hopping(),
            interaction: lattice.interaction(),
            system_sites: bipartition.system_sites().to_vec(),
            coupling_terms,
        }
    }

    pub fn validate(&self, name: String) -> AppResult<LoadedLattice> {
        let lattice = Lattice::new(
            self.n_sites,
            self.edges.iter().map(|&[a, b]| (a, b)),
            self.hopping,
            self.interaction,
        )?;
        let bipartition = Bipartition::new(&lattice, &self.system_sites)?;
        Ok(LoadedLattice {
            name: self.name.clone().unwrap_or(name),
            lattice,
            bipartition,
            coupling_terms: self.coupling_terms,
        })
    }
}

fn read(path: &Path) -> AppResult<String> {
    fs::read_to_string(path).map_err(|source| AppError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> AppResult<T> {
    serde_json::from_str(&read(path)?).map_err(|source| AppError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and validates a lattice file.
pub fn load_lattice(path: &Path) -> AppResult<LoadedLattice> {
    let config: LatticeConfig = parse(path)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "lattice".into());
    config.validate(stem)
}

pub fn save_lattice(path: &Path, config: &LatticeConfig) -> AppResult<()> {
    let text = serde_json::to_string_pretty(config)?;
    fs::write(path, text + "\n").map_err(|source| AppError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolves `catalog:<name>` or a path (relative to `base_dir`).
pub fn resolve_lattice(source: &str, base_dir: &Path) -> AppResult<LoadedLattice> {
    if let Some(name) = source.strip_prefix(CATALOG_PREFIX) {
        let (lattice, bipartition) = example_lattice(name)?;
        Ok(LoadedLattice {
            name: name.to_string(),
            lattice,
            bipartition,
            coupling_terms: CouplingTermsConfig::Both,
        })
    } else {
        let path = Path::new(source);
        let path = if path.is_absolute() { path.to_path_buf() } else { base_dir.join(path) };
        load_lattice(&path)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    SpectrumStats,
    Quench,
    InitialStateSweep,
    LatticeSweep,
    MixedTemperature,
    Entanglement,
}

impl ScenarioKind {
    pub fn command(self) -> &'static str {
        match self {
            ScenarioKind::SpectrumStats => "spectrum",
            ScenarioKind::Quench => "quench",
            ScenarioKind::InitialStateSweep => "sweep-initial",
            ScenarioKind::LatticeSweep => "sweep-lattice",
            ScenarioKind::MixedTemperature => "mixed",
            ScenarioKind::Entanglement => "entanglement",
        }
    }
}

/// Uniform time grid `0, dt, 2dt, …, t_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub dt: f64,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            t_max: edtherm_core::dynamics::DEFAULT_T_MAX,
            dt: edtherm_core::dynamics::DEFAULT_DT,
        }
    }
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        let steps = (self.t_max / self.dt + 1e-9).floor() as usize;
        (0..=steps).map(|k| k as f64 * self.dt).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub unfold_degree: usize,
    pub histogram_bins: usize,
    pub histogram_max: f64,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        SpectrumParams {
            unfold_degree: edtherm_core::spectral::DEFAULT_UNFOLD_DEGREE,
            histogram_bins: 40,
            histogram_max: 4.0,
        }
    }
}

fn default_delta_e() -> f64 {
    edtherm_core::ensembles::DEFAULT_DELTA_E
}
fn default_guard() -> usize {
    edtherm_core::spectral::DEFAULT_DENSE_GUARD
}
fn default_relaxed() -> f64 {
    edtherm_core::dynamics::RELAXED_FROM
}
fn default_windows() -> Vec<f64> {
    vec![25.0, 50.0, 100.0]
}
fn default_average_step() -> f64 {
    0.5
}
fn default_beta_system() -> f64 {
    1.0
}
fn default_beta_bath() -> f64 {
    2.0
}
fn default_early() -> Vec<f64> {
    vec![0.0, 1.0, 2.0, 3.0]
}
fn default_late() -> Vec<f64> {
    vec![7.0, 8.0, 9.0, 10.0]
}
fn default_concurrence_threshold() -> f64 {
    0.05
}
fn default_micro_threshold() -> f64 {
    1e-3
}

/// Parameters of one run. Fields irrelevant to the chosen scenario are
/// ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    /// `catalog:<name>` or a lattice file path relative to the config file.
    pub lattice: String,
    /// Total number of bosons.
    pub n_particles: usize,
    /// Overrides the lattice's `U`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<f64>,
    /// Overrides the lattice's coupling-term selection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_terms: Option<CouplingTermsConfig>,
    #[serde(default = "default_delta_e")]
    pub delta_e: f64,
    #[serde(default = "default_guard")]
    pub dense_guard: usize,
    #[serde(default)]
    pub time: TimeGrid,
    #[serde(default = "default_relaxed")]
    pub relaxed_from: f64,
    #[serde(default = "default_windows")]
    pub average_windows: Vec<f64>,
    #[serde(default = "default_average_step")]
    pub average_step: f64,
    #[serde(default)]
    pub spectrum: SpectrumParams,
    /// Chemical potential of the subsystem thermal state (off by default).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chemical_potential: Option<f64>,
    /// `initial_state_sweep`: bosons initially in the system, one run each.
    #[serde(default)]
    pub system_particles: Vec<usize>,
    /// `initial_state_sweep`: threshold on `‖ρ_micro − ρ_micro'‖²` for splits
    /// whose energies lie within `delta_e` of each other.
    #[serde(default = "default_micro_threshold")]
    pub micro_match_threshold: f64,
    /// `lattice_sweep`: lattices to compare.
    #[serde(default)]
    pub lattices: Vec<String>,
    /// `mixed_temperature`: `[n_S, n_B]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixed_split: Option<[usize; 2]>,
    #[serde(default = "default_beta_system")]
    pub beta_system: f64,
    #[serde(default = "default_beta_bath")]
    pub beta_bath: f64,
    #[serde(default = "default_early")]
    pub early_times: Vec<f64>,
    #[serde(default = "default_late")]
    pub late_times: Vec<f64>,
    /// `entanglement`: site pairs; every lattice edge when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[usize; 2]>>,
    #[serde(default = "default_concurrence_threshold")]
    pub concurrence_threshold: f64,
}

impl ScenarioConfig {
    /// Minimal config with every optional field at its default.
    pub fn new(scenario: ScenarioKind, lattice: impl Into<String>, n_particles: usize) -> Self {
        let json = serde_json::json!({
            "scenario": scenario,
            "lattice": lattice.into(),
            "n_particles": n_particles,
        });
        serde_json::from_value(json).expect("defaults are valid")
    }

    pub fn validate(&self) -> AppResult<()> {
        let bad = |msg: String| Err(AppError::Config(msg));
        if !(self.delta_e > 0.0) {
            return bad(format!("delta_e must be positive, got {}", self.delta_e));
        }
        if !(self.time.dt > 0.0) || !(self.time.t_max >= 0.0) {
            return bad(format!("time grid needs dt > 0 and t_max >= 0, got {:?}", self.time));
        }
        if !(self.average_step > 0.0) || self.average_windows.iter().any(|w| !(*w > 0.0)) {
            return bad("averaging windows and step must be positive".into());
        }
        if !self.relaxed_from.is_finite() || self.relaxed_from < 0.0 {
            return bad(format!("relaxed_from must be non-negative, got {}", self.relaxed_from));
        }
        for (name, times) in [("early_times", &self.early_times), ("late_times", &self.late_times)] {
            if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
                return bad(format!("{name} must be strictly increasing"));
            }
        }
        match self.scenario {
            ScenarioKind::MixedTemperature => {
                let Some([n_s, n_b]) = self.mixed_split else {
                    return bad("mixed_temperature needs mixed_split = [n_S, n_B]".into());
                };
                if n_s + n_b != self.n_particles {
                    return bad(format!("mixed_split {n_s}+{n_b} does not add up to n_particles {}", self.n_particles));
                }
                if self.early_times.len() < 2 || self.late_times.len() < 2 {
                    return bad("early_times and late_times need at least two entries each".into());
                }
                if !self.beta_system.is_finite() || !self.beta_bath.is_finite() {
                    return bad("inverse temperatures must be finite".into());
                }
            }
            ScenarioKind::LatticeSweep if self.lattices.is_empty() => {
                return bad("lattice_sweep needs a non-empty `lattices` list".into());
            }
            ScenarioKind::InitialStateSweep => {
                if self.system_particles.iter().any(|&n| n > self.n_particles) {
                    return bad("system_particles entries cannot exceed n_particles".into());
                }
            }
            _ => {}
        }
        if let Some(pairs) = &self.pairs {
            if pairs.iter().any(|[a, b]| a == b) {
                return bad("pairs must join two different sites".into());
            }
        }
        Ok(())
    }
}

/// A parsed scenario file with the directory its relative paths refer to.
#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
}

pub fn load_scenario(path: &Path) -> AppResult<LoadedScenario> {
    let config: ScenarioConfig = parse(path)?;
    config.validate()?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(LoadedScenario { config, base_dir })
}
