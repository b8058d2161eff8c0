//! File formats, scenario runners and the command-line front end for
//! `edtherm-core`.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;

pub use config::{load_lattice, load_scenario, LatticeConfig, LoadedScenario, ScenarioConfig, ScenarioKind};
pub use error::{exit_code, AppError, AppResult};
pub use output::OutputDir;
pub use scenarios::{run_scenario, Model};
