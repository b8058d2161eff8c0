use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use edtherm::config::{resolve_lattice, save_lattice, CATALOG_PREFIX};
use edtherm::{exit_code, load_scenario, AppError, AppResult, LatticeConfig, Model, OutputDir, ScenarioKind};

#[derive(Parser)]
#[command(name = "edtherm", version, about = "Exact-diagonalization thermalization experiments for hard-core bosons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Level-spacing statistics of the full Hamiltonian.
    Spectrum(RunArgs),
    /// Quench from all bosons in the system ground state.
    Quench(RunArgs),
    /// Quenches from several system/bath particle splits.
    SweepInitial(RunArgs),
    /// The standard quench on several lattices.
    SweepLattice(RunArgs),
    /// Quench from a product of thermal states at two temperatures.
    Mixed(RunArgs),
    /// Pairwise concurrence along the standard quench.
    Entanglement(RunArgs),
    /// Writes the Hamiltonian pieces of a scenario's lattice as triplet files.
    DumpOperator(RunArgs),
    /// Writes a built-in lattice as a lattice JSON file.
    ExportLattice {
        /// Catalog name such as `irregular21` or `chain_12`.
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run_kind(kind: ScenarioKind, args: &RunArgs) -> AppResult<()> {
    let scenario = load_scenario(&args.config)?;
    if scenario.config.scenario != kind {
        return Err(AppError::Config(format!(
            "{} describes scenario `{}`, not `{}`",
            args.config.display(),
            scenario.config.scenario.command(),
            kind.command()
        )));
    }
    edtherm::run_scenario(&scenario, &args.out)?;
    eprintln!("results written to {}", args.out.display());
    Ok(())
}

fn dump_operator(args: &RunArgs) -> AppResult<()> {
    let scenario = load_scenario(&args.config)?;
    let model = Model::load(&scenario.config.lattice, &scenario)?;
    let out = OutputDir::create(&args.out)?;
    out.operator("hamiltonian.txt", &model.hamiltonian)?;
    out.operator("hamiltonian_system.txt", &model.split.system)?;
    out.operator("hamiltonian_bath.txt", &model.split.bath)?;
    out.operator("hamiltonian_coupling.txt", &model.split.coupling)?;
    out.operator("hamiltonian_subsystem_fock.txt", &model.system_fock_hamiltonian)?;
    eprintln!("operators written to {}", args.out.display());
    Ok(())
}

fn export_lattice(name: &str, out: &Path) -> AppResult<()> {
    let loaded = resolve_lattice(&format!("{CATALOG_PREFIX}{name}"), Path::new("."))?;
    let config = LatticeConfig::from_model(
        Some(loaded.name.clone()),
        &loaded.lattice,
        &loaded.bipartition,
        loaded.coupling_terms,
    );
    save_lattice(out, &config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => run_kind(ScenarioKind::SpectrumStats, a),
        Command::Quench(a) => run_kind(ScenarioKind::Quench, a),
        Command::SweepInitial(a) => run_kind(ScenarioKind::InitialStateSweep, a),
        Command::SweepLattice(a) => run_kind(ScenarioKind::LatticeSweep, a),
        Command::Mixed(a) => run_kind(ScenarioKind::MixedTemperature, a),
        Command::Entanglement(a) => run_kind(ScenarioKind::Entanglement, a),
        Command::DumpOperator(a) => dump_operator(a),
        Command::ExportLattice { name, out } => export_lattice(name, out),
    };
    match result {
        Ok(()) => ExitCode::from(exit_code::SUCCESS as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
