use std::time::Instant;

use edtherm_core::spectral::{eigenvalues, unfold_and_spacings, wigner_pdf, poisson_pdf};
use serde::Serialize;

use super::{expect_kind, finish, Model};
use crate::config::{LoadedScenario, ScenarioKind};
use crate::error::AppResult;
use crate::output::OutputDir;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub lattice: String,
    pub dim: usize,
    pub levels_used: usize,
    pub mean_spacing: f64,
    pub ks_wigner: f64,
    pub ks_poisson: f64,
    pub chaotic: bool,
    pub ground_energy: f64,
    pub top_energy: f64,
}

#[derive(Serialize)]
struct HistogramRow {
    bin_center: f64,
    density: f64,
}

#[derive(Serialize)]
struct ReferenceRow {
    s: f64,
    wigner: f64,
    poisson: f64,
}

#[derive(Serialize)]
struct LevelRow {
    index: usize,
    energy: f64,
}

/// Level-spacing statistics of the full Hamiltonian.
pub fn run_spectrum_stats(scenario: &LoadedScenario, out: &OutputDir) -> AppResult<SpectrumSummary> {
    let started = Instant::now();
    let config = &scenario.config;
    expect_kind(config, ScenarioKind::SpectrumStats)?;
    let model = Model::load(&config.lattice, scenario)?;
    let levels = eigenvalues(&model.hamiltonian, config.dense_guard)?;
    let stats = unfold_and_spacings(&levels, config.spectrum.unfold_degree)?;
    let params = config.spectrum;

    out.csv(
        "spacing_histogram.csv",
        stats.histogram(params.histogram_bins, params.histogram_max).iter().map(|b| HistogramRow {
            bin_center: b.center(),
            density: b.density,
        }),
    )?;
    let n_ref = 200;
    let mut reference = Vec::with_capacity(n_ref + 1);
    for k in 0..=n_ref {
        let s = params.histogram_max * k as f64 / n_ref as f64;
        reference.push(ReferenceRow {
            s,
            wigner: wigner_pdf(s)?,
            poisson: poisson_pdf(s)?,
        });
    }
    out.csv("reference_distributions.csv", reference)?;
    out.csv(
        "levels.csv",
        levels.iter().enumerate().map(|(index, &energy)| LevelRow { index, energy }),
    )?;

    let summary = SpectrumSummary {
        lattice: model.name.clone(),
        dim: levels.len(),
        levels_used: stats.levels_used,
        mean_spacing: stats.mean_spacing(),
        ks_wigner: stats.ks_wigner,
        ks_poisson: stats.ks_poisson,
        chaotic: stats.is_chaotic(),
        ground_energy: levels[0],
        top_energy: levels[levels.len() - 1],
    };
    finish(out, config, &summary, started)?;
    Ok(summary)
}
