use std::time::Instant;

use edtherm_core::dynamics::{product_pure_initial, EvolvingState};
use edtherm_core::reduction::{concurrence, two_site_rdm};
use serde::Serialize;

use super::{entropy, expect_kind, finish, EntropyStats, Model};
use crate::config::{LoadedScenario, ScenarioKind};
use crate::error::{AppError, AppResult};
use crate::output::OutputDir;

/// Where a site pair sits relative to the cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairLocation {
    System,
    Bath,
    Across,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairSummary {
    pub sites: [usize; 2],
    pub location: PairLocation,
    pub initial: f64,
    pub early_max: f64,
    pub late_max: f64,
    pub late_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementSummary {
    pub lattice: String,
    pub pairs: Vec<PairSummary>,
    pub entropy: EntropyStats,
    pub threshold: f64,
    /// Some pair exceeds the threshold before `relaxed_from`.
    pub early_peak_above_threshold: bool,
    /// Every pair stays below the threshold from `relaxed_from` on.
    pub late_all_below_threshold: bool,
}

/// Pairwise concurrence and subsystem entropy along the standard quench.
pub fn run_entanglement(scenario: &LoadedScenario, out: &OutputDir) -> AppResult<EntanglementSummary> {
    let started = Instant::now();
    let config = &scenario.config;
    expect_kind(config, ScenarioKind::Entanglement)?;
    let model = Model::load(&config.lattice, scenario)?;
    let n_sites = model.lattice.n_sites();
    let pairs: Vec<[usize; 2]> = match &config.pairs {
        Some(p) => p.clone(),
        None => model.lattice.edges().iter().map(|e| {
            let (a, b) = e.sites();
            [a, b]
        }).collect(),
    };
    if let Some([a, b]) = pairs.iter().find(|[a, b]| *a >= n_sites || *b >= n_sites) {
        return Err(AppError::Config(format!("pair ({a}, {b}) outside a lattice of {n_sites} sites")));
    }
    let eig = model.diagonalize(config.dense_guard)?;
    let initial = product_pure_initial(
        &model.lattice,
        &model.bipartition,
        &model.sector,
        &model.split,
        config.n_particles,
        0,
    )?;
    let state = EvolvingState::pure(&eig, &initial.complex())?;

    let times = config.time.points();
    let mut rows = Vec::with_capacity(times.len());
    for &t in &times {
        let site = state.site_state(t);
        let global = site.as_global();
        let mut row = vec![t, entropy(&model.trace.reduce(global)?)?];
        for &[a, b] in &pairs {
            row.push(concurrence(&two_site_rdm(global, &model.sector, a, b)?)?);
        }
        rows.push(row);
    }
    let mut headers = vec!["t".to_string(), "entropy".to_string()];
    headers.extend(pairs.iter().map(|[a, b]| format!("c_{a}_{b}")));
    out.csv_columns("concurrence.csv", &headers, &rows)?;

    let is_late = |t: f64| t >= config.relaxed_from;
    let pair_summaries: Vec<PairSummary> = pairs
        .iter()
        .enumerate()
        .map(|(k, &[a, b])| {
            let column = |late: bool| rows.iter().filter(move |r| is_late(r[0]) == late).map(move |r| r[k + 2]);
            let late_count = column(true).count().max(1);
            let location = match (model.bipartition.is_system_site(a), model.bipartition.is_system_site(b)) {
                (true, true) => PairLocation::System,
                (false, false) => PairLocation::Bath,
                _ => PairLocation::Across,
            };
            PairSummary {
                sites: [a, b],
                location,
                initial: rows[0][k + 2],
                early_max: column(false).fold(0.0, f64::max),
                late_max: column(true).fold(0.0, f64::max),
                late_mean: column(true).sum::<f64>() / late_count as f64,
            }
        })
        .collect();
    let late_entropies: Vec<f64> = rows.iter().filter(|r| is_late(r[0])).map(|r| r[1]).collect();
    let summary = EntanglementSummary {
        lattice: model.name.clone(),
        entropy: EntropyStats::new(rows[0][1], &late_entropies),
        threshold: config.concurrence_threshold,
        early_peak_above_threshold: pair_summaries.iter().any(|p| p.early_max > config.concurrence_threshold),
        late_all_below_threshold: pair_summaries.iter().all(|p| p.late_max < config.concurrence_threshold),
        pairs: pair_summaries,
    };
    out.csv("pairs.csv", summary.pairs.iter().map(|p| PairRow::from(p)))?;
    finish(out, config, &summary, started)?;
    Ok(summary)
}

#[derive(Serialize)]
struct PairRow {
    site_a: usize,
    site_b: usize,
    location: PairLocation,
    initial: f64,
    early_max: f64,
    late_max: f64,
    late_mean: f64,
}

impl From<&PairSummary> for PairRow {
    fn from(p: &PairSummary) -> Self {
        PairRow {
            site_a: p.sites[0],
            site_b: p.sites[1],
            location: p.location,
            initial: p.initial,
            early_max: p.early_max,
            late_max: p.late_max,
            late_mean: p.late_mean,
        }
    }
}
