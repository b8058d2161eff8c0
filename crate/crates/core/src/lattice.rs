//! Lattice geometry, model constants and the system/bath cut.
//!
//! Sites are 0-based. A [`Lattice`] carries the hopping `J` (the energy unit
//! of the whole crate) and the nearest-neighbour repulsion `U`; every edge
//! contributes both a hopping and an interaction term. A [`Bipartition`]
//! splits the sites into the system `S` and the bath `B` and derives the edges
//! crossing the cut.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// Largest lattice representable with one-word occupation bitmasks.
pub const MAX_SITES: usize = 63;

/// Default nearest-neighbour repulsion in units of `J`.
pub const DEFAULT_INTERACTION: f64 = 0.1;

/// An unordered pair of distinct sites, stored with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    a: usize,
    b: usize,
}

impl Edge {
    /// Builds the edge `{i, j}`. Returns `None` for a self-loop.
    pub fn new(i: usize, j: usize) -> Option<Self> {
        match i.cmp(&j) {
            core::cmp::Ordering::Less => Some(Edge { a: i, b: j }),
            core::cmp::Ordering::Greater => Some(Edge { a: j, b: i }),
            core::cmp::Ordering::Equal => None,
        }
    }

    pub fn sites(self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn mask(self) -> u64 {
        (1u64 << self.a) | (1u64 << self.b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    n_sites: usize,
    edges: Vec<Edge>,
    hopping: f64,
    interaction: f64,
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidLattice {
        field,
        reason: reason.into(),
    }
}

impl Lattice {
    /// Validates and builds a lattice. Edges keep the order they were given in.
    pub fn new(
        n_sites: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        hopping: f64,
        interaction: f64,
    ) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(invalid(
                "n_sites",
                format!("must be in 1..={MAX_SITES}, got {n_sites}"),
            ));
        }
        if !(hopping.is_finite() && hopping > 0.0) {
            return Err(invalid("J", format!("must be finite and > 0, got {hopping}")));
        }
        if !interaction.is_finite() {
            return Err(invalid("U", format!("must be finite, got {interaction}")));
        }
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (i, j) in edges {
            if i >= n_sites || j >= n_sites {
                return Err(invalid(
                    "edges",
                    format!("edge ({i}, {j}) references a site outside 0..{n_sites}"),
                ));
            }
            let edge = Edge::new(i, j)
                .ok_or_else(|| invalid("edges", format!("self-loop on site {i}")))?;
            if !seen.insert(edge) {
                return Err(invalid("edges", format!("duplicate edge ({i}, {j})")));
            }
            list.push(edge);
        }
        Ok(Lattice {
            n_sites,
            edges: list,
            hopping,
            interaction,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Hopping amplitude `J`.
    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    /// Nearest-neighbour repulsion `U`.
    pub fn interaction(&self) -> f64 {
        self.interaction
    }

    /// Same geometry with a different repulsion.
    pub fn with_interaction(mut self, interaction: f64) -> Result<Self> {
        if !interaction.is_finite() {
            return Err(invalid("U", format!("must be finite, got {interaction}")));
        }
        self.interaction = interaction;
        Ok(self)
    }

    pub fn contains_edge(&self, edge: Edge) -> bool {
        self.edges.contains(&edge)
    }

    /// Relabels `sites` as `0..sites.len()` and keeps the edges internal to them.
    pub fn induced(&self, sites: &[usize]) -> Result<Lattice> {
        let mut local = alloc::vec![usize::MAX; self.n_sites];
        for (k, &s) in sites.iter().enumerate() {
            local[s] = k;
        }
        let edges = self.edges.iter().filter_map(|e| {
            let (a, b) = e.sites();
            (local[a] != usize::MAX && local[b] != usize::MAX).then(|| (local[a], local[b]))
        });
        Lattice::new(sites.len(), edges, self.hopping, self.interaction)
    }
}

/// Split of the lattice into the system `S` and the bath `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bipartition {
    system_sites: Vec<usize>,
    bath_sites: Vec<usize>,
    coupling_edges: Vec<Edge>,
    system_mask: u64,
}

impl Bipartition {
    /// Builds the cut from the system sites; the bath is the complement and the
    /// coupling edges are derived from `lattice`.
    pub fn new(lattice: &Lattice, system_sites: &[usize]) -> Result<Self> {
        let n = lattice.n_sites();
        let mut set = BTreeSet::new();
        for &s in system_sites {
            if s >= n {
                return Err(invalid(
                    "system_sites",
                    format!("site {s} outside 0..{n}"),
                ));
            }
            if !set.insert(s) {
                return Err(invalid("system_sites", format!("duplicate site {s}")));
            }
        }
        if set.is_empty() {
            return Err(invalid("system_sites", "system part is empty"));
        }
        if set.len() == n {
            return Err(invalid("system_sites", "bath part is empty"));
        }
        let system_sites: Vec<usize> = set.into_iter().collect();
        let system_mask = system_sites.iter().fold(0u64, |m, &s| m | (1 << s));
        let bath_sites = (0..n).filter(|s| system_mask & (1 << s) == 0).collect();
        let coupling_edges = lattice
            .edges()
            .iter()
            .copied()
            .filter(|e| {
                let (a, b) = e.sites();
                (system_mask >> a & 1) != (system_mask >> b & 1)
            })
            .collect();
        Ok(Bipartition {
            system_sites,
            bath_sites,
            coupling_edges,
            system_mask,
        })
    }

    pub fn system_sites(&self) -> &[usize] {
        &self.system_sites
    }

    pub fn bath_sites(&self) -> &[usize] {
        &self.bath_sites
    }

    /// Edges with one endpoint on each side of the cut.
    pub fn coupling_edges(&self) -> &[Edge] {
        &self.coupling_edges
    }

    pub fn system_mask(&self) -> u64 {
        self.system_mask
    }

    pub fn n_sites(&self) -> usize {
        self.system_sites.len() + self.bath_sites.len()
    }

    pub fn is_system_site(&self, site: usize) -> bool {
        site < 64 && self.system_mask >> site & 1 == 1
    }

    pub fn system_edges(&self, lattice: &Lattice) -> Vec<Edge> {
        self.internal_edges(lattice, true)
    }

    pub fn bath_edges(&self, lattice: &Lattice) -> Vec<Edge> {
        self.internal_edges(lattice, false)
    }

    fn internal_edges(&self, lattice: &Lattice, system: bool) -> Vec<Edge> {
        lattice
            .edges()
            .iter()
            .copied()
            .filter(|e| {
                let (a, b) = e.sites();
                self.is_system_site(a) == system && self.is_system_site(b) == system
            })
            .collect()
    }

    /// `S` as a standalone lattice, site `k` being `system_sites[k]`.
    pub fn system_lattice(&self, lattice: &Lattice) -> Result<Lattice> {
        lattice.induced(&self.system_sites)
    }

    /// `B` as a standalone lattice, site `k` being `bath_sites[k]`.
    pub fn bath_lattice(&self, lattice: &Lattice) -> Result<Lattice> {
        lattice.induced(&self.bath_sites)
    }
}

// Shipped irregular graphs: planar, maximum degree 4, no non-trivial
// automorphism. The system occupies the lowest site labels.

/// 17 sites, `S = {0..5}`, three coupling edges (1,11), (3,9), (4,16).
const IRREGULAR17: &[(usize, usize)] = &[
    (0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 4), (1, 11), (2, 3), (3, 5), (3, 9),
    (4, 16), (6, 11), (6, 12), (6, 15), (7, 11), (7, 12), (7, 14), (8, 10), (8, 11),
    (8, 13), (8, 15), (9, 12), (9, 14), (9, 16), (10, 13), (10, 16), (12, 13), (13, 15),
];

/// 21 sites, `S = {0..7}`, single coupling edge (3, 20).
const IRREGULAR21: &[(usize, usize)] = &[
    (0, 4), (0, 5), (0, 6), (1, 4), (1, 5), (1, 7), (2, 6), (3, 4), (3, 7), (3, 20),
    (5, 6), (6, 7), (8, 13), (8, 15), (8, 16), (8, 19), (9, 10), (9, 12), (9, 13),
    (9, 17), (10, 13), (10, 18), (10, 20), (11, 12), (11, 17), (12, 18), (13, 17),
    (14, 16), (14, 20), (15, 20), (16, 17), (16, 19),
];

/// Bath sites 21..24 added on top of [`IRREGULAR21`].
const IRREGULAR25_EXTRA: &[(usize, usize)] = &[
    (11, 21), (11, 22), (12, 21), (14, 24), (15, 23), (19, 23), (21, 22), (22, 24),
];

/// Names accepted by [`example_lattice`], with `N` a site/rung count.
pub const CATALOG: &[&str] = &["chain_N", "ladder_N", "irregular17", "irregular21", "irregular25"];

/// Returns a catalog lattice with `J = 1`, `U = 0.1`.
///
/// * `chain_N`: open chain of `N` sites, `S` = the first `N/2` sites.
/// * `ladder_N`: two legs of `N` sites (site `leg*N + x`) joined by rungs,
///   `S` = the first `N/2` columns of both legs.
/// * `irregular17`: 6-site system, 11-site bath, three coupling edges.
/// * `irregular21`: 8-site system, 13-site bath, one coupling edge.
/// * `irregular25`: `irregular21` with four more bath sites.
pub fn example_lattice(name: &str) -> Result<(Lattice, Bipartition)> {
    let unknown = || Error::UnknownLattice(name.to_string());
    let (lattice, system): (Lattice, Vec<usize>) = match name {
        "irregular17" => (
            Lattice::new(17, IRREGULAR17.iter().copied(), 1.0, DEFAULT_INTERACTION)?,
            (0..6).collect(),
        ),
        "irregular21" => (
            Lattice::new(21, IRREGULAR21.iter().copied(), 1.0, DEFAULT_INTERACTION)?,
            (0..8).collect(),
        ),
        "irregular25" => (
            Lattice::new(
                25,
                IRREGULAR21.iter().chain(IRREGULAR25_EXTRA).copied(),
                1.0,
                DEFAULT_INTERACTION,
            )?,
            (0..8).collect(),
        ),
        _ => {
            if let Some(n) = name.strip_prefix("chain_") {
                let n: usize = n.parse().map_err(|_| unknown())?;
                if n < 2 {
                    return Err(unknown());
                }
                let lattice = Lattice::new(n, (0..n - 1).map(|i| (i, i + 1)), 1.0, DEFAULT_INTERACTION)?;
                (lattice, (0..n / 2).collect())
            } else if let Some(n) = name.strip_prefix("ladder_") {
                let n: usize = n.parse().map_err(|_| unknown())?;
                if n < 2 {
                    return Err(unknown());
                }
                let legs = (0..2).flat_map(|leg| (0..n - 1).map(move |x| (leg * n + x, leg * n + x + 1)));
                let rungs = (0..n).map(|x| (x, n + x));
                let lattice = Lattice::new(2 * n, legs.chain(rungs), 1.0, DEFAULT_INTERACTION)?;
                let system = (0..n / 2).flat_map(|x| [x, n + x]).collect();
                (lattice, system)
            } else {
                return Err(unknown());
            }
        }
    };
    let bipartition = Bipartition::new(&lattice, &system)?;
    Ok((lattice, bipartition))
}
