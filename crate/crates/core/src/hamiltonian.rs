//! Sparse assembly of the hard-core boson Hamiltonian
//!
//! `H = −J Σ_⟨ij⟩ (b†_i b_j + h.c.) + U Σ_⟨ij⟩ n_i n_j`
//!
//! on a fixed-particle-number sector or on a subsystem Fock space. Hard-core
//! bosons hop without sign factors, so every matrix element is real and is
//! exactly `−J` or an integer multiple of `U`.

use alloc::format;
use alloc::vec::Vec;

use faer::Mat;
use num_complex::Complex64;

use crate::hilbert::{BasisSector, SubsystemFockSpace};
use crate::lattice::{Bipartition, Edge, Lattice};
use crate::{BasisTag, Error, Result};

/// Which terms of each coupling edge belong to `H_I`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CouplingTerms {
    /// Hopping and repulsion.
    #[default]
    Both,
    HoppingOnly,
    InteractionOnly,
}

impl CouplingTerms {
    fn flags(self) -> (bool, bool) {
        match self {
            CouplingTerms::Both => (true, true),
            CouplingTerms::HoppingOnly => (true, false),
            CouplingTerms::InteractionOnly => (false, true),
        }
    }
}

/// Real symmetric operator holding its upper triangle (diagonal included),
/// sorted by `(row, col)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
    basis: BasisTag,
}

impl SparseOperator {
    pub fn zero(dim: usize, basis: BasisTag) -> Self {
        SparseOperator {
            dim,
            entries: Vec::new(),
            basis,
        }
    }

    /// Builds an operator from a full list of triplets (both triangles, any
    /// order, duplicates summed), checking that it is symmetric.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
        basis: BasisTag,
    ) -> Result<Self> {
        let mut all: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::InvalidArgument(format!(
                    "entry ({r}, {c}) outside dimension {dim}"
                )));
            }
            all.push((r, c, v));
        }
        let merged = merge(all);
        let lookup = |r: usize, c: usize| {
            merged
                .binary_search_by(|&(rr, cc, _)| (rr, cc).cmp(&(r, c)))
                .map(|k| merged[k].2)
                .unwrap_or(0.0)
        };
        let mut asymmetry = 0.0f64;
        for &(r, c, v) in &merged {
            if r != c {
                asymmetry = asymmetry.max((v - lookup(c, r)).abs());
            }
        }
        if asymmetry > 0.0 {
            return Err(Error::NotHermitian { asymmetry });
        }
        let entries = merged.into_iter().filter(|&(r, c, _)| r <= c).collect();
        Ok(SparseOperator {
            dim,
            entries,
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    /// Upper-triangle entries `(row, col, value)` with `row <= col`.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Every stored entry and its mirror image.
    pub fn full_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().flat_map(|&(r, c, v)| {
            let mirror = (r != c).then_some((c, r, v));
            core::iter::once((r, c, v)).chain(mirror)
        })
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.dim, self.dim);
        for (r, c, v) in self.full_triplets() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, e| m.max(e.2.abs()))
    }

    pub fn trace(&self) -> f64 {
        self.entries.iter().filter(|e| e.0 == e.1).map(|e| e.2).sum()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = alloc::vec![0.0; self.dim];
        for (r, c, v) in self.full_triplets() {
            y[r] += v * x[c];
        }
        y
    }

    pub fn apply_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = alloc::vec![Complex64::default(); self.dim];
        for (r, c, v) in self.full_triplets() {
            y[r] += x[c] * v;
        }
        y
    }

    /// `⟨x|H|x⟩` for a complex vector.
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        let hx = self.apply_complex(x);
        x.iter().zip(&hx).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Entrywise sum of operators on the same basis.
    pub fn sum<'a>(ops: impl IntoIterator<Item = &'a SparseOperator>) -> Result<SparseOperator> {
        let mut iter = ops.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty operator sum".into()))?;
        let mut all = first.entries.clone();
        for op in iter {
            if op.basis != first.basis || op.dim != first.dim {
                return Err(Error::BasisMismatch(format!(
                    "{:?} vs {:?}",
                    op.basis, first.basis
                )));
            }
            all.extend_from_slice(&op.entries);
        }
        Ok(SparseOperator {
            dim: first.dim,
            entries: merge(all),
            basis: first.basis,
        })
    }
}

fn merge(mut all: Vec<(usize, usize, f64)>) -> Vec<(usize, usize, f64)> {
    all.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(all.len());
    for (r, c, v) in all {
        match out.last_mut() {
            Some(last) if last.0 == r && last.1 == c => last.2 += v,
            _ => out.push((r, c, v)),
        }
    }
    out
}

/// Core assembly loop over `states` (local bitmasks) and local edges.
fn assemble(
    states: &[u64],
    index_of: impl Fn(u64) -> usize,
    edges: &[(usize, usize, bool, bool)],
    hopping: f64,
    interaction: f64,
    basis: BasisTag,
) -> SparseOperator {
    let mut entries = Vec::new();
    let mut row = Vec::new();
    for (a, &s) in states.iter().enumerate() {
        row.clear();
        let mut pairs = 0u32;
        for &(i, j, hop, int) in edges {
            let (ni, nj) = (s >> i & 1, s >> j & 1);
            if ni == 1 && nj == 1 {
                if int {
                    pairs += 1;
                }
            } else if ni != nj && hop {
                let b = index_of(s ^ (1 << i) ^ (1 << j));
                if a < b {
                    row.push((a, b, -hopping));
                }
            }
        }
        if pairs > 0 {
            entries.push((a, a, interaction * pairs as f64));
        }
        row.sort_by_key(|e| e.1);
        entries.extend_from_slice(&row);
    }
    SparseOperator {
        dim: states.len(),
        entries,
        basis,
    }
}

fn check_sector(lattice: &Lattice, sector: &BasisSector) -> Result<()> {
    if sector.n_sites() != lattice.n_sites() {
        return Err(Error::BasisMismatch(format!(
            "sector has {} sites, lattice has {}",
            sector.n_sites(),
            lattice.n_sites()
        )));
    }
    Ok(())
}

fn build_with_terms(
    lattice: &Lattice,
    sector: &BasisSector,
    edges: &[(Edge, bool, bool)],
) -> Result<SparseOperator> {
    check_sector(lattice, sector)?;
    let local: Vec<_> = edges
        .iter()
        .map(|&(e, h, u)| {
            let (a, b) = e.sites();
            (a, b, h, u)
        })
        .collect();
    Ok(assemble(
        sector.states(),
        |s| sector.rank(s).expect("hopping stays inside the sector"),
        &local,
        lattice.hopping(),
        lattice.interaction(),
        sector.tag(),
    ))
}

/// Hamiltonian of `lattice` on `sector`, restricted to `edge_subset` when
/// given (every edge by default).
pub fn build_hamiltonian(
    lattice: &Lattice,
    sector: &BasisSector,
    edge_subset: Option<&[Edge]>,
) -> Result<SparseOperator> {
    let edges = match edge_subset {
        Some(subset) => {
            if let Some(e) = subset.iter().find(|e| !lattice.contains_edge(**e)) {
                return Err(Error::InvalidArgument(format!(
                    "edge {:?} is not part of the lattice",
                    e.sites()
                )));
            }
            subset
        }
        None => lattice.edges(),
    };
    let tagged: Vec<_> = edges.iter().map(|&e| (e, true, true)).collect();
    build_with_terms(lattice, sector, &tagged)
}

/// `H_S`, `H_B` and `H_I` on the full sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitHamiltonian {
    pub system: SparseOperator,
    pub bath: SparseOperator,
    pub coupling: SparseOperator,
}

impl SplitHamiltonian {
    /// `H_S + H_B`, the Hamiltonian before the coupling is switched on.
    pub fn uncoupled(&self) -> SparseOperator {
        SparseOperator::sum([&self.system, &self.bath]).expect("same basis")
    }

    /// `H_S + H_B + H_I`, the post-quench Hamiltonian.
    pub fn total(&self) -> SparseOperator {
        SparseOperator::sum([&self.system, &self.bath, &self.coupling]).expect("same basis")
    }
}

pub fn split_hamiltonian(
    lattice: &Lattice,
    bipartition: &Bipartition,
    sector: &BasisSector,
    coupling_terms: CouplingTerms,
) -> Result<SplitHamiltonian> {
    if bipartition.n_sites() != lattice.n_sites() {
        return Err(Error::BasisMismatch(format!(
            "bipartition covers {} sites, lattice has {}",
            bipartition.n_sites(),
            lattice.n_sites()
        )));
    }
    let full = |edges: Vec<Edge>| -> Vec<(Edge, bool, bool)> {
        edges.into_iter().map(|e| (e, true, true)).collect()
    };
    let (hop, int) = coupling_terms.flags();
    let coupling: Vec<_> = bipartition
        .coupling_edges()
        .iter()
        .map(|&e| (e, hop, int))
        .collect();
    Ok(SplitHamiltonian {
        system: build_with_terms(lattice, sector, &full(bipartition.system_edges(lattice)))?,
        bath: build_with_terms(lattice, sector, &full(bipartition.bath_edges(lattice)))?,
        coupling: build_with_terms(lattice, sector, &coupling)?,
    })
}

/// `H_S` on the whole subsystem Fock space (every particle number).
pub fn subsystem_hamiltonian(
    lattice: &Lattice,
    bipartition: &Bipartition,
    fock: &SubsystemFockSpace,
) -> Result<SparseOperator> {
    if fock.sites() != bipartition.system_sites() {
        return Err(Error::BasisMismatch(format!(
            "Fock space sites {:?} differ from system sites {:?}",
            fock.sites(),
            bipartition.system_sites()
        )));
    }
    let sys = bipartition.system_lattice(lattice)?;
    let edges: Vec<_> = sys
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = e.sites();
            (a, b, true, true)
        })
        .collect();
    Ok(assemble(
        fock.masks(),
        |m| fock.index_of(m),
        &edges,
        sys.hopping(),
        sys.interaction(),
        fock.tag(),
    ))
}
