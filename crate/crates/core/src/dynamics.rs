//! Exact time evolution in the eigenbasis of the post-quench Hamiltonian,
//! and the product initial states used by the experiments.
//!
//! Times are in units of `1/J` with `ħ = 1`. A mixed state is kept as a
//! weighted set of orthonormal-or-not pure components expressed in the
//! eigenbasis, `ρ = Σ_k w_k |φ_k⟩⟨φ_k|`, so evolving it only multiplies each
//! component by phases. The dense eigenbasis matrix `ρ̃` is available on
//! request through [`EvolvingState::eigenbasis_matrix`].

use alloc::vec::Vec;

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::ensembles::{canonical_weights, expand_initial, OverlapVector};
use crate::hamiltonian::{build_hamiltonian, SplitHamiltonian};
use crate::hilbert::{split_state, BasisSector};
use crate::lattice::{Bipartition, Lattice};
use crate::reduction::{GlobalState, PartialTrace, ReducedState};
use crate::spectral::SpectralDecomposition;
use crate::{linalg, DensityMatrix, Error, Result};

/// Default observation window and step of a quench run.
pub const DEFAULT_T_MAX: f64 = 200.0;
pub const DEFAULT_DT: f64 = 0.5;
/// Start of the window regarded as relaxed.
pub const RELAXED_FROM: f64 = 100.0;

/// Relative gap under which a subsystem ground state counts as degenerate.
const DEGENERACY_GAP: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum StateKind {
    Pure(OverlapVector),
    Mixed {
        weights: Vec<f64>,
        /// Components in the eigenbasis, one per column.
        components: Mat<Complex64>,
    },
}

/// A state evolving under the Hamiltonian whose spectrum it refers to.
#[derive(Clone, Debug)]
pub struct EvolvingState<'a> {
    eig: &'a SpectralDecomposition,
    kind: StateKind,
}

/// A state at one instant, written in the occupation basis.
#[derive(Clone, Debug)]
pub enum SiteState {
    Pure(Vec<Complex64>),
    Mixed {
        weights: Vec<f64>,
        components: Mat<Complex64>,
    },
}

impl SiteState {
    pub fn as_global(&self) -> GlobalState<'_> {
        match self {
            SiteState::Pure(psi) => GlobalState::Pure(psi),
            SiteState::Mixed { weights, components } => GlobalState::Mixture {
                weights,
                components: components.as_ref(),
            },
        }
    }
}

impl<'a> EvolvingState<'a> {
    /// Pure state from its occupation-basis amplitudes.
    pub fn pure(eig: &'a SpectralDecomposition, psi: &[Complex64]) -> Result<Self> {
        Ok(EvolvingState {
            eig,
            kind: StateKind::Pure(expand_initial(psi, eig)?),
        })
    }

    pub fn from_overlaps(eig: &'a SpectralDecomposition, overlaps: OverlapVector) -> Result<Self> {
        if overlaps.coefficients.len() != eig.dim() {
            return Err(Error::BasisMismatch(alloc::format!(
                "{} overlaps for a spectrum of dimension {}",
                overlaps.coefficients.len(),
                eig.dim()
            )));
        }
        Ok(EvolvingState {
            eig,
            kind: StateKind::Pure(overlaps),
        })
    }

    /// Mixture of normalized occupation-basis columns with probability
    /// weights.
    pub fn mixture(
        eig: &'a SpectralDecomposition,
        weights: &[f64],
        components: MatRef<'_, Complex64>,
    ) -> Result<Self> {
        if components.nrows() != eig.dim() || components.ncols() != weights.len() {
            return Err(Error::BasisMismatch(alloc::format!(
                "{}x{} components for {} weights on dimension {}",
                components.nrows(),
                components.ncols(),
                weights.len(),
                eig.dim()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidDensity("mixture weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(total));
        }
        for k in 0..components.ncols() {
            let norm: f64 = components.col(k).iter().map(|z| z.norm_sqr()).sum();
            if (norm - 1.0).abs() > 1e-8 {
                return Err(Error::NotNormalized(norm));
            }
        }
        let in_eigenbasis = linalg::real_times_complex_mat(eig.vectors().transpose(), components);
        Ok(EvolvingState {
            eig,
            kind: StateKind::Mixed {
                weights: weights.to_vec(),
                components: in_eigenbasis,
            },
        })
    }

    /// Mixed state from a density matrix on the spectrum's basis, split into
    /// its eigenvectors.
    pub fn from_density(eig: &'a SpectralDecomposition, rho: &DensityMatrix) -> Result<Self> {
        if rho.basis() != eig.basis() {
            return Err(Error::BasisMismatch(alloc::format!(
                "state on {:?}, spectrum on {:?}",
                rho.basis(),
                eig.basis()
            )));
        }
        let (values, vectors) = rho.eigen()?;
        let keep: Vec<usize> = (0..values.len()).filter(|&k| values[k] > 1e-15).collect();
        let total: f64 = keep.iter().map(|&k| values[k]).sum();
        let weights: Vec<f64> = keep.iter().map(|&k| values[k] / total).collect();
        let columns = Mat::from_fn(rho.dim(), keep.len(), |i, k| vectors[(i, keep[k])]);
        Self::mixture(eig, &weights, columns.as_ref())
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        self.eig
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.kind, StateKind::Pure(_))
    }

    /// Conserved eigenstate populations `⟨Ψ_α|ρ|Ψ_α⟩`.
    pub fn populations(&self) -> Vec<f64> {
        match &self.kind {
            StateKind::Pure(overlaps) => overlaps.populations(),
            StateKind::Mixed { weights, components } => (0..self.eig.dim())
                .map(|a| {
                    weights
                        .iter()
                        .enumerate()
                        .map(|(k, w)| w * components[(a, k)].norm_sqr())
                        .sum()
                })
                .collect(),
        }
    }

    /// Conserved energy `tr(ρH)`.
    pub fn energy(&self) -> f64 {
        self.populations().iter().zip(self.eig.values()).map(|(p, e)| p * e).sum()
    }

    /// `ρ̃_αβ = ⟨Ψ_α|ρ(0)|Ψ_β⟩`.
    pub fn eigenbasis_matrix(&self) -> Mat<Complex64> {
        let d = self.eig.dim();
        match &self.kind {
            StateKind::Pure(overlaps) => {
                let c = &overlaps.coefficients;
                Mat::from_fn(d, d, |a, b| c[a] * c[b].conj())
            }
            StateKind::Mixed { weights, components } => {
                let scaled = Mat::from_fn(d, weights.len(), |a, k| components[(a, k)] * weights[k]);
                linalg::mul_complex(scaled.as_ref(), linalg::adjoint(components.as_ref()).as_ref())
            }
        }
    }

    fn phases(&self, t: f64) -> Vec<Complex64> {
        self.eig
            .values()
            .iter()
            .map(|&e| {
                let (s, c) = libm::sincos(-e * t);
                Complex64::new(c, s)
            })
            .collect()
    }

    /// The state at time `t` in the occupation basis.
    pub fn site_state(&self, t: f64) -> SiteState {
        let phases = self.phases(t);
        match &self.kind {
            StateKind::Pure(overlaps) => {
                let rotated: Vec<Complex64> = overlaps
                    .coefficients
                    .iter()
                    .zip(&phases)
                    .map(|(c, p)| c * p)
                    .collect();
                SiteState::Pure(linalg::real_times_complex(self.eig.vectors(), &rotated))
            }
            StateKind::Mixed { weights, components } => {
                let rotated = Mat::from_fn(components.nrows(), components.ncols(), |a, k| {
                    components[(a, k)] * phases[a]
                });
                SiteState::Mixed {
                    weights: weights.clone(),
                    components: linalg::real_times_complex_mat(self.eig.vectors(), rotated.as_ref()),
                }
            }
        }
    }

    /// Eigenbasis representation after evolving for `t`, as a new state.
    pub fn advanced(&self, t: f64) -> EvolvingState<'a> {
        let phases = self.phases(t);
        let kind = match &self.kind {
            StateKind::Pure(overlaps) => StateKind::Pure(OverlapVector {
                coefficients: overlaps.coefficients.iter().zip(&phases).map(|(c, p)| c * p).collect(),
                energy: overlaps.energy,
            }),
            StateKind::Mixed { weights, components } => StateKind::Mixed {
                weights: weights.clone(),
                components: Mat::from_fn(components.nrows(), components.ncols(), |a, k| {
                    components[(a, k)] * phases[a]
                }),
            },
        };
        EvolvingState { eig: self.eig, kind }
    }
}

/// `Σ_α C_α e^{−iE_α t} |Ψ_α⟩` in the occupation basis.
pub fn evolve_pure(state: &EvolvingState<'_>, t: f64) -> Result<Vec<Complex64>> {
    match state.site_state(t) {
        SiteState::Pure(psi) => Ok(psi),
        SiteState::Mixed { .. } => Err(Error::InvalidArgument(
            "evolve_pure called on a mixed state".into(),
        )),
    }
}

/// `ρ(t)` as a dense matrix in the occupation basis; accepts pure states too.
pub fn evolve_mixed(state: &EvolvingState<'_>, t: f64) -> Result<DensityMatrix> {
    let basis = state.eig.basis();
    match state.site_state(t) {
        SiteState::Pure(psi) => DensityMatrix::pure(&psi, basis),
        SiteState::Mixed { weights, components } => {
            let d = components.nrows();
            let scaled = Mat::from_fn(d, weights.len(), |i, k| components[(i, k)] * weights[k]);
            Ok(DensityMatrix::from_parts(
                linalg::mul_complex(scaled.as_ref(), linalg::adjoint(components.as_ref()).as_ref()),
                basis,
            ))
        }
    }
}

/// `tr_B ρ(t)`.
pub fn reduced_at(state: &EvolvingState<'_>, trace: &PartialTrace, t: f64) -> Result<ReducedState> {
    trace.reduce(state.site_state(t).as_global())
}

/// Uniform-grid average of `tr_B ρ(t)` over `n_samples` points spanning
/// `[t0, t1]`, endpoints included.
pub fn time_average_reduced(
    state: &EvolvingState<'_>,
    trace: &PartialTrace,
    t0: f64,
    t1: f64,
    n_samples: usize,
) -> Result<ReducedState> {
    if !(t1 > t0) || t0 < 0.0 || n_samples < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "averaging needs 0 <= t0 < t1 and at least two samples, got [{t0}, {t1}] with {n_samples}"
        )));
    }
    let dim = trace.fock().dim();
    let mut sum = Mat::<Complex64>::zeros(dim, dim);
    let mut block_sum = alloc::vec![0.0; trace.fock().n_sites() + 1];
    let step = (t1 - t0) / (n_samples - 1) as f64;
    for k in 0..n_samples {
        let reduced = reduced_at(state, trace, t0 + k as f64 * step)?;
        let m = reduced.density.matrix();
        for j in 0..dim {
            for i in 0..dim {
                sum[(i, j)] += m[(i, j)];
            }
        }
        for (acc, w) in block_sum.iter_mut().zip(&reduced.block_weights) {
            *acc += w;
        }
    }
    let scale = 1.0 / n_samples as f64;
    Ok(ReducedState {
        density: DensityMatrix::from_parts(
            Mat::from_fn(dim, dim, |i, j| sum[(i, j)] * scale),
            trace.fock().tag(),
        ),
        block_weights: block_sum.into_iter().map(|w| w * scale).collect(),
    })
}

/// Eigendecomposition of the Hamiltonian of one side of the cut on its own
/// fixed-number sector.
fn side_spectrum(side: &Lattice, n_particles: usize) -> Result<(BasisSector, SpectralDecomposition)> {
    let sector = BasisSector::new(side.n_sites(), n_particles)?;
    let h = build_hamiltonian(side, &sector, None)?;
    let eig = SpectralDecomposition::diagonalize(&h)?;
    Ok((sector, eig))
}

/// For each full-sector basis state, its `(system index, bath index)` in the
/// two side sectors, or `None` when its particle split differs.
fn product_index_map(
    sector: &BasisSector,
    bipartition: &Bipartition,
    system: &BasisSector,
    bath: &BasisSector,
) -> Vec<Option<(usize, usize)>> {
    sector
        .states()
        .iter()
        .map(|&state| {
            let (s, b) = split_state(state, bipartition);
            (s.count_ones() as usize == system.n_particles())
                .then(|| (system.rank(s).expect("popcount checked"), bath.rank(b).expect("popcount checked")))
        })
        .collect()
}

fn check_split(sector: &BasisSector, bipartition: &Bipartition, n_system: usize, n_bath: usize) -> Result<()> {
    if n_system + n_bath != sector.n_particles() || sector.n_sites() != bipartition.n_sites() {
        return Err(Error::InvalidArgument(alloc::format!(
            "split {n_system}+{n_bath} does not fit the sector ({} sites, {} particles)",
            sector.n_sites(),
            sector.n_particles()
        )));
    }
    Ok(())
}

/// Product of subsystem ground states and the energies that characterise it.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductInitial {
    /// Real amplitudes on the full sector.
    pub psi: Vec<f64>,
    pub system_energy: f64,
    pub bath_energy: f64,
    /// `⟨ψ|H|ψ⟩` with the coupling switched on.
    pub total_energy: f64,
    /// `⟨ψ|H_I|ψ⟩`.
    pub coupling_energy: f64,
    /// Set when either ground state is degenerate; the lowest-index
    /// eigenvector was used.
    pub degenerate: bool,
}

impl ProductInitial {
    pub fn complex(&self) -> Vec<Complex64> {
        self.psi.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }
}

/// `|g_S⟩ ⊗ |g_B⟩` with `n_system` bosons in the system and `n_bath` in the
/// bath, embedded in `sector`.
pub fn product_pure_initial(
    lattice: &Lattice,
    bipartition: &Bipartition,
    sector: &BasisSector,
    split: &SplitHamiltonian,
    n_system: usize,
    n_bath: usize,
) -> Result<ProductInitial> {
    check_split(sector, bipartition, n_system, n_bath)?;
    let (sys_sector, sys_eig) = side_spectrum(&bipartition.system_lattice(lattice)?, n_system)?;
    let (bath_sector, bath_eig) = side_spectrum(&bipartition.bath_lattice(lattice)?, n_bath)?;
    let degenerate = |eig: &SpectralDecomposition| {
        let v = eig.values();
        v.len() > 1 && v[1] - v[0] < DEGENERACY_GAP * v[0].abs().max(1.0)
    };
    let (g_s, g_b) = (sys_eig.vector(0), bath_eig.vector(0));
    let psi: Vec<f64> = product_index_map(sector, bipartition, &sys_sector, &bath_sector)
        .into_iter()
        .map(|ix| ix.map_or(0.0, |(i, j)| g_s[i] * g_b[j]))
        .collect();
    let complex: Vec<Complex64> = psi.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok(ProductInitial {
        system_energy: sys_eig.values()[0],
        bath_energy: bath_eig.values()[0],
        total_energy: split.total().expectation(&complex),
        coupling_energy: split.coupling.expectation(&complex),
        degenerate: degenerate(&sys_eig) || degenerate(&bath_eig),
        psi,
    })
}

/// `[e^{−β_S H_S}/Z_S] ⊗ [e^{−β_B H_B}/Z_B]`, each factor on its own
/// fixed-number sector, embedded in `sector` and prepared for evolution
/// under `eig`.
#[allow(clippy::too_many_arguments)]
pub fn product_thermal_initial<'a>(
    lattice: &Lattice,
    bipartition: &Bipartition,
    sector: &BasisSector,
    eig: &'a SpectralDecomposition,
    n_system: usize,
    n_bath: usize,
    beta_system: f64,
    beta_bath: f64,
) -> Result<EvolvingState<'a>> {
    check_split(sector, bipartition, n_system, n_bath)?;
    if eig.basis() != sector.tag() {
        return Err(Error::BasisMismatch(alloc::format!(
            "spectrum on {:?}, sector {:?}",
            eig.basis(),
            sector.tag()
        )));
    }
    let (sys_sector, sys_eig) = side_spectrum(&bipartition.system_lattice(lattice)?, n_system)?;
    let (bath_sector, bath_eig) = side_spectrum(&bipartition.bath_lattice(lattice)?, n_bath)?;
    let w_s = canonical_weights(sys_eig.values(), beta_system);
    let w_b = canonical_weights(bath_eig.values(), beta_bath);
    let map = product_index_map(sector, bipartition, &sys_sector, &bath_sector);
    let (ns, nb) = (w_s.len(), w_b.len());
    let weights: Vec<f64> = (0..ns * nb).map(|k| w_s[k / nb] * w_b[k % nb]).collect();
    let columns = Mat::from_fn(sector.dim(), ns * nb, |a, k| match map[a] {
        Some((i, j)) => sys_eig.vectors()[(i, k / nb)] * bath_eig.vectors()[(j, k % nb)],
        None => 0.0,
    });
    let in_eigenbasis = linalg::mul_real(eig.vectors().transpose(), columns.as_ref());
    let components = Mat::from_fn(sector.dim(), ns * nb, |a, k| Complex64::new(in_eigenbasis[(a, k)], 0.0));
    Ok(EvolvingState {
        eig,
        kind: StateKind::Mixed { weights, components },
    })
}
