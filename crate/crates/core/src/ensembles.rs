//! Statistical reference states built from a spectral decomposition, and the
//! inverse-temperature solver.
//!
//! Every ensemble here is diagonal in some eigenbasis. The `*_weights`
//! functions expose the eigenstate populations directly, which lets callers
//! reduce a large ensemble to a subsystem without forming the full matrix.

use alloc::vec::Vec;

use faer::Mat;
use num_complex::Complex64;

use crate::hamiltonian::SparseOperator;
use crate::hilbert::SubsystemFockSpace;
use crate::spectral::SpectralDecomposition;
use crate::{linalg, DensityMatrix, Error, Result};

/// Default half-width of the microcanonical window, in units of `J`.
pub const DEFAULT_DELTA_E: f64 = 0.1;

/// Eigenbasis amplitudes `C_α = ⟨Ψ_α|ψ⟩` of a state and its mean energy.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapVector {
    pub coefficients: Vec<Complex64>,
    pub energy: f64,
}

impl OverlapVector {
    /// `|C_α|²`.
    pub fn populations(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Inverse participation ratio of the populations: the effective number
    /// of eigenstates taking part in the dynamics.
    pub fn participation(&self) -> f64 {
        let sum_sq: f64 = self.coefficients.iter().map(|c| c.norm_sqr() * c.norm_sqr()).sum();
        1.0 / sum_sq
    }
}

/// Expands a normalized state (in the decomposition's basis) over the
/// eigenvectors.
pub fn expand_initial(psi: &[Complex64], eig: &SpectralDecomposition) -> Result<OverlapVector> {
    if psi.len() != eig.dim() {
        return Err(Error::BasisMismatch(alloc::format!(
            "state of length {} vs spectrum of dimension {}",
            psi.len(),
            eig.dim()
        )));
    }
    let norm = linalg::norm_sqr(psi);
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(norm));
    }
    let coefficients = linalg::real_transpose_times_complex(eig.vectors(), psi);
    let energy = coefficients
        .iter()
        .zip(eig.values())
        .map(|(c, e)| c.norm_sqr() * e)
        .sum();
    Ok(OverlapVector {
        coefficients,
        energy,
    })
}

/// Equal weights on every level with `|E_α − E₀| < ΔE`.
pub fn microcanonical_weights(values: &[f64], e0: f64, delta_e: f64) -> Result<Vec<f64>> {
    if !(delta_e > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "window half-width must be positive, got {delta_e}"
        )));
    }
    let inside = |e: f64| (e - e0).abs() < delta_e;
    let count = values.iter().filter(|&&e| inside(e)).count();
    if count == 0 {
        let nearest = values
            .iter()
            .copied()
            .min_by(|a, b| (a - e0).abs().total_cmp(&(b - e0).abs()))
            .ok_or_else(|| Error::InvalidArgument("empty spectrum".into()))?;
        return Err(Error::EmptyWindow {
            e0,
            delta_e,
            nearest,
            suggested: 1.5 * (nearest - e0).abs(),
        });
    }
    let w = 1.0 / count as f64;
    Ok(values.iter().map(|&e| if inside(e) { w } else { 0.0 }).collect())
}

/// Normalized Boltzmann weights, shifted by the extreme level to avoid
/// overflow at either sign of `beta`.
pub fn canonical_weights(values: &[f64], beta: f64) -> Vec<f64> {
    let shift = if beta >= 0.0 {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    let raw: Vec<f64> = values.iter().map(|&e| libm::exp(-beta * (e - shift))).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// `⟨H⟩` in the canonical state at inverse temperature `beta`.
pub fn canonical_energy(values: &[f64], beta: f64) -> f64 {
    canonical_weights(values, beta)
        .iter()
        .zip(values)
        .map(|(w, e)| w * e)
        .sum()
}

/// Mixture `Σ_α w_α |Ψ_α⟩⟨Ψ_α|`.
pub fn eigen_mixture(eig: &SpectralDecomposition, weights: &[f64]) -> DensityMatrix {
    DensityMatrix::from_parts(
        linalg::weighted_projector_sum(eig.vectors(), weights),
        eig.basis(),
    )
}

pub fn microcanonical(eig: &SpectralDecomposition, e0: f64, delta_e: f64) -> Result<DensityMatrix> {
    let weights = microcanonical_weights(eig.values(), e0, delta_e)?;
    Ok(eigen_mixture(eig, &weights))
}

pub fn canonical(eig: &SpectralDecomposition, beta: f64) -> Result<DensityMatrix> {
    if !beta.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("beta must be finite, got {beta}")));
    }
    Ok(eigen_mixture(eig, &canonical_weights(eig.values(), beta)))
}

/// The diagonal ensemble `Σ_α |C_α|² |Ψ_α⟩⟨Ψ_α|`, the infinite-time average
/// of a pure state for a non-degenerate spectrum.
pub fn diagonal_ensemble(eig: &SpectralDecomposition, overlaps: &OverlapVector) -> Result<DensityMatrix> {
    let populations = overlaps.populations();
    let total: f64 = populations.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(total));
    }
    Ok(eigen_mixture(eig, &populations))
}

/// Controls for [`solve_beta`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaSolverOptions {
    /// Required accuracy of the energy, in units of `J`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Search range is `[−cap, cap]`; `None` means `50 / (E_max − E_min)`.
    pub cap: Option<f64>,
}

impl Default for BetaSolverOptions {
    fn default() -> Self {
        BetaSolverOptions {
            tolerance: 1e-8,
            max_iterations: 400,
            cap: None,
        }
    }
}

/// Finds `β` such that the canonical energy equals `target`, by bisection on
/// the strictly decreasing map `β ↦ ⟨H⟩_β`.
///
/// Targets above the mean level give negative `β`. The bracket is bisected
/// to machine precision; the tolerance is checked at the end.
pub fn solve_beta(values: &[f64], target: f64, options: BetaSolverOptions) -> Result<f64> {
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if !(target > min && target < max) {
        return Err(Error::UnreachableEnergy { target, min, max });
    }
    let cap = options.cap.unwrap_or(50.0 / (max - min));
    let f = |beta: f64| canonical_energy(values, beta) - target;
    let (mut lo, mut hi) = (-cap, cap);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo < 0.0 || f_hi > 0.0 {
        let residual = if f_lo < 0.0 { f_lo } else { f_hi };
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: residual.abs(),
        });
    }
    let mut iterations = 0;
    while iterations < options.max_iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let (r_lo, r_hi) = (f(lo).abs(), f(hi).abs());
    let (beta, residual) = if r_lo <= r_hi { (lo, r_lo) } else { (hi, r_hi) };
    if residual < options.tolerance {
        Ok(beta)
    } else {
        Err(Error::NoConvergence {
            iterations,
            residual,
        })
    }
}

/// Eigendecomposition of a block-diagonal Fock-space operator, one block per
/// particle number.
#[derive(Clone, Debug)]
pub struct BlockSpectrum {
    /// `(particle number, offset, values, vectors)` per block.
    pub blocks: Vec<(usize, usize, Vec<f64>, Mat<f64>)>,
}

impl BlockSpectrum {
    pub fn new(h_s: &SparseOperator, fock: &SubsystemFockSpace) -> Result<Self> {
        if h_s.basis() != fock.tag() || h_s.dim() != fock.dim() {
            return Err(Error::BasisMismatch(alloc::format!(
                "operator on {:?} vs Fock space {:?}",
                h_s.basis(),
                fock.tag()
            )));
        }
        let dense = h_s.to_dense();
        let mut blocks = Vec::new();
        for n in 0..=fock.n_sites() {
            let range = fock.block(n);
            let block = dense.as_ref().submatrix(range.start, range.start, range.len(), range.len());
            let (values, vectors) = linalg::symmetric_eigen(block)?;
            blocks.push((n, range.start, values, vectors));
        }
        Ok(BlockSpectrum { blocks })
    }
}

/// `e^{−β(H_S − μ N_S)} / Z` on the whole subsystem Fock space. With
/// `mu = None` no chemical potential is applied.
pub fn thermal_subsystem(
    h_s: &SparseOperator,
    fock: &SubsystemFockSpace,
    beta: f64,
    mu: Option<f64>,
) -> Result<DensityMatrix> {
    if !beta.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("beta must be finite, got {beta}")));
    }
    let spectrum = BlockSpectrum::new(h_s, fock)?;
    let mu = mu.unwrap_or(0.0);
    let exponents: Vec<Vec<f64>> = spectrum
        .blocks
        .iter()
        .map(|(n, _, values, _)| values.iter().map(|e| -beta * (e - mu * *n as f64)).collect())
        .collect();
    let shift = exponents.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = exponents.iter().flatten().map(|x| libm::exp(x - shift)).sum();
    let dim = fock.dim();
    let mut rho = Mat::<Complex64>::zeros(dim, dim);
    for ((_, offset, _, vectors), block_exponents) in spectrum.blocks.iter().zip(&exponents) {
        let weights: Vec<f64> = block_exponents.iter().map(|x| libm::exp(x - shift) / z).collect();
        let block = linalg::weighted_projector_sum(vectors.as_ref(), &weights);
        let k = weights.len();
        for j in 0..k {
            for i in 0..k {
                rho[(offset + i, offset + j)] = block[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::from_parts(rho, fock.tag()))
}
