//! Reduced density matrices and the measures computed on them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::density::DENSITY_TOL;
use crate::hamiltonian::SparseOperator;
use crate::hilbert::{split_state, BasisSector, SubsystemFockSpace};
use crate::lattice::Bipartition;
use crate::{linalg, BasisTag, DensityMatrix, Error, Result};

/// Eigenvalues below this are dropped from entropy sums.
pub const ENTROPY_CLIP: f64 = 1e-14;
/// Eigenvalues of a reduced state at most this far apart are treated as one
/// degenerate cluster by [`energy_resolved_profile`].
pub const DEGENERACY_TOL: f64 = 1e-11;

/// A state of the whole lattice on a fixed-particle-number sector, in one of
/// the representations the pipeline produces.
#[derive(Clone, Copy, Debug)]
pub enum GlobalState<'a> {
    Pure(&'a [Complex64]),
    /// `Σ_k w_k |φ_k⟩⟨φ_k|` with the `φ_k` as columns.
    Mixture {
        weights: &'a [f64],
        components: MatRef<'a, Complex64>,
    },
    /// Same as `Mixture` with real components, typically eigenvectors.
    RealMixture {
        weights: &'a [f64],
        components: MatRef<'a, f64>,
    },
    Density(&'a DensityMatrix),
}

impl GlobalState<'_> {
    fn dim(&self) -> usize {
        match self {
            GlobalState::Pure(psi) => psi.len(),
            GlobalState::Mixture { components, .. } => components.nrows(),
            GlobalState::RealMixture { components, .. } => components.nrows(),
            GlobalState::Density(rho) => rho.dim(),
        }
    }

    fn check(&self, sector: &BasisSector) -> Result<()> {
        if let GlobalState::Density(rho) = self {
            if rho.basis() != sector.tag() {
                return Err(Error::BasisMismatch(format!(
                    "state on {:?}, expected {:?}",
                    rho.basis(),
                    sector.tag()
                )));
            }
        }
        let weights_len = match self {
            GlobalState::Mixture { weights, components } => Some((weights.len(), components.ncols())),
            GlobalState::RealMixture { weights, components } => Some((weights.len(), components.ncols())),
            _ => None,
        };
        if let Some((w, c)) = weights_len {
            if w > c {
                return Err(Error::InvalidArgument(format!("{w} weights for {c} components")));
            }
        }
        if self.dim() != sector.dim() {
            return Err(Error::BasisMismatch(format!(
                "state of dimension {} on a sector of dimension {}",
                self.dim(),
                sector.dim()
            )));
        }
        Ok(())
    }

    /// `⟨a|ρ|b⟩`.
    fn element(&self, a: usize, b: usize) -> Complex64 {
        match *self {
            GlobalState::Pure(psi) => psi[a] * psi[b].conj(),
            GlobalState::Mixture { weights, components } => weights
                .iter()
                .enumerate()
                .map(|(k, &w)| components[(a, k)] * components[(b, k)].conj() * w)
                .sum(),
            GlobalState::RealMixture { weights, components } => Complex64::new(
                weights
                    .iter()
                    .enumerate()
                    .map(|(k, &w)| w * components[(a, k)] * components[(b, k)])
                    .sum(),
                0.0,
            ),
            GlobalState::Density(rho) => rho.get(a, b),
        }
    }
}

/// Reduced state of the subsystem with the probability of each particle
/// number block.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState {
    pub density: DensityMatrix,
    pub block_weights: Vec<f64>,
}

impl ReducedState {
    fn from_matrix(matrix: Mat<Complex64>, fock: &SubsystemFockSpace) -> Self {
        let block_weights = (0..=fock.n_sites())
            .map(|n| fock.block(n).map(|i| matrix[(i, i)].re).sum())
            .collect();
        ReducedState {
            density: DensityMatrix::from_parts(matrix, fock.tag()),
            block_weights,
        }
    }
}

/// Precomputed bookkeeping for `tr_B` from one sector onto the subsystem
/// Fock space: basis states grouped by their bath configuration.
#[derive(Clone, Debug)]
pub struct PartialTrace {
    sector: BasisSector,
    fock: SubsystemFockSpace,
    /// Per bath configuration: `(sector index, Fock index)` pairs.
    groups: Vec<Vec<(usize, usize)>>,
}

impl PartialTrace {
    pub fn new(sector: &BasisSector, bipartition: &Bipartition) -> Result<Self> {
        if sector.n_sites() != bipartition.n_sites() {
            return Err(Error::BasisMismatch(format!(
                "sector on {} sites, bipartition on {}",
                sector.n_sites(),
                bipartition.n_sites()
            )));
        }
        let fock = SubsystemFockSpace::for_system(bipartition)?;
        let mut by_bath: BTreeMap<u64, Vec<(usize, usize)>> = BTreeMap::new();
        for (a, &state) in sector.states().iter().enumerate() {
            let (s, b) = split_state(state, bipartition);
            by_bath.entry(b).or_default().push((a, fock.index_of(s)));
        }
        Ok(PartialTrace {
            sector: sector.clone(),
            fock,
            groups: by_bath.into_values().collect(),
        })
    }

    pub fn fock(&self) -> &SubsystemFockSpace {
        &self.fock
    }

    pub fn sector(&self) -> &BasisSector {
        &self.sector
    }

    pub fn reduce(&self, state: GlobalState<'_>) -> Result<ReducedState> {
        state.check(&self.sector)?;
        let dim = self.fock.dim();
        let mut out = Mat::<Complex64>::zeros(dim, dim);
        match state {
            GlobalState::Mixture { weights, components } => {
                let r = weights.len();
                let mut rows: Vec<Complex64> = Vec::new();
                for group in &self.groups {
                    // gather the group's rows scaled by √w into a dense buffer
                    rows.clear();
                    for &(a, _) in group {
                        rows.extend((0..r).map(|k| components[(a, k)] * libm::sqrt(weights[k])));
                    }
                    self.accumulate(group, &mut out, |x, y| {
                        let (rx, ry) = (&rows[x * r..(x + 1) * r], &rows[y * r..(y + 1) * r]);
                        rx.iter().zip(ry).map(|(p, q)| p * q.conj()).sum()
                    });
                }
            }
            GlobalState::RealMixture { weights, components } => {
                let r = weights.len();
                let mut rows: Vec<f64> = Vec::new();
                for group in &self.groups {
                    rows.clear();
                    for &(a, _) in group {
                        rows.extend((0..r).map(|k| components[(a, k)] * libm::sqrt(weights[k])));
                    }
                    self.accumulate(group, &mut out, |x, y| {
                        let (rx, ry) = (&rows[x * r..(x + 1) * r], &rows[y * r..(y + 1) * r]);
                        Complex64::new(rx.iter().zip(ry).map(|(p, q)| p * q).sum(), 0.0)
                    });
                }
            }
            _ => {
                for group in &self.groups {
                    self.accumulate(group, &mut out, |x, y| state.element(group[x].0, group[y].0));
                }
            }
        }
        Ok(ReducedState::from_matrix(out, &self.fock))
    }

    /// Adds `f(x, y)` to `out[s_x, s_y]` for `x ≤ y` in the group and mirrors.
    fn accumulate(
        &self,
        group: &[(usize, usize)],
        out: &mut Mat<Complex64>,
        f: impl Fn(usize, usize) -> Complex64,
    ) {
        for x in 0..group.len() {
            let sx = group[x].1;
            for y in x..group.len() {
                let sy = group[y].1;
                let v = f(x, y);
                out[(sx, sy)] += v;
                if x != y {
                    out[(sy, sx)] += v.conj();
                }
            }
        }
    }
}

/// One-off partial trace; build a [`PartialTrace`] when reducing many states.
pub fn partial_trace(
    state: GlobalState<'_>,
    sector: &BasisSector,
    bipartition: &Bipartition,
) -> Result<ReducedState> {
    PartialTrace::new(sector, bipartition)?.reduce(state)
}

fn check_same_shape(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::BasisMismatch(format!(
            "dimensions {} and {} differ",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Squared Hilbert–Schmidt distance `tr[(a−b)†(a−b)]`.
pub fn hs_distance_sq(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_shape(a, b)?;
    Ok(hs_distance_sq_raw(a.matrix(), b.matrix()))
}

pub(crate) fn hs_distance_sq_raw(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += (a[(i, j)] - b[(i, j)]).norm_sqr();
        }
    }
    acc
}

/// `½ Σ |λ_k(a − b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_shape(a, b)?;
    let diff = a.linear_combination(1.0, b, -1.0)?;
    let values = linalg::hermitian_eigenvalues(diff.as_ref())?;
    Ok(0.5 * values.iter().map(|v| v.abs()).sum::<f64>())
}

/// Entropy `−Σ λ ln λ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let values = rho.eigenvalues()?;
    if let Some(&lowest) = values.first() {
        if lowest < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lowest:e}")));
        }
    }
    let s: f64 = values
        .iter()
        .filter(|&&l| l > ENTROPY_CLIP)
        .map(|&l| -l * libm::log(l))
        .sum();
    // an eigenvalue of 1 + ε would otherwise give a tiny negative entropy
    Ok(if s > 0.0 { s } else { 0.0 })
}

/// Reduced state of sites `i` and `j` as two qubits, basis index
/// `2 n_i + n_j`.
pub fn two_site_rdm(
    state: GlobalState<'_>,
    sector: &BasisSector,
    i: usize,
    j: usize,
) -> Result<DensityMatrix> {
    if i == j || i >= sector.n_sites() || j >= sector.n_sites() {
        return Err(Error::InvalidArgument(format!("invalid site pair ({i}, {j})")));
    }
    state.check(sector)?;
    let pair_mask = (1u64 << i) | (1u64 << j);
    let qubit_bits = |q: usize| ((q as u64 >> 1) << i) | ((q as u64 & 1) << j);
    let mut rho = Mat::<Complex64>::zeros(4, 4);
    for (a, &s) in sector.states().iter().enumerate() {
        let q = (((s >> i) & 1) << 1 | ((s >> j) & 1)) as usize;
        let rest = s & !pair_mask;
        for q2 in q..4 {
            if (q2 as u32).count_ones() != (q as u32).count_ones() {
                continue;
            }
            let b = if q2 == q { a } else { sector.rank(rest | qubit_bits(q2))? };
            let v = state.element(a, b);
            rho[(q, q2)] += v;
            if q2 != q {
                rho[(q2, q)] += v.conj();
            }
        }
    }
    Ok(DensityMatrix::from_parts(rho, BasisTag::TwoQubit))
}

/// Wootters concurrence of a two-qubit state, in `[0, 1]`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.basis() != BasisTag::TwoQubit || rho.dim() != 4 {
        return Err(Error::BasisMismatch(format!(
            "concurrence needs a two-qubit state, got {:?}",
            rho.basis()
        )));
    }
    let (values, vectors) = rho.eigen()?;
    if values[0] < -DENSITY_TOL {
        return Err(Error::InvalidDensity(format!("negative eigenvalue {:e}", values[0])));
    }
    let sqrt_rho = {
        let scaled = Mat::from_fn(4, 4, |r, k| vectors[(r, k)] * libm::sqrt(values[k].max(0.0)));
        linalg::mul_complex(scaled.as_ref(), linalg::adjoint(vectors.as_ref()).as_ref())
    };
    // σ_y ⊗ σ_y is the anti-diagonal (−1, 1, 1, −1) in this basis
    let flip_sign = [-1.0, 1.0, 1.0, -1.0];
    let flipped = Mat::from_fn(4, 4, |r, c| {
        rho.get(3 - r, 3 - c).conj() * (flip_sign[r] * flip_sign[c])
    });
    let product = linalg::mul_complex(
        linalg::mul_complex(sqrt_rho.as_ref(), flipped.as_ref()).as_ref(),
        sqrt_rho.as_ref(),
    );
    let mut lambdas: Vec<f64> = linalg::hermitian_eigenvalues(product.as_ref())?
        .into_iter()
        .map(|v| libm::sqrt(v.max(0.0)))
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// A point of the energy-resolved profile: an eigenvalue of the reduced
/// state against the energy of its eigenvector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub energy: f64,
    pub weight: f64,
}

/// Eigenvalues of `rho` above `1e-12` paired with `⟨v|H|v⟩` of their
/// eigenvectors, sorted by energy. Inside a degenerate cluster the
/// eigenvectors are chosen to diagonalize `h`.
pub fn energy_resolved_profile(rho: &DensityMatrix, h: &SparseOperator) -> Result<Vec<ProfilePoint>> {
    if rho.basis() != h.basis() || rho.dim() != h.dim() {
        return Err(Error::BasisMismatch(format!(
            "state on {:?} vs operator on {:?}",
            rho.basis(),
            h.basis()
        )));
    }
    let (values, vectors) = rho.eigen()?;
    let dense = h.to_dense();
    let h_complex = Mat::from_fn(h.dim(), h.dim(), |i, j| Complex64::new(dense[(i, j)], 0.0));
    let mut points = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] <= DEGENERACY_TOL {
            end += 1;
        }
        let weight = values[start..end].iter().sum::<f64>() / (end - start) as f64;
        if weight > 1e-12 {
            let cluster = vectors.as_ref().subcols(start, end - start);
            let projected = linalg::mul_complex(
                linalg::adjoint(cluster).as_ref(),
                linalg::mul_complex(h_complex.as_ref(), cluster).as_ref(),
            );
            for energy in linalg::hermitian_eigenvalues(projected.as_ref())? {
                points.push(ProfilePoint { energy, weight });
            }
        }
        start = end;
    }
    points.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(b.weight.total_cmp(&a.weight)));
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::thermal_subsystem;
    use crate::hamiltonian::subsystem_hamiltonian;
    use crate::hilbert::join_state;
    use crate::lattice::{example_lattice, Lattice};
    use alloc::vec;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn two_site() -> (Lattice, Bipartition, BasisSector) {
        let lattice = Lattice::new(2, [(0, 1)], 1.0, 0.1).unwrap();
        let bip = Bipartition::new(&lattice, &[0]).unwrap();
        (lattice, bip, BasisSector::new(2, 1).unwrap())
    }

    #[test]
    fn product_state_reduces_to_projector() {
        let (lattice, bip) = example_lattice("chain_6").unwrap();
        let sector = BasisSector::new(6, 3).unwrap();
        let fock = SubsystemFockSpace::for_system(&bip).unwrap();
        let (s, b) = (0b101, 0b010);
        let mut psi = vec![c(0.0); sector.dim()];
        psi[sector.rank(join_state(s, b, &bip)).unwrap()] = c(1.0);
        let red = partial_trace(GlobalState::Pure(&psi), &sector, &bip).unwrap();
        let k = fock.index_of(s);
        assert_eq!(red.density.get(k, k), c(1.0));
        assert!((red.density.purity() - 1.0).abs() < 1e-15);
        assert_eq!(red.block_weights, vec![0.0, 0.0, 1.0, 0.0]);
        let _ = lattice;
    }

    #[test]
    fn entangled_pair_reduces_to_mixed() {
        let (_, bip, sector) = two_site();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let red = partial_trace(GlobalState::Pure(&[c(s), c(s)]), &sector, &bip).unwrap();
        assert!((red.density.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((red.density.get(1, 1).re - 0.5).abs() < 1e-15);
        assert_eq!(red.density.get(0, 1), c(0.0));
    }

    #[test]
    fn representations_agree() {
        let (_, bip) = example_lattice("ladder_3").unwrap();
        let sector = BasisSector::new(6, 3).unwrap();
        let d = sector.dim();
        let psi: Vec<Complex64> = (0..d)
            .map(|k| Complex64::new(libm::sin(k as f64 + 0.3), libm::cos(2.0 * k as f64)))
            .collect();
        let norm = libm::sqrt(linalg::norm_sqr(&psi));
        let psi: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        let pt = PartialTrace::new(&sector, &bip).unwrap();
        let pure = pt.reduce(GlobalState::Pure(&psi)).unwrap();
        let rho = DensityMatrix::pure(&psi, sector.tag()).unwrap();
        let dense = pt.reduce(GlobalState::Density(&rho)).unwrap();
        let column = Mat::from_fn(d, 1, |i, _| psi[i]);
        let mixture = pt
            .reduce(GlobalState::Mixture { weights: &[1.0], components: column.as_ref() })
            .unwrap();
        assert!(linalg::max_abs_diff(pure.density.matrix(), dense.density.matrix()) < 1e-15);
        assert!(linalg::max_abs_diff(pure.density.matrix(), mixture.density.matrix()) < 1e-15);
        assert!((pure.block_weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(pure.density.off_block_max(pt.fock().sector_offsets()) == 0.0);
    }

    #[test]
    fn distances() {
        let tag = BasisTag::Fock { n_sites: 1 };
        let up = DensityMatrix::diagonal(&[1.0, 0.0], tag).unwrap();
        let down = DensityMatrix::diagonal(&[0.0, 1.0], tag).unwrap();
        assert_eq!(hs_distance_sq(&up, &up).unwrap(), 0.0);
        assert_eq!(hs_distance_sq(&up, &down).unwrap(), 2.0);
        assert!(trace_distance(&up, &up).unwrap().abs() < 1e-15);
        assert!((trace_distance(&up, &down).unwrap() - 1.0).abs() < 1e-15);
        let big = DensityMatrix::maximally_mixed(4, BasisTag::TwoQubit);
        assert!(hs_distance_sq(&up, &big).is_err());
    }

    #[test]
    fn entropy_examples() {
        let tag = BasisTag::TwoQubit;
        assert!(von_neumann_entropy(&DensityMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0], tag).unwrap())
            .unwrap()
            .abs()
            < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(4, tag);
        assert!((von_neumann_entropy(&mixed).unwrap() - libm::log(4.0)).abs() < 1e-14);
        let skew = DensityMatrix::diagonal(&[0.75, 0.25], BasisTag::Fock { n_sites: 1 }).unwrap();
        assert!((von_neumann_entropy(&skew).unwrap() - 0.562335).abs() < 1e-6);
    }

    #[test]
    fn two_site_examples() {
        let (_, _, sector) = two_site();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let bell = two_site_rdm(GlobalState::Pure(&[c(s), c(s)]), &sector, 0, 1).unwrap();
        assert!((bell.purity() - 1.0).abs() < 1e-15);
        assert!((bell.get(1, 2).re - 0.5).abs() < 1e-15);
        assert!((concurrence(&bell).unwrap() - 1.0).abs() < 1e-12);
        assert!(two_site_rdm(GlobalState::Pure(&[c(s), c(s)]), &sector, 1, 1).is_err());

        // bosons on sites 2,3 of a 4-site system never reach sites 0,1
        let sector = BasisSector::new(4, 2).unwrap();
        let mut psi = vec![c(0.0); sector.dim()];
        psi[sector.rank(0b1100).unwrap()] = c(1.0);
        let vacuum = two_site_rdm(GlobalState::Pure(&psi), &sector, 0, 1).unwrap();
        assert_eq!(vacuum.get(0, 0), c(1.0));
        assert_eq!(concurrence(&vacuum).unwrap(), 0.0);
    }

    #[test]
    fn werner_concurrence() {
        let p = 0.5;
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let singlet = [0.0, s, -s, 0.0];
        let m = Mat::from_fn(4, 4, |i, j| {
            c(p * singlet[i] * singlet[j] + if i == j { (1.0 - p) / 4.0 } else { 0.0 })
        });
        let rho = DensityMatrix::new(m, BasisTag::TwoQubit).unwrap();
        assert!((concurrence(&rho).unwrap() - 0.25).abs() < 1e-12);
        assert!(concurrence(&DensityMatrix::maximally_mixed(2, BasisTag::Fock { n_sites: 1 })).is_err());
    }

    #[test]
    fn profile_of_thermal_state_is_boltzmann() {
        let (lattice, bip) = example_lattice("ladder_6").unwrap();
        let fock = SubsystemFockSpace::for_system(&bip).unwrap();
        let h = subsystem_hamiltonian(&lattice, &bip, &fock).unwrap();
        let beta = 0.7;
        let rho = thermal_subsystem(&h, &fock, beta, None).unwrap();
        let points = energy_resolved_profile(&rho, &h).unwrap();
        assert_eq!(points.len(), fock.dim());
        let offset = libm::log(points[0].weight) + beta * points[0].energy;
        for p in &points {
            assert!((libm::log(p.weight) + beta * p.energy - offset).abs() < 1e-6);
        }
        let flat = DensityMatrix::maximally_mixed(fock.dim(), fock.tag());
        let points = energy_resolved_profile(&flat, &h).unwrap();
        assert!(points.iter().all(|p| (p.weight - 1.0 / fock.dim() as f64).abs() < 1e-15));
    }
}
