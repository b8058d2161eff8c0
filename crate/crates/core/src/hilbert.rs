//! Occupation bases for hard-core bosons.
//!
//! A basis state is a bitmask, bit `i` set when site `i` holds a boson. A
//! [`BasisSector`] lists every state with exactly `N` bosons in ascending
//! integer order; ranking uses the combinatorial number system, so no lookup
//! table over states is needed.

use alloc::format;
use alloc::vec::Vec;

use crate::lattice::{Bipartition, MAX_SITES};
use crate::{BasisTag, Error, Result};

/// Default cap on the number of enumerated states.
pub const DEFAULT_MAX_BASIS_DIM: u64 = 50_000_000;

const fn pascal() -> [[u64; 65]; 65] {
    let mut t = [[0u64; 65]; 65];
    let mut n = 0;
    while n < 65 {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            // C(64, 32) < 2^63, so nothing here overflows.
            t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
            k += 1;
        }
        n += 1;
    }
    t
}

static BINOMIAL: [[u64; 65]; 65] = pascal();

/// `C(n, k)` for `n <= 64`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n || n > 64 {
        0
    } else {
        BINOMIAL[n][k]
    }
}

/// Next larger integer with the same popcount (Gosper's hack).
fn next_same_popcount(x: u64) -> u64 {
    let c = x & x.wrapping_neg();
    let r = x.wrapping_add(c);
    (((r ^ x) >> 2) / c) | r
}

/// Rank of `state` among all masks with the same popcount, in ascending order.
fn colex_rank(mut state: u64) -> u64 {
    let mut rank = 0;
    let mut k = 1;
    while state != 0 {
        let pos = state.trailing_zeros() as usize;
        rank += binomial(pos, k);
        k += 1;
        state &= state - 1;
    }
    rank
}

/// The fixed-particle-number sector `(n_sites, N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSector {
    n_sites: usize,
    n_particles: usize,
    states: Vec<u64>,
}

impl BasisSector {
    /// Enumerates the sector with the default dimension cap.
    pub fn new(n_sites: usize, n_particles: usize) -> Result<Self> {
        Self::with_cap(n_sites, n_particles, DEFAULT_MAX_BASIS_DIM)
    }

    pub fn with_cap(n_sites: usize, n_particles: usize, cap: u64) -> Result<Self> {
        if n_sites > MAX_SITES || n_particles > n_sites {
            return Err(Error::ParticleNumber {
                n_sites,
                n_particles,
            });
        }
        let dim = binomial(n_sites, n_particles);
        if dim > cap {
            return Err(Error::BasisTooLarge { dim, cap });
        }
        let mut states = Vec::with_capacity(dim as usize);
        if n_particles == 0 {
            states.push(0);
        } else {
            let mut s = (1u64 << n_particles) - 1;
            for _ in 0..dim {
                states.push(s);
                if states.len() < dim as usize {
                    s = next_same_popcount(s);
                }
            }
        }
        Ok(BasisSector {
            n_sites,
            n_particles,
            states,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, index: usize) -> u64 {
        self.states[index]
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag::Sector {
            n_sites: self.n_sites,
            n_particles: self.n_particles,
        }
    }

    pub fn contains(&self, state: u64) -> bool {
        state.count_ones() as usize == self.n_particles
            && (self.n_sites == 64 || state >> self.n_sites == 0)
    }

    /// Position of `state` in the sector ordering, in `O(n_sites)`.
    pub fn rank(&self, state: u64) -> Result<usize> {
        if !self.contains(state) {
            return Err(Error::StateNotInSector { state });
        }
        Ok(colex_rank(state) as usize)
    }

    /// Inverse of [`rank`](Self::rank), computed combinatorially.
    pub fn unrank(&self, mut index: usize) -> Result<u64> {
        if index >= self.dim() {
            return Err(Error::InvalidArgument(format!(
                "index {index} outside sector of dimension {}",
                self.dim()
            )));
        }
        let mut state = 0u64;
        let mut pos = self.n_sites;
        for k in (1..=self.n_particles).rev() {
            // largest pos with C(pos, k) <= index
            pos -= 1;
            while binomial(pos, k) as usize > index {
                pos -= 1;
            }
            state |= 1 << pos;
            index -= binomial(pos, k) as usize;
        }
        Ok(state)
    }
}

/// Full Fock space of the system sites, ordered block by block in the number
/// of bosons and by ascending bitmask inside each block.
///
/// Masks here are local: bit `k` is `sites[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemFockSpace {
    sites: Vec<usize>,
    order: Vec<u64>,
    position: Vec<usize>,
    sector_offsets: Vec<usize>,
}

impl SubsystemFockSpace {
    pub fn new(sites: &[usize]) -> Result<Self> {
        let n = sites.len();
        if n > 24 {
            return Err(Error::InvalidArgument(format!(
                "subsystem of {n} sites is too large for a dense Fock space"
            )));
        }
        let dim = 1usize << n;
        let mut order = Vec::with_capacity(dim);
        let mut sector_offsets = Vec::with_capacity(n + 2);
        for count in 0..=n {
            sector_offsets.push(order.len());
            order.extend(BasisSector::new(n, count)?.states());
        }
        sector_offsets.push(dim);
        let mut position = alloc::vec![0; dim];
        for (i, &m) in order.iter().enumerate() {
            position[m as usize] = i;
        }
        Ok(SubsystemFockSpace {
            sites: sites.to_vec(),
            order,
            position,
            sector_offsets,
        })
    }

    pub fn for_system(bipartition: &Bipartition) -> Result<Self> {
        Self::new(bipartition.system_sites())
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    /// Start of each number block, followed by `dim`.
    pub fn sector_offsets(&self) -> &[usize] {
        &self.sector_offsets
    }

    /// Index range of the block with `count` bosons.
    pub fn block(&self, count: usize) -> core::ops::Range<usize> {
        self.sector_offsets[count]..self.sector_offsets[count + 1]
    }

    pub fn index_of(&self, mask: u64) -> usize {
        self.position[mask as usize]
    }

    pub fn mask_at(&self, index: usize) -> u64 {
        self.order[index]
    }

    pub fn masks(&self) -> &[u64] {
        &self.order
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag::Fock {
            n_sites: self.sites.len(),
        }
    }
}

/// Gathers the bits of `state` at `sites` into a dense local mask.
pub fn gather_bits(state: u64, sites: &[usize]) -> u64 {
    sites
        .iter()
        .enumerate()
        .fold(0, |m, (k, &s)| m | ((state >> s & 1) << k))
}

/// Scatters local mask bits back to the global positions `sites`.
pub fn scatter_bits(local: u64, sites: &[usize]) -> u64 {
    sites
        .iter()
        .enumerate()
        .fold(0, |m, (k, &s)| m | ((local >> k & 1) << s))
}

/// Splits a full-lattice state into `(system mask, bath mask)`, each read in
/// the order of the bipartition's site lists.
pub fn split_state(state: u64, bipartition: &Bipartition) -> (u64, u64) {
    (
        gather_bits(state, bipartition.system_sites()),
        gather_bits(state, bipartition.bath_sites()),
    )
}

/// Inverse of [`split_state`].
pub fn join_state(system: u64, bath: u64, bipartition: &Bipartition) -> u64 {
    scatter_bits(system, bipartition.system_sites()) | scatter_bits(bath, bipartition.bath_sites())
}
