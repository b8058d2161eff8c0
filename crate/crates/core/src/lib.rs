//! Exact diagonalization of hard-core bosons on arbitrary lattices, built for
//! studying how a small subsystem `S` thermalizes against a finite bath `B`
//! after a sudden quench.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure function
//! of its inputs: there is no IO and no randomness. File formats and the
//! scenario runner live in the companion `edtherm` crate.
//!
//! The pipeline, bottom-up:
//!
//! * [`lattice`]: geometry, couplings and the `S`/`B` cut.
//! * [`hilbert`]: fixed-particle-number occupation bases and subsystem Fock
//!   spaces, with combinatorial ranking.
//! * [`hamiltonian`]: sparse assembly of `H`, `H_S`, `H_B`, `H_I`.
//! * [`spectral`]: dense eigendecomposition and level-spacing statistics.
//! * [`ensembles`]: microcanonical, canonical, diagonal and subsystem thermal
//!   states, plus the inverse-temperature solver.
//! * [`dynamics`]: spectral time evolution of pure and mixed states.
//! * [`reduction`]: partial traces, distances, entropy and concurrence.
#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod density;
pub mod dynamics;
pub mod ensembles;
mod error;
pub mod hamiltonian;
pub mod hilbert;
pub mod lattice;
pub(crate) mod linalg;
pub mod reduction;
pub mod spectral;

pub use density::{BasisTag, DensityMatrix};
pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Re-export of the dense matrix types used in the public API.
pub use faer::{Mat, MatRef};
