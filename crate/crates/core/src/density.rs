//! Density matrices and basis bookkeeping.

use alloc::format;
use alloc::vec::Vec;

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::hamiltonian::SparseOperator;
use crate::linalg;
use crate::{Error, Result};

/// Tolerance for the trace, Hermiticity and positivity checks.
pub const DENSITY_TOL: f64 = 1e-10;

/// Identifies the basis an operator or state is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisTag {
    /// Fixed-particle-number sector of the whole lattice.
    Sector { n_sites: usize, n_particles: usize },
    /// Subsystem Fock space, number blocks ascending.
    Fock { n_sites: usize },
    /// Two sites as qubits: `|n_i n_j⟩` with index `2 n_i + n_j`.
    TwoQubit,
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: Mat<Complex64>,
    basis: BasisTag,
}

impl DensityMatrix {
    /// Checks every invariant, including positivity (one eigendecomposition).
    pub fn new(matrix: Mat<Complex64>, basis: BasisTag) -> Result<Self> {
        let rho = DensityMatrix { matrix, basis };
        rho.validate()?;
        Ok(rho)
    }

    /// For constructors that are positive and normalized by construction.
    pub(crate) fn from_parts(matrix: Mat<Complex64>, basis: BasisTag) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        DensityMatrix { matrix, basis }
    }

    /// `|ψ⟩⟨ψ|`; `psi` must be normalized.
    pub fn pure(psi: &[Complex64], basis: BasisTag) -> Result<Self> {
        let norm = linalg::norm_sqr(psi);
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized(norm));
        }
        let n = psi.len();
        Ok(Self::from_parts(
            Mat::from_fn(n, n, |i, j| psi[i] * psi[j].conj()),
            basis,
        ))
    }

    pub fn maximally_mixed(dim: usize, basis: BasisTag) -> Self {
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        Self::from_parts(
            Mat::from_fn(dim, dim, |i, j| if i == j { w } else { Complex64::default() }),
            basis,
        )
    }

    /// Diagonal matrix of probabilities.
    pub fn diagonal(probabilities: &[f64], basis: BasisTag) -> Result<Self> {
        let n = probabilities.len();
        let m = Mat::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(probabilities[i], 0.0)
            } else {
                Complex64::default()
            }
        });
        Self::new(m, basis)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.matrix.nrows();
        if n != self.matrix.ncols() || n == 0 {
            return Err(Error::InvalidDensity(format!(
                "matrix must be square and non-empty, got {}x{}",
                n,
                self.matrix.ncols()
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let asym = self.hermiticity_defect();
        if asym > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {asym:e})")));
        }
        let lowest = self.eigenvalues()?.first().copied().unwrap_or(0.0);
        if lowest < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {lowest:e}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn matrix(&self) -> MatRef<'_, Complex64> {
        self.matrix.as_ref()
    }

    pub fn into_matrix(self) -> Mat<Complex64> {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                acc += self.matrix[(i, j)].norm_sqr();
            }
        }
        acc
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(self.matrix.as_ref())
    }

    /// Eigenvalues (ascending) with the matching eigenvectors as columns.
    pub fn eigen(&self) -> Result<(Vec<f64>, Mat<Complex64>)> {
        linalg::hermitian_eigen(self.matrix.as_ref())
    }

    /// `tr(ρ O)` for a Hermitian sparse operator on the same basis.
    pub fn expectation(&self, op: &SparseOperator) -> Result<f64> {
        if op.basis() != self.basis || op.dim() != self.dim() {
            return Err(Error::BasisMismatch(format!(
                "operator on {:?} (dim {}) vs state on {:?} (dim {})",
                op.basis(),
                op.dim(),
                self.basis,
                self.dim()
            )));
        }
        let mut acc = 0.0;
        for &(r, c, v) in op.entries() {
            if r == c {
                acc += v * self.matrix[(r, r)].re;
            } else {
                // ρ_cr H_rc + ρ_rc H_cr with H real symmetric
                acc += v * 2.0 * self.matrix[(c, r)].re;
            }
        }
        Ok(acc)
    }

    /// Largest element magnitude outside the diagonal blocks delimited by
    /// `offsets` (the last entry being the dimension).
    pub fn off_block_max(&self, offsets: &[usize]) -> f64 {
        let block = |i: usize| offsets.partition_point(|&o| o <= i);
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                if block(i) != block(j) {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// `a ρ₁ + b ρ₂`, without renormalizing.
    pub fn linear_combination(&self, a: f64, other: &DensityMatrix, b: f64) -> Result<Mat<Complex64>> {
        if self.basis != other.basis || self.dim() != other.dim() {
            return Err(Error::BasisMismatch(format!(
                "{:?} vs {:?}",
                self.basis, other.basis
            )));
        }
        let n = self.dim();
        Ok(Mat::from_fn(n, n, |i, j| {
            self.matrix[(i, j)] * a + other.matrix[(i, j)] * b
        }))
    }
}
