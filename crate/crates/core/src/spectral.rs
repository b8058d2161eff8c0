//! Full dense eigendecomposition and level-spacing statistics.

use alloc::vec::Vec;

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};

use crate::hamiltonian::SparseOperator;
use crate::linalg;
use crate::{BasisTag, Error, Result};

/// Largest dimension accepted by [`SpectralDecomposition::diagonalize`].
pub const DEFAULT_DENSE_GUARD: usize = 25_000;
/// Default degree of the staircase fit.
pub const DEFAULT_UNFOLD_DEGREE: usize = 7;
/// Fraction of levels dropped at each end of the spectrum before unfolding.
pub const EDGE_TRIM: f64 = 0.02;
/// Minimum number of levels accepted by [`unfold_and_spacings`].
pub const MIN_LEVELS: usize = 100;

/// Eigenvalues in ascending order with orthonormal real eigenvectors as
/// the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    values: Vec<f64>,
    vectors: Mat<f64>,
    basis: BasisTag,
}

impl SpectralDecomposition {
    pub fn diagonalize(h: &SparseOperator) -> Result<Self> {
        Self::diagonalize_with_guard(h, DEFAULT_DENSE_GUARD)
    }

    pub fn diagonalize_with_guard(h: &SparseOperator, guard: usize) -> Result<Self> {
        if h.dim() > guard {
            return Err(Error::DenseGuard { dim: h.dim(), guard });
        }
        let dense = h.to_dense();
        let (values, vectors) = linalg::symmetric_eigen(dense.as_ref())?;
        Ok(SpectralDecomposition {
            values,
            vectors,
            basis: h.basis(),
        })
    }

    /// Diagonalizes a dense real matrix after checking it is symmetric.
    pub fn from_dense(m: MatRef<'_, f64>, basis: BasisTag, guard: usize) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        if n > guard {
            return Err(Error::DenseGuard { dim: n, guard });
        }
        let scale = linalg::max_abs_real(m).max(f64::MIN_POSITIVE);
        let mut asymmetry = 0.0f64;
        for j in 0..n {
            for i in 0..j {
                asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if asymmetry > 1e-12 * scale {
            return Err(Error::NotHermitian { asymmetry });
        }
        let (values, vectors) = linalg::symmetric_eigen(m)?;
        Ok(SpectralDecomposition {
            values,
            vectors,
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> MatRef<'_, f64> {
        self.vectors.as_ref()
    }

    pub fn vector(&self, index: usize) -> &[f64] {
        self.vectors.col(index).try_as_col_major().expect("owned matrices are column-major").as_slice()
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    /// Smallest and largest eigenvalue.
    pub fn range(&self) -> (f64, f64) {
        (self.values[0], self.values[self.values.len() - 1])
    }

    /// `max |VᵀV − I|`.
    pub fn gram_deviation(&self) -> f64 {
        let gram = linalg::mul_real(self.vectors.transpose(), self.vectors.as_ref());
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// `max |H − VΛVᵀ|` against the operator that was diagonalized.
    pub fn reconstruction_error(&self, h: MatRef<'_, f64>) -> f64 {
        let n = self.dim();
        let scaled = Mat::from_fn(n, n, |i, a| self.vectors[(i, a)] * self.values[a]);
        let rebuilt = linalg::mul_real(scaled.as_ref(), self.vectors.transpose());
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                worst = worst.max((rebuilt[(i, j)] - h[(i, j)]).abs());
            }
        }
        worst
    }
}

/// Eigenvalues alone, ascending. Skips the eigenvectors, which roughly halves
/// the cost when only level statistics are wanted.
pub fn eigenvalues(h: &SparseOperator, guard: usize) -> Result<Vec<f64>> {
    if h.dim() > guard {
        return Err(Error::DenseGuard { dim: h.dim(), guard });
    }
    linalg::symmetric_eigenvalues(h.to_dense().as_ref())
}

/// Unfolded nearest-neighbour spacings and their distance to the two
/// reference distributions.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacingStatistics {
    pub spacings: Vec<f64>,
    pub ks_wigner: f64,
    pub ks_poisson: f64,
    /// Number of levels kept after trimming the spectral edges.
    pub levels_used: usize,
}

/// One histogram bin of the spacing distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub density: f64,
}

impl HistogramBin {
    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

impl SpacingStatistics {
    pub fn mean_spacing(&self) -> f64 {
        self.spacings.iter().sum::<f64>() / self.spacings.len() as f64
    }

    /// Probability density histogram on `[0, max_s)` with `n_bins` bins;
    /// spacings beyond `max_s` still count towards the normalization.
    pub fn histogram(&self, n_bins: usize, max_s: f64) -> Vec<HistogramBin> {
        let width = max_s / n_bins as f64;
        let mut counts = alloc::vec![0usize; n_bins];
        for &s in &self.spacings {
            let bin = (s / width) as usize;
            if s >= 0.0 && bin < n_bins {
                counts[bin] += 1;
            }
        }
        let norm = self.spacings.len() as f64 * width;
        counts
            .iter()
            .enumerate()
            .map(|(k, &c)| HistogramBin {
                lower: k as f64 * width,
                upper: (k + 1) as f64 * width,
                density: c as f64 / norm,
            })
            .collect()
    }

    /// Spectral statistics read as chaotic when the spacings sit closer to
    /// the Wigner surmise than to an exponential.
    pub fn is_chaotic(&self) -> bool {
        self.ks_wigner < self.ks_poisson
    }
}

/// Unfolds a spectrum with a polynomial fit of its staircase function and
/// returns the spacing statistics. `values` need not be sorted.
pub fn unfold_and_spacings(values: &[f64], degree: usize) -> Result<SpacingStatistics> {
    if values.len() < MIN_LEVELS {
        return Err(Error::TooFewLevels {
            got: values.len(),
            need: MIN_LEVELS,
        });
    }
    if degree < 3 {
        return Err(Error::InvalidArgument(alloc::format!(
            "unfolding degree must be at least 3, got {degree}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let cut = (EDGE_TRIM * n as f64) as usize;
    let kept = &sorted[cut..n - cut];
    // staircase value at a level: number of levels strictly below it plus one
    let staircase: Vec<f64> = (0..kept.len()).map(|k| (cut + k + 1) as f64).collect();
    let fit = PolynomialFit::new(kept, &staircase, degree)?;
    let unfolded: Vec<f64> = kept.iter().map(|&e| fit.eval(e)).collect();
    let spacings: Vec<f64> = unfolded.windows(2).map(|w| w[1] - w[0]).collect();
    let ks_wigner = ks_distance(&spacings, wigner_cdf);
    let ks_poisson = ks_distance(&spacings, poisson_cdf);
    Ok(SpacingStatistics {
        spacings,
        ks_wigner,
        ks_poisson,
        levels_used: kept.len(),
    })
}

/// Least-squares polynomial in the Chebyshev basis on the data range.
struct PolynomialFit {
    center: f64,
    half_width: f64,
    coefficients: Vec<f64>,
}

impl PolynomialFit {
    fn new(x: &[f64], y: &[f64], degree: usize) -> Result<Self> {
        let (lo, hi) = (x[0], x[x.len() - 1]);
        let distinct = 1 + x.windows(2).filter(|w| w[1] > w[0]).count();
        if hi <= lo || distinct <= degree {
            return Err(Error::SingularFit);
        }
        let fit = PolynomialFit {
            center: 0.5 * (hi + lo),
            half_width: 0.5 * (hi - lo),
            coefficients: Vec::new(),
        };
        let m = degree + 1;
        let mut normal = Mat::<f64>::zeros(m, m);
        let mut rhs = Mat::<f64>::zeros(m, 1);
        let mut row = alloc::vec![0.0; m];
        for (&xi, &yi) in x.iter().zip(y) {
            fit.basis(xi, &mut row);
            for j in 0..m {
                rhs[(j, 0)] += row[j] * yi;
                for i in 0..m {
                    normal[(i, j)] += row[i] * row[j];
                }
            }
        }
        let llt = normal.llt(Side::Lower).map_err(|_| Error::SingularFit)?;
        let solution = llt.solve(&rhs);
        let coefficients: Vec<f64> = (0..m).map(|k| solution[(k, 0)]).collect();
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::SingularFit);
        }
        Ok(PolynomialFit {
            coefficients,
            ..fit
        })
    }

    fn basis(&self, x: f64, out: &mut [f64]) {
        let u = (x - self.center) / self.half_width;
        out[0] = 1.0;
        if out.len() > 1 {
            out[1] = u;
        }
        for k in 2..out.len() {
            out[k] = 2.0 * u * out[k - 1] - out[k - 2];
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let mut row = alloc::vec![0.0; self.coefficients.len()];
        self.basis(x, &mut row);
        row.iter().zip(&self.coefficients).map(|(b, c)| b * c).sum()
    }
}

/// Two-sided Kolmogorov–Smirnov distance between the empirical distribution
/// of `samples` and `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let f = cdf(s);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Wigner surmise `π/2 s exp(−πs²/4)`.
pub fn wigner_pdf(s: f64) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::NegativeArgument(s));
    }
    let quarter_pi = core::f64::consts::FRAC_PI_4;
    Ok(2.0 * quarter_pi * s * libm::exp(-quarter_pi * s * s))
}

/// Exponential spacing density `exp(−s)` of an uncorrelated spectrum.
pub fn poisson_pdf(s: f64) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::NegativeArgument(s));
    }
    Ok(libm::exp(-s))
}

pub fn wigner_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        -libm::expm1(-core::f64::consts::FRAC_PI_4 * s * s)
    }
}

pub fn poisson_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        -libm::expm1(-s)
    }
}
