use alloc::string::String;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid lattice field `{field}`: {reason}")]
    InvalidLattice { field: &'static str, reason: String },

    #[error("unknown catalog lattice `{0}`")]
    UnknownLattice(String),

    #[error("particle number {n_particles} out of range for {n_sites} sites")]
    ParticleNumber { n_sites: usize, n_particles: usize },

    #[error("sector dimension {dim} exceeds the configured cap {cap}")]
    BasisTooLarge { dim: u64, cap: u64 },

    #[error("state {state:#b} does not belong to the sector")]
    StateNotInSector { state: u64 },

    #[error("dimension {dim} exceeds the dense diagonalization guard {guard}")]
    DenseGuard { dim: usize, guard: usize },

    #[error("operator is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("need at least {need} levels, got {got}")]
    TooFewLevels { got: usize, need: usize },

    #[error("unfolding fit is degenerate (singular normal equations)")]
    SingularFit,

    #[error("argument must be non-negative, got {0}")]
    NegativeArgument(f64),

    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),

    #[error(
        "no eigenvalue within {delta_e} of E0 = {e0}; nearest level {nearest} \
         (a window of at least {suggested:.6} would include it)"
    )]
    EmptyWindow {
        e0: f64,
        delta_e: f64,
        nearest: f64,
        suggested: f64,
    },

    #[error("target energy {target} is unreachable (reachable range ({min}, {max}))")]
    UnreachableEnergy { target: f64, min: f64, max: f64 },

    #[error("bisection stopped after {iterations} iterations with residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("empty sector: {0}")]
    EmptySector(String),

    #[error("eigendecomposition did not converge")]
    Eigen,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
