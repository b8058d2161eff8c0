//! Brute-force reference implementations for tests.
//!
//! Nothing in here shares code with `edtherm-core`. Matrices are plain
//! `Vec<Vec<_>>` in row-major order and every algorithm is the textbook one,
//! chosen for being easy to check by eye rather than fast.

use std::collections::HashMap;

use num_complex::Complex64;

pub type RealMatrix = Vec<Vec<f64>>;
pub type ComplexMatrix = Vec<Vec<Complex64>>;

/// `C(n, k)` by the multiplicative formula in 128-bit integers.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn occupied(state: u64, site: usize) -> bool {
    state >> site & 1 == 1
}

/// `b†_to b_from |state⟩` for hard-core bosons, or `None` when it vanishes.
fn hop(state: u64, from: usize, to: usize) -> Option<u64> {
    if occupied(state, from) && !occupied(state, to) {
        Some(state & !(1 << from) | (1 << to))
    } else {
        None
    }
}

/// The Hamiltonian on the full `2^n` Fock space, assembled by applying each
/// term `−J b†_i b_j`, `−J b†_j b_i` and `U n_i n_j` to every basis state.
pub fn fock_hamiltonian(n_sites: usize, edges: &[(usize, usize)], hopping: f64, interaction: f64) -> RealMatrix {
    let dim = 1usize << n_sites;
    let mut h = vec![vec![0.0; dim]; dim];
    for state in 0..dim as u64 {
        for &(i, j) in edges {
            for (from, to) in [(j, i), (i, j)] {
                if let Some(target) = hop(state, from, to) {
                    h[target as usize][state as usize] += -hopping;
                }
            }
            if occupied(state, i) && occupied(state, j) {
                h[state as usize][state as usize] += interaction;
            }
        }
    }
    h
}

/// All states of `n_sites` bits with `n_particles` set, ascending.
pub fn sector_states(n_sites: usize, n_particles: usize) -> Vec<u64> {
    (0..1u64 << n_sites)
        .filter(|s| s.count_ones() as usize == n_particles)
        .collect()
}

/// Restriction of a Fock-space matrix to the listed states.
pub fn restrict(full: &RealMatrix, states: &[u64]) -> RealMatrix {
    states
        .iter()
        .map(|&r| states.iter().map(|&c| full[r as usize][c as usize]).collect())
        .collect()
}

/// `ρ_S[s, s'] = Σ_b ⟨s b|ρ|s' b⟩` by explicit loops over every system pair
/// and every bath configuration. `rho` is indexed by `states`. Local system
/// masks follow the order of `system_sites`; the output is indexed by local
/// mask value (not by particle-number blocks).
pub fn partial_trace(
    rho: &ComplexMatrix,
    states: &[u64],
    n_sites: usize,
    system_sites: &[usize],
) -> ComplexMatrix {
    let index: HashMap<u64, usize> = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
    let bath_sites: Vec<usize> = (0..n_sites).filter(|s| !system_sites.contains(s)).collect();
    let compose = |s: u64, b: u64| -> u64 {
        let mut state = 0u64;
        for (k, &site) in system_sites.iter().enumerate() {
            state |= (s >> k & 1) << site;
        }
        for (k, &site) in bath_sites.iter().enumerate() {
            state |= (b >> k & 1) << site;
        }
        state
    };
    let ds = 1u64 << system_sites.len();
    let db = 1u64 << bath_sites.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ds as usize]; ds as usize];
    for s in 0..ds {
        for s2 in 0..ds {
            for b in 0..db {
                if let (Some(&r), Some(&c)) = (index.get(&compose(s, b)), index.get(&compose(s2, b))) {
                    out[s as usize][s2 as usize] += rho[r][c];
                }
            }
        }
    }
    out
}

pub fn outer(psi: &[Complex64]) -> ComplexMatrix {
    psi.iter().map(|a| psi.iter().map(|b| a * b.conj()).collect()).collect()
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); m]; n];
    for i in 0..n {
        for k in 0..inner {
            let aik = a[i][k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..m {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &ComplexMatrix, x: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

/// `exp(−iHt)` by scaling and squaring a truncated Taylor series.
pub fn propagator(h: &RealMatrix, t: f64) -> ComplexMatrix {
    let n = h.len();
    let norm = h
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        * t.abs();
    let mut squarings = 0;
    while norm / f64::powi(2.0, squarings) > 0.25 {
        squarings += 1;
    }
    let scale = t / f64::powi(2.0, squarings);
    let a: ComplexMatrix = h
        .iter()
        .map(|row| row.iter().map(|&x| Complex64::new(0.0, -x * scale)).collect())
        .collect();
    let identity: ComplexMatrix = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let mut result = identity.clone();
    let mut term = identity;
    for k in 1..=24 {
        term = matmul(&term, &a);
        let inv = 1.0 / k as f64;
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x *= inv;
            }
        }
        for (r, t) in result.iter_mut().zip(&term) {
            for (x, y) in r.iter_mut().zip(t) {
                *x += y;
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

/// Eigenvalues of a real symmetric matrix, ascending: Householder reduction
/// to tridiagonal form, then bisection on Sturm sequence counts.
pub fn symmetric_eigenvalues(matrix: &RealMatrix) -> Vec<f64> {
    let n = matrix.len();
    let mut a = matrix.clone();
    // Householder tridiagonalization
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum();
        if alpha_sq == 0.0 {
            continue;
        }
        let alpha = -a[k + 1][k].signum() * alpha_sq.sqrt();
        let mut v = vec![0.0; n];
        v[k + 1] = a[k + 1][k] - alpha;
        for i in k + 2..n {
            v[i] = a[i][k];
        }
        let v_norm_sq: f64 = v.iter().map(|x| x * x).sum();
        if v_norm_sq == 0.0 {
            continue;
        }
        // A ← (I − 2vvᵀ/|v|²) A (I − 2vvᵀ/|v|²)
        let p: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * v[j]).sum::<f64>() * 2.0 / v_norm_sq).collect();
        let kappa: f64 = (0..n).map(|i| v[i] * p[i]).sum::<f64>() / v_norm_sq;
        let q: Vec<f64> = (0..n).map(|i| p[i] - kappa * v[i]).collect();
        for i in 0..n {
            for j in 0..n {
                a[i][j] -= v[i] * q[j] + q[i] * v[j];
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    let off: Vec<f64> = (1..n).map(|i| a[i][i - 1]).collect();

    // number of eigenvalues strictly below x
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..n {
            let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
            d = diag[i] - x - if i == 0 { 0.0 } else { coupling / d };
            if d == 0.0 {
                d = -f64::EPSILON * (x.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let radius = (0..n)
        .map(|i| {
            diag[i].abs()
                + if i > 0 { off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { off[i].abs() } else { 0.0 }
        })
        .fold(0.0, f64::max)
        + 1.0;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-radius, radius);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if count_below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        acc += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(21, 5), 20349);
        assert_eq!(binomial(25, 5), 53130);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn sturm_on_known_spectrum() {
        let m = vec![vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]];
        let r2 = std::f64::consts::SQRT_2;
        for (got, want) in symmetric_eigenvalues(&m).iter().zip([2.0 - r2, 2.0, 2.0 + r2]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn propagator_of_two_level() {
        let h = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        let u = propagator(&h, 0.7);
        assert!((u[0][0] - Complex64::new(0.7f64.cos(), 0.0)).norm() < 1e-14);
        assert!((u[1][0] - Complex64::new(0.0, 0.7f64.sin())).norm() < 1e-14);
    }
}
