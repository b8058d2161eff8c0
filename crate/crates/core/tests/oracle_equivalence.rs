//! The fast pipeline against slow, independent reference implementations.

mod common;

use common::*;
use edtherm_core::dynamics::{evolve_mixed, evolve_pure, EvolvingState};
use edtherm_core::hamiltonian::build_hamiltonian;
use edtherm_core::hilbert::{binomial, BasisSector};
use edtherm_core::lattice::{example_lattice, Lattice};
use edtherm_core::reduction::{partial_trace, GlobalState};
use edtherm_core::spectral::{eigenvalues, SpectralDecomposition};
use edtherm_core::{Complex64, DensityMatrix, Mat};
use edtherm_oracles as oracle;
use proptest::prelude::*;

fn named_small_lattices() -> Vec<Lattice> {
    let mut out = Vec::new();
    for n in 2..=8 {
        out.push(example_lattice(&format!("chain_{n}")).unwrap().0);
    }
    for n in 2..=4 {
        out.push(example_lattice(&format!("ladder_{n}")).unwrap().0);
    }
    for n in 3..=8 {
        let ring = (0..n).map(|i| (i, (i + 1) % n));
        out.push(Lattice::new(n, ring, 1.0, 0.1).unwrap());
        let complete = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        out.push(Lattice::new(n, complete, 0.7, -1.3).unwrap());
    }
    out
}

fn edge_list(lattice: &Lattice) -> Vec<(usize, usize)> {
    lattice.edges().iter().map(|e| e.sites()).collect()
}

/// Off-diagonal entries must agree bitwise. The oracle builds each diagonal
/// entry by adding `U` once per occupied edge, the pipeline multiplies `U` by
/// the edge count, so with `exact = false` the two may differ by rounding.
fn assert_matches_oracle(lattice: &Lattice, exact: bool) {
    let n = lattice.n_sites();
    let full = oracle::fock_hamiltonian(n, &edge_list(lattice), lattice.hopping(), lattice.interaction());
    for k in 0..=n {
        let sector = BasisSector::new(n, k).unwrap();
        assert_eq!(sector.dim() as u128, oracle::binomial(n as u64, k as u64));
        let states = oracle::sector_states(n, k);
        assert_eq!(sector.states(), states.as_slice());
        let expected = oracle::restrict(&full, &states);
        let got = to_rows_real(build_hamiltonian(lattice, &sector, None).unwrap().to_dense().as_ref());
        if exact {
            assert_eq!(got, expected, "{n} sites, {k} bosons");
            continue;
        }
        for (i, (row, want)) in got.iter().zip(&expected).enumerate() {
            for (j, (a, b)) in row.iter().zip(want).enumerate() {
                if i == j {
                    assert!((a - b).abs() <= 8.0 * f64::EPSILON * b.abs(), "{n} sites, {k} bosons, ({i},{i})");
                } else {
                    assert_eq!(a, b, "{n} sites, {k} bosons, ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn hamiltonian_equals_term_by_term_operator_on_named_lattices() {
    for lattice in named_small_lattices() {
        assert_matches_oracle(&lattice, false);
    }
}

#[test]
fn sector_dimensions_of_the_large_lattices() {
    assert_eq!(binomial(21, 5), 20349);
    assert_eq!(binomial(25, 5), 53130);
    assert_eq!(oracle::binomial(21, 5), 20349);
    assert_eq!(oracle::binomial(25, 5), 53130);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_equals_term_by_term_operator(model in small_model(2..=8)) {
        assert_matches_oracle(&model.lattice(), false);
    }

    #[test]
    fn hamiltonian_is_bitwise_equal_for_dyadic_couplings(
        model in small_model(2..=8),
        j in 1i32..64,
        u in -64i32..64,
    ) {
        let lattice = Lattice::new(model.n_sites, model.edges.iter().copied(), j as f64 / 16.0, u as f64 / 16.0).unwrap();
        assert_matches_oracle(&lattice, true);
    }

    #[test]
    fn partial_trace_equals_triple_loop(
        model in small_model(2..=8),
        k_frac in 0.0f64..1.0,
        raw in raw_vector(70),
    ) {
        let n = model.n_sites;
        let k = ((n + 1) as f64 * k_frac) as usize;
        let sector = BasisSector::new(n, k.min(n)).unwrap();
        let psi = normalized(&raw[..sector.dim()]);
        let bip = model.bipartition();
        let reduced = partial_trace(GlobalState::Pure(&psi), &sector, &bip).unwrap();

        let states = oracle::sector_states(n, sector.n_particles());
        let expected = oracle::partial_trace(&oracle::outer(&psi), &states, n, bip.system_sites());
        let fock = edtherm_core::hilbert::SubsystemFockSpace::for_system(&bip).unwrap();
        let rho = reduced.density.matrix();
        for (m, row) in expected.iter().enumerate() {
            for (m2, want) in row.iter().enumerate() {
                let got = rho[(fock.index_of(m as u64), fock.index_of(m2 as u64))];
                prop_assert!((got - want).norm() < 1e-12, "({m},{m2}) {got} vs {want}");
            }
        }
    }

    #[test]
    fn mixed_partial_trace_equals_triple_loop(
        model in small_model(2..=7),
        raw in prop::collection::vec(raw_vector(35), 3),
        w in prop::collection::vec(0.01f64..1.0, 3),
    ) {
        let n = model.n_sites;
        let sector = BasisSector::new(n, n / 2).unwrap();
        let d = sector.dim();
        let total: f64 = w.iter().sum();
        let weights: Vec<f64> = w.iter().map(|x| x / total).collect();
        let columns: Vec<Vec<Complex64>> = raw.iter().map(|r| normalized(&r[..d])).collect();
        let components = Mat::from_fn(d, 3, |i, k| columns[k][i]);
        let bip = model.bipartition();
        let reduced = partial_trace(
            GlobalState::Mixture { weights: &weights, components: components.as_ref() },
            &sector,
            &bip,
        ).unwrap();

        let mut rho = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for (col, &wk) in columns.iter().zip(&weights) {
            for (r, o) in rho.iter_mut().zip(oracle::outer(col)) {
                for (x, y) in r.iter_mut().zip(o) {
                    *x += y * wk;
                }
            }
        }
        let expected = oracle::partial_trace(&rho, sector.states(), n, bip.system_sites());
        let fock = edtherm_core::hilbert::SubsystemFockSpace::for_system(&bip).unwrap();
        let got = reduced.density.matrix();
        for (m, row) in expected.iter().enumerate() {
            for (m2, want) in row.iter().enumerate() {
                prop_assert!((got[(fock.index_of(m as u64), fock.index_of(m2 as u64))] - want).norm() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectral_evolution_equals_matrix_exponential(
        model in small_model(4..=8),
        raw in raw_vector(70),
    ) {
        let n = model.n_sites;
        let sector = BasisSector::new(n, n / 2).unwrap();
        let h = build_hamiltonian(&model.lattice(), &sector, None).unwrap();
        let eig = SpectralDecomposition::diagonalize(&h).unwrap();
        let psi = normalized(&raw[..sector.dim()]);
        let state = EvolvingState::pure(&eig, &psi).unwrap();
        let dense = to_rows_real(h.to_dense().as_ref());
        for t in [0.0, 0.3, 2.5, 11.0, 27.7, 50.0] {
            let expected = oracle::matvec(&oracle::propagator(&dense, t), &psi);
            let got = evolve_pure(&state, t).unwrap();
            prop_assert!(max_diff(&got, &expected) < 1e-10, "t = {t}: {}", max_diff(&got, &expected));
        }
    }

    #[test]
    fn mixed_evolution_equals_conjugation(
        model in small_model(4..=7),
        raw in prop::collection::vec(raw_vector(35), 2),
        w in 0.05f64..0.95,
    ) {
        let n = model.n_sites;
        let sector = BasisSector::new(n, n / 2).unwrap();
        let d = sector.dim();
        let h = build_hamiltonian(&model.lattice(), &sector, None).unwrap();
        let eig = SpectralDecomposition::diagonalize(&h).unwrap();
        let cols: Vec<Vec<Complex64>> = raw.iter().map(|r| normalized(&r[..d])).collect();
        let components = Mat::from_fn(d, 2, |i, k| cols[k][i]);
        let weights = [w, 1.0 - w];
        let state = EvolvingState::mixture(&eig, &weights, components.as_ref()).unwrap();
        let mut rho0 = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for (c, &wk) in cols.iter().zip(&weights) {
            for (r, o) in rho0.iter_mut().zip(oracle::outer(c)) {
                for (x, y) in r.iter_mut().zip(o) {
                    *x += y * wk;
                }
            }
        }
        let dense = to_rows_real(h.to_dense().as_ref());
        for t in [0.0, 1.7, 50.0] {
            let u = oracle::propagator(&dense, t);
            let u_dag: Vec<Vec<Complex64>> = (0..d).map(|i| (0..d).map(|j| u[j][i].conj()).collect()).collect();
            let expected = oracle::matmul(&oracle::matmul(&u, &rho0), &u_dag);
            let got: DensityMatrix = evolve_mixed(&state, t).unwrap();
            prop_assert!(max_diff_rows(&to_rows(got.matrix()), &expected) < 1e-10);
        }
    }

    #[test]
    fn eigenvalues_equal_sturm_bisection(model in small_model(8..=10)) {
        let n = model.n_sites;
        let sector = BasisSector::new(n, 3).unwrap();
        prop_assume!(sector.dim() <= 200);
        let h = build_hamiltonian(&model.lattice(), &sector, None).unwrap();
        let expected = oracle::symmetric_eigenvalues(&to_rows_real(h.to_dense().as_ref()));
        let full = SpectralDecomposition::diagonalize(&h).unwrap();
        let only = eigenvalues(&h, 1000).unwrap();
        for ((a, b), c) in full.values().iter().zip(&only).zip(&expected) {
            prop_assert!((a - c).abs() < 1e-9 && (b - c).abs() < 1e-9, "{a} {b} {c}");
        }
    }
}
