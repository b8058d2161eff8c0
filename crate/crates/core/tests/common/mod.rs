#![allow(dead_code)]

use edtherm_core::lattice::{Bipartition, Lattice};
use edtherm_core::{Complex64, Mat, MatRef};
use edtherm_oracles::{ComplexMatrix, RealMatrix};
use proptest::prelude::*;

/// A random graph on `n` sites with a random non-trivial cut.
#[derive(Clone, Debug)]
pub struct SmallModel {
    pub n_sites: usize,
    pub edges: Vec<(usize, usize)>,
    pub hopping: f64,
    pub interaction: f64,
    pub system: Vec<usize>,
}

impl SmallModel {
    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.n_sites, self.edges.iter().copied(), self.hopping, self.interaction).unwrap()
    }

    pub fn bipartition(&self) -> Bipartition {
        Bipartition::new(&self.lattice(), &self.system).unwrap()
    }
}

pub fn small_model(sites: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = SmallModel> {
    sites.prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let n_pairs = pairs.len();
        (
            prop::collection::vec(any::<bool>(), n_pairs),
            0.2f64..2.0,
            -2.0f64..2.0,
            1u64..(1u64 << n) - 1,
        )
            .prop_map(move |(keep, hopping, interaction, cut)| SmallModel {
                n_sites: n,
                edges: pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e).collect(),
                hopping,
                interaction,
                system: (0..n).filter(|s| cut >> s & 1 == 1).collect(),
            })
    })
}

/// Normalized complex vector built from raw parts.
pub fn normalized(raw: &[(f64, f64)]) -> Vec<Complex64> {
    let v: Vec<Complex64> = raw.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-6 {
        let mut e = vec![Complex64::new(0.0, 0.0); v.len()];
        e[0] = Complex64::new(1.0, 0.0);
        return e;
    }
    v.into_iter().map(|z| z / norm).collect()
}

pub fn raw_vector(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
}

pub fn to_rows_real(m: MatRef<'_, f64>) -> RealMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn to_rows(m: MatRef<'_, Complex64>) -> ComplexMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn from_rows(rows: &ComplexMatrix) -> Mat<Complex64> {
    Mat::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_diff_rows(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b).map(|(r, s)| max_diff(r, s)).fold(0.0, f64::max)
}
