//! Graphs and magic cluster states `E(G) T^{⊗U} |+>^{⊗n}`.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::dense::{check_dense, DenseOperator};
use crate::error::{Error, Result};
use crate::expectation::FloatOperator;

/// Undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edges are normalized to `(min, max)` and sorted.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("edge ({}, {}) outside {n} vertices", i + 1, j + 1)));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop on vertex {}", i + 1)));
            }
            if !set.insert((i.min(j), i.max(j))) {
                return Err(Error::invalid(format!("duplicate edge ({}, {})", i + 1, j + 1)));
            }
        }
        Ok(Graph { n, edges: set.into_iter().collect() })
    }

    pub fn edgeless(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn path(n: usize) -> Self {
        Graph { n, edges: (1..n).map(|i| (i - 1, i)).collect() }
    }

    pub fn complete(n: usize) -> Self {
        Graph { n, edges: (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagicClusterSpec {
    pub graph: Graph,
    /// 0-based vertices carrying a `T` gate.
    pub magic: Vec<usize>,
}

impl MagicClusterSpec {
    pub fn new(graph: Graph, magic: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = magic.into_iter().collect();
        if let Some(v) = set.iter().find(|&&v| v >= graph.n()) {
            return Err(Error::invalid(format!("magic vertex {} outside the graph", v + 1)));
        }
        Ok(MagicClusterSpec { graph, magic: set.into_iter().collect() })
    }

    /// `U = V`.
    pub fn all_magic(graph: Graph) -> Self {
        let magic = (0..graph.n()).collect();
        MagicClusterSpec { graph, magic }
    }
}

/// Statevector with qubit 1 as the most significant index bit.
pub fn magic_cluster_statevector(spec: &MagicClusterSpec) -> Result<Vec<Complex64>> {
    let n = spec.graph.n();
    check_dense(n)?;
    let d = 1usize << n;
    let bit = |q: usize| 1usize << (n - 1 - q);
    let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let amp = (d as f64).sqrt().recip();
    Ok((0..d)
        .map(|i| {
            let mut v = Complex64::new(amp, 0.0);
            for &q in &spec.magic {
                if i & bit(q) != 0 {
                    v *= t;
                }
            }
            let flips = spec.graph.edges().iter().filter(|(a, b)| i & bit(*a) != 0 && i & bit(*b) != 0).count();
            if flips % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect())
}

/// Expectation table of `|ψ_{G,U}><ψ_{G,U}|`.
pub fn magic_cluster(spec: &MagicClusterSpec) -> Result<FloatOperator> {
    let psi = magic_cluster_statevector(spec)?;
    FloatOperator::from_matrix(&DenseOperator::from_statevector(&psi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{embed_single, hadamard, t_gate};
    use crate::pauli::{all_points, PauliPoint};
    use nalgebra::DMatrix;

    #[test]
    fn edgeless_plus_states() {
        let op = magic_cluster(&MagicClusterSpec::new(Graph::edgeless(3), []).unwrap()).unwrap();
        for a in all_points(3) {
            let want = if a.z_bits() == 0 { 1.0 } else { 0.0 };
            assert!((op.get(&a) - want).abs() < 1e-12, "{a}");
        }
    }

    #[test]
    fn single_t_state() {
        let op = magic_cluster(&MagicClusterSpec::new(Graph::edgeless(1), [0]).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((op.get(&PauliPoint::x_on(1, 0)) - h).abs() < 1e-12);
        assert!((op.get(&PauliPoint::y_on(1, 0)) - h).abs() < 1e-12);
        assert!(op.get(&PauliPoint::z_on(1, 0)).abs() < 1e-12);
    }

    #[test]
    fn matches_gate_sequence() {
        // Dense circuit: H on all, T on U, CZ as a diagonal matrix.
        for graph in [Graph::path(3), Graph::complete(3)] {
            let spec = MagicClusterSpec::all_magic(graph.clone());
            let mut psi = DMatrix::from_element(8, 1, Complex64::new(0.0, 0.0));
            psi[(0, 0)] = Complex64::new(1.0, 0.0);
            for q in 0..3 {
                psi = embed_single(3, q, &hadamard()).matrix() * psi;
                psi = embed_single(3, q, &t_gate()).matrix() * psi;
            }
            for &(a, b) in graph.edges() {
                for i in 0..8 {
                    if (i >> (2 - a)) & 1 == 1 && (i >> (2 - b)) & 1 == 1 {
                        psi[(i, 0)] = -psi[(i, 0)];
                    }
                }
            }
            let got = magic_cluster_statevector(&spec).unwrap();
            for i in 0..8 {
                assert!((got[i] - psi[(i, 0)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(2, [(0, 0)]).is_err());
        assert!(Graph::new(2, [(0, 2)]).is_err());
        assert!(Graph::new(2, [(0, 1), (1, 0)]).is_err());
        assert_eq!(Graph::complete(3).edges().len(), 3);
        assert!(MagicClusterSpec::new(Graph::path(2), [2]).is_err());
    }
}
