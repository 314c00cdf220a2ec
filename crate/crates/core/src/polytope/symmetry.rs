//! Tensor products and the local Clifford and qubit-permutation actions.

use crate::error::{Error, Result};
use crate::expectation::ExpectationVector;
use crate::pauli::{all_points, Axis, PauliPoint};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clifford {
    H,
    S,
}

impl Clifford {
    /// For `A -> U A U^dag`: `e'_axis = sign * e_source`.
    fn source(self, axis: Axis) -> (Axis, bool) {
        match (self, axis) {
            (_, Axis::I) => (Axis::I, false),
            (Clifford::H, Axis::X) => (Axis::Z, false),
            (Clifford::H, Axis::Y) => (Axis::Y, true),
            (Clifford::H, Axis::Z) => (Axis::X, false),
            (Clifford::S, Axis::X) => (Axis::Y, true),
            (Clifford::S, Axis::Y) => (Axis::X, false),
            (Clifford::S, Axis::Z) => (Axis::Z, false),
        }
    }
}

fn nonzero<T: Scalar>(op: &ExpectationVector<T>) -> impl Iterator<Item = (PauliPoint, &T)> {
    op.values().iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (PauliPoint::from_index(op.n(), i), v))
}

/// `A ⊗ B`, with `A` on the leading qubits.
pub fn tensor<T: Scalar>(a: &ExpectationVector<T>, b: &ExpectationVector<T>) -> ExpectationVector<T> {
    let n = a.n() + b.n();
    let mut out = ExpectationVector::zeros(n);
    for (p, u) in nonzero(a) {
        for (q, v) in nonzero(b) {
            out.set(&p.concat(&q), u.clone() * v.clone());
        }
    }
    out
}

/// Conjugates qubit `q` (0-based) by `H` or `S`.
pub fn local_clifford_action<T: Scalar>(op: &ExpectationVector<T>, q: usize, g: Clifford) -> Result<ExpectationVector<T>> {
    let n = op.n();
    if q >= n {
        return Err(Error::invalid(format!("qubit {} outside register of {n}", q + 1)));
    }
    let mut out = ExpectationVector::zeros(n);
    for a in all_points(n) {
        let (src_axis, neg) = g.source(a.axis(q));
        let mut axes = a.axes();
        axes[q] = src_axis;
        let v = op.get(&PauliPoint::from_axes(&axes)).clone();
        out.set(&a, if neg { -v } else { v });
    }
    Ok(out)
}

/// Moves qubit `i` to position `perm[i]` (0-based).
pub fn permute_qubits<T: Scalar>(op: &ExpectationVector<T>, perm: &[usize]) -> Result<ExpectationVector<T>> {
    let n = op.n();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::invalid(format!("{perm:?} is not a permutation of {n} qubits")));
    }
    let mut out = ExpectationVector::zeros(n);
    for (a, v) in nonzero(op) {
        let mut axes = vec![Axis::I; n];
        for (i, &p) in perm.iter().enumerate() {
            axes[p] = a.axis(i);
        }
        out.set(&PauliPoint::from_axes(&axes), v.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{embed_single, hadamard, phase_gate};
    use crate::expectation::FloatOperator;
    use crate::scalar::Rational;

    fn eight_state(r: bool, s: bool, t: bool) -> FloatOperator {
        let sg = |b: bool| if b { -1.0 } else { 1.0 };
        FloatOperator::from_entries(
            1,
            [(PauliPoint::x_on(1, 0), sg(r)), (PauliPoint::y_on(1, 0), sg(s)), (PauliPoint::z_on(1, 0), sg(t))],
        )
        .unwrap()
    }

    fn conjugate(op: &FloatOperator, q: usize, u: &crate::dense::CMatrix) -> FloatOperator {
        let m = op.to_matrix().unwrap();
        let uu = embed_single(op.n(), q, u);
        FloatOperator::from_matrix_unchecked(&uu.mul(&m).mul(&uu.adjoint()))
    }

    #[test]
    fn hadamard_on_eight_state() {
        for code in 0..8u8 {
            let (r, s, t) = (code & 1 == 1, code & 2 == 2, code & 4 == 4);
            let h = local_clifford_action(&eight_state(r, s, t), 0, Clifford::H).unwrap();
            assert!(h.approx_eq(&eight_state(t, !s, r)));
        }
    }

    #[test]
    fn actions_match_dense_conjugation() {
        let op = FloatOperator::from_entries(
            2,
            [
                (PauliPoint::x_on(2, 0), 0.3),
                (PauliPoint::y_on(2, 1), -0.2),
                (PauliPoint::from_axes(&[Axis::Y, Axis::Z]), 0.1),
                (PauliPoint::from_axes(&[Axis::X, Axis::Y]), 0.25),
            ],
        )
        .unwrap();
        for q in 0..2 {
            let h = local_clifford_action(&op, q, Clifford::H).unwrap();
            assert!(h.max_abs_diff(&conjugate(&op, q, &hadamard())) < 1e-12);
            let s = local_clifford_action(&op, q, Clifford::S).unwrap();
            assert!(s.max_abs_diff(&conjugate(&op, q, &phase_gate())) < 1e-12);
        }
        let mixed = FloatOperator::maximally_mixed(2);
        assert_eq!(local_clifford_action(&mixed, 1, Clifford::S).unwrap(), mixed);
        assert!(local_clifford_action(&mixed, 2, Clifford::H).is_err());
    }

    #[test]
    fn tensor_matches_kronecker() {
        let a = eight_state(false, true, false);
        let b = eight_state(true, true, false);
        let t = tensor(&a, &b);
        let dense = a.to_matrix().unwrap().kron(&b.to_matrix().unwrap());
        assert!(t.to_matrix().unwrap().max_abs_diff(&dense) < 1e-12);
        let m = tensor(&a, &FloatOperator::maximally_mixed(1));
        assert!(m.support().all(|(p, _)| p.axis(1) == Axis::I));
    }

    #[test]
    fn swap_exchanges_factors() {
        let u: ExpectationVector<Rational> = ExpectationVector::from_entries(1, [(PauliPoint::x_on(1, 0), Rational::from_ratio(1, 2))]).unwrap();
        let v = ExpectationVector::from_entries(1, [(PauliPoint::z_on(1, 0), Rational::from_ratio(-1, 3))]).unwrap();
        assert_eq!(permute_qubits(&tensor(&u, &v), &[1, 0]).unwrap(), tensor(&v, &u));
        assert!(permute_qubits(&tensor(&u, &v), &[0, 0]).is_err());
    }
}
