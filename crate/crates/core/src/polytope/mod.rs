//! The local Λ polytope: facet systems, membership and vertices.
//!
//! A facet is labelled by a stabilizer projector `Pi` and reads
//! `Tr(Pi A) = 2^-k sum_{a in I} (-1)^{s(a)} e_a >= 0`. Its integer row is
//! the signed indicator of the span over all `4^n` coordinates, coordinate
//! `0` playing the role of the constant term.

pub mod dd;
pub mod ns;
pub mod rank;
pub mod symmetry;

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expectation::{ExactOperator, ExpectationVector, TABLE_LIMIT};
use crate::scalar::Scalar;
use crate::stabilizer::{enumerate_local_stabilizer_states, enumerate_stabilizer_states, StabilizerProjector};

pub use dd::{enumerate_vertices, DdOptions, VertexSet};
pub use ns::{from_ns_table, to_ns_table, NsTable};
pub use symmetry::{local_clifford_action, permute_qubits, tensor, Clifford};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    label: StabilizerProjector,
    /// `(index, negative)` over the span, sorted by index.
    terms: Vec<(usize, bool)>,
}

impl Facet {
    pub fn new(label: StabilizerProjector) -> Self {
        let mut terms: Vec<(usize, bool)> = label.signed_span().into_iter().map(|(a, s)| (a.index(), s)).collect();
        terms.sort_unstable();
        Facet { label, terms }
    }

    pub fn label(&self) -> &StabilizerProjector {
        &self.label
    }

    pub fn terms(&self) -> &[(usize, bool)] {
        &self.terms
    }

    /// The normal is the integer row times `2^-scale_log2`.
    pub fn scale_log2(&self) -> usize {
        self.label.subspace().dim()
    }

    /// Dense `±1/0` row over all `4^n` coordinates.
    pub fn integer_row(&self) -> Vec<i64> {
        let mut row = vec![0; 1 << (2 * self.label.n())];
        for &(i, neg) in &self.terms {
            row[i] = if neg { -1 } else { 1 };
        }
        row
    }

    /// Dense normal with the `2^-k` scale applied.
    pub fn normal<T: Scalar>(&self) -> Vec<T> {
        let w = T::pow2_inv(self.scale_log2());
        let mut row = vec![T::zero(); 1 << (2 * self.label.n())];
        for &(i, neg) in &self.terms {
            row[i] = if neg { -w.clone() } else { w.clone() };
        }
        row
    }

    /// `Tr(Pi A)`; `A` need not be trace-one.
    pub fn value<T: Scalar>(&self, op: &ExpectationVector<T>) -> T {
        let e = op.values();
        let mut acc = T::zero();
        for &(i, neg) in &self.terms {
            if neg {
                acc = acc - e[i].clone();
            } else {
                acc = acc + e[i].clone();
            }
        }
        acc * T::pow2_inv(self.scale_log2())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetSystem {
    n: usize,
    facets: Vec<Facet>,
}

impl FacetSystem {
    pub fn from_projectors(n: usize, labels: impl IntoIterator<Item = StabilizerProjector>) -> Result<Self> {
        if n > TABLE_LIMIT {
            return Err(Error::TooManyQubits { what: "facet system", n, limit: TABLE_LIMIT });
        }
        let mut facets = Vec::new();
        for p in labels {
            if p.n() != n {
                return Err(Error::DimensionMismatch(p.n(), n));
            }
            facets.push(Facet::new(p));
        }
        Ok(FacetSystem { n, facets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    /// `Tr(Pi_j A)` for every facet, in order.
    pub fn slacks<T: Scalar>(&self, op: &ExpectationVector<T>) -> Result<Vec<T>> {
        if op.n() != self.n {
            return Err(Error::DimensionMismatch(op.n(), self.n));
        }
        Ok(self.facets.par_iter().map(|f| f.value(op)).collect())
    }
}

/// Facets of `Λ_n^loc`: one per local stabilizer state.
pub fn local_lambda_facets(n: usize) -> Result<FacetSystem> {
    FacetSystem::from_projectors(n, enumerate_local_stabilizer_states(n)?)
}

/// Facets of the full `Λ_n`: one per stabilizer state (`n <= 3`).
pub fn full_lambda_facets(n: usize) -> Result<FacetSystem> {
    FacetSystem::from_projectors(n, enumerate_stabilizer_states(n)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MembershipStatus {
    Interior,
    Boundary,
    Outside,
}

impl MembershipStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MembershipStatus::Interior => "interior",
            MembershipStatus::Boundary => "boundary",
            MembershipStatus::Outside => "outside",
        }
    }

    pub fn is_member(self) -> bool {
        self != MembershipStatus::Outside
    }
}

/// Facet indices refer to the system the report was computed against.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport<T> {
    pub status: MembershipStatus,
    pub min_slack: T,
    pub violated: Vec<usize>,
    pub tight: Vec<usize>,
}

/// Exact in rational mode; `|slack| <= 1e-9` is tight in double mode.
pub fn membership<T: Scalar>(op: &ExpectationVector<T>, system: &FacetSystem) -> Result<MembershipReport<T>> {
    let slacks = system.slacks(op)?;
    let mut violated = Vec::new();
    let mut tight = Vec::new();
    let mut min_slack: Option<T> = None;
    for (j, s) in slacks.into_iter().enumerate() {
        match s.sign_tol() {
            Ordering::Less => violated.push(j),
            Ordering::Equal => tight.push(j),
            Ordering::Greater => {}
        }
        if min_slack.as_ref().is_none_or(|m| s < *m) {
            min_slack = Some(s);
        }
    }
    let status = if !violated.is_empty() {
        MembershipStatus::Outside
    } else if !tight.is_empty() {
        MembershipStatus::Boundary
    } else {
        MembershipStatus::Interior
    };
    Ok(MembershipReport { status, min_slack: min_slack.unwrap_or_else(T::one), violated, tight })
}

/// True iff the tight facet normals have rank `4^n - 1`.
pub fn is_vertex(op: &ExactOperator, system: &FacetSystem) -> Result<bool> {
    let report = membership(op, system)?;
    if report.status == MembershipStatus::Outside {
        return Err(Error::OutsidePolytope(report.min_slack.to_f64()));
    }
    let d = 1usize << (2 * system.n());
    let rows: Vec<Vec<i64>> = report.tight.iter().map(|&j| system.facets()[j].integer_row()[1..].to_vec()).collect();
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    if refs.len() < d - 1 {
        return Ok(false);
    }
    Ok(rank::rank_at_least(&refs, d - 1, rank::modular_rank_is_exact(&refs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Axis, PauliPoint};
    use crate::scalar::Rational;
    use crate::stabilizer::local_state;

    fn eight_state(r: bool, s: bool, t: bool) -> ExactOperator {
        let sign = |b: bool| Rational::from_i64(if b { -1 } else { 1 });
        ExactOperator::from_entries(
            1,
            [
                (PauliPoint::x_on(1, 0), sign(r)),
                (PauliPoint::y_on(1, 0), sign(s)),
                (PauliPoint::z_on(1, 0), sign(t)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn facet_counts() {
        assert_eq!(local_lambda_facets(1).unwrap().len(), 6);
        assert_eq!(local_lambda_facets(2).unwrap().len(), 36);
        assert_eq!(local_lambda_facets(3).unwrap().len(), 216);
        assert_eq!(full_lambda_facets(2).unwrap().len(), 60);
    }

    #[test]
    fn facet_value_matches_projector_expectation() {
        let sys = local_lambda_facets(2).unwrap();
        let op = ExactOperator::from_entries(
            2,
            [(PauliPoint::x_on(2, 0), Rational::from_ratio(1, 3)), (PauliPoint::from_axes(&[Axis::X, Axis::Z]), Rational::from_ratio(-1, 5))],
        )
        .unwrap();
        for f in sys.facets() {
            assert_eq!(f.value(&op), f.label().expectation(&op).unwrap());
        }
    }

    #[test]
    fn membership_examples() {
        let sys = local_lambda_facets(1).unwrap();
        let mixed = ExactOperator::maximally_mixed(1);
        let r = membership(&mixed, &sys).unwrap();
        assert_eq!(r.status, MembershipStatus::Interior);
        assert_eq!(r.min_slack, Rational::from_ratio(1, 2));

        let a = eight_state(false, false, false);
        let r = membership(&a, &sys).unwrap();
        assert_eq!(r.status, MembershipStatus::Boundary);
        let tight: Vec<_> = r.tight.iter().map(|&j| sys.facets()[j].label().clone()).collect();
        assert_eq!(tight.len(), 3);
        for ax in Axis::LOCAL {
            assert!(tight.contains(&local_state(&[ax], 1)));
        }

        let out = ExactOperator::from_entries(1, [(PauliPoint::x_on(1, 0), Rational::from_i64(2))]).unwrap();
        let r = membership(&out, &sys).unwrap();
        assert_eq!(r.status, MembershipStatus::Outside);
        assert_eq!(r.violated.len(), 1);
        assert_eq!(sys.facets()[r.violated[0]].label(), &local_state(&[Axis::X], 1));
    }

    #[test]
    fn double_mode_tolerance() {
        let sys = local_lambda_facets(1).unwrap();
        let mut op = crate::FloatOperator::maximally_mixed(1);
        op.set(&PauliPoint::x_on(1, 0), 1.0 + 5e-10);
        let r = membership(&op, &sys).unwrap();
        assert_eq!(r.status, MembershipStatus::Boundary);
    }

    #[test]
    fn vertex_checks() {
        let sys = local_lambda_facets(1).unwrap();
        assert!(is_vertex(&eight_state(true, false, true), &sys).unwrap());
        assert!(!is_vertex(&ExactOperator::maximally_mixed(1), &sys).unwrap());
        let out = ExactOperator::from_entries(1, [(PauliPoint::x_on(1, 0), Rational::from_i64(2))]).unwrap();
        assert!(is_vertex(&out, &sys).is_err());
        let sys2 = local_lambda_facets(2).unwrap();
        let t = tensor(&eight_state(false, false, false), &eight_state(true, true, true));
        assert!(is_vertex(&t, &sys2).unwrap());
    }
}
