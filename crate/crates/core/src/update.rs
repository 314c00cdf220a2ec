//! Single-qubit Pauli measurement updates.
//!
//! Closed forms act on local pairs; [`project_operator`] works on any
//! operator in expectation coordinates. Qubits are 0-based here; after a
//! destructive measurement of qubit `i` the qubits above `i` shift down.

use crate::catalog::PhaseSpaceCatalog;
use crate::error::{Error, Result};
use crate::expectation::{ExpectationVector, FloatOperator};
use crate::local::{LocalPair, LocallyClosedSet};
use crate::pauli::{Axis, PauliPoint};
use crate::robustness::{decompose_probability, robustness, QuasiDistribution};
use crate::scalar::Scalar;
use crate::stabilizer::StabilizerProjector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MeasurementSpec {
    pub qubit: usize,
    pub axis: Axis,
    pub destructive: bool,
}

impl MeasurementSpec {
    pub fn destructive(qubit: usize, axis: Axis) -> Self {
        MeasurementSpec { qubit, axis, destructive: true }
    }

    pub fn nondestructive(qubit: usize, axis: Axis) -> Self {
        MeasurementSpec { qubit, axis, destructive: false }
    }

    fn point(&self, n: usize) -> Result<PauliPoint> {
        if self.qubit >= n {
            return Err(Error::invalid(format!("qubit {} outside register of {n}", self.qubit + 1)));
        }
        if self.axis == Axis::I {
            return Err(Error::invalid("measurement axis must be x, y or z"));
        }
        Ok(PauliPoint::local(n, self.qubit, self.axis))
    }
}

/// One outcome of a closed-form update. Probabilities and weights are
/// `0`, `1/2` or `1`, all exact in `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateOutcome {
    pub outcome: bool,
    pub probability: f64,
    pub successors: Vec<(f64, LocalPair)>,
}

fn deterministic(r: bool, successors: Vec<(f64, LocalPair)>) -> [UpdateOutcome; 2] {
    let hit = UpdateOutcome { outcome: r, probability: 1.0, successors };
    let miss = UpdateOutcome { outcome: !r, probability: 0.0, successors: Vec::new() };
    if r {
        [miss, hit]
    } else {
        [hit, miss]
    }
}

/// `(Ω_b, γ_b^r)` on the remaining qubits, before re-embedding.
fn reduced(pair: &LocalPair, b: &PauliPoint, q: usize, r: Option<bool>) -> LocalPair {
    let mut entries: Vec<(PauliPoint, bool)> = Vec::new();
    for (a, g) in pair.entries() {
        let c = a.axis(q);
        if c == Axis::I {
            entries.push((a.remove_qubit(q), g));
        } else if let Some(r) = r {
            if c == b.axis(q) {
                entries.push((a.add(b).remove_qubit(q), g ^ r));
            }
        }
    }
    entries.sort();
    let n = pair.n() - 1;
    let (points, gamma): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
    LocalPair::new_unchecked(LocallyClosedSet::from_sorted(n, points), gamma)
}

/// Destructive measurement: per outcome, the probability and the
/// `(n-1)`-qubit successor pair.
pub fn destructive_update(pair: &LocalPair, qubit: usize, axis: Axis) -> Result<[UpdateOutcome; 2]> {
    let b = MeasurementSpec::destructive(qubit, axis).point(pair.n())?;
    Ok(match pair.value(&b) {
        Some(r) => deterministic(r, vec![(1.0, reduced(pair, &b, qubit, None))]),
        None => [false, true].map(|r| UpdateOutcome {
            outcome: r,
            probability: 0.5,
            successors: vec![(1.0, reduced(pair, &b, qubit, Some(r)))],
        }),
    })
}

/// Non-destructive measurement: the register keeps its size.
pub fn nondestructive_update(pair: &LocalPair, qubit: usize, axis: Axis) -> Result<[UpdateOutcome; 2]> {
    let n = pair.n();
    let b = MeasurementSpec::nondestructive(qubit, axis).point(n)?;
    Ok(match pair.value(&b) {
        Some(r) => {
            let flipped: Vec<bool> = pair.entries().map(|(a, g)| g ^ a.symplectic(&b)).collect();
            let other = LocalPair::new_unchecked(pair.omega().clone(), flipped);
            deterministic(r, vec![(0.5, pair.clone()), (0.5, other)])
        }
        None => [false, true].map(|r| {
            let inner = reduced(pair, &b, qubit, Some(r));
            let mut entries: Vec<(PauliPoint, bool)> = Vec::with_capacity(2 * inner.omega().len());
            for (a, g) in inner.entries() {
                let lifted = a.insert_qubit(qubit);
                entries.push((lifted, g));
                entries.push((lifted.add(&b), g ^ r));
            }
            entries.sort();
            let (points, gamma): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
            let succ = LocalPair::new_unchecked(LocallyClosedSet::from_sorted(n, points), gamma);
            UpdateOutcome { outcome: r, probability: 0.5, successors: vec![(1.0, succ)] }
        }),
    })
}

/// Dispatches on [`MeasurementSpec::destructive`].
pub fn update(pair: &LocalPair, spec: &MeasurementSpec) -> Result<[UpdateOutcome; 2]> {
    if spec.destructive {
        destructive_update(pair, spec.qubit, spec.axis)
    } else {
        nondestructive_update(pair, spec.qubit, spec.axis)
    }
}

/// `Pi_b^r A Pi_b^r` for a local `b`, unnormalized:
/// `e'_a = (e_a + (-1)^{r + β(a,b)} e_{a+b}) / 2` when `[a,b] = 0`, else 0.
pub fn project_operator<T: Scalar>(op: &ExpectationVector<T>, b: &PauliPoint, r: bool) -> Result<ExpectationVector<T>> {
    if b.n() != op.n() {
        return Err(Error::DimensionMismatch(b.n(), op.n()));
    }
    if !b.is_local() || b.is_zero() {
        return Err(Error::invalid(format!("{b} is not a single-qubit point")));
    }
    Ok(project_unchecked(op, b, r))
}

fn project_unchecked<T: Scalar>(op: &ExpectationVector<T>, b: &PauliPoint, r: bool) -> ExpectationVector<T> {
    let n = op.n();
    let half = T::pow2_inv(1);
    let e = op.values();
    let out = (0..e.len())
        .map(|i| {
            let a = PauliPoint::from_index(n, i);
            if !a.commutes(b) {
                return T::zero();
            }
            let other = e[a.add(b).index()].clone();
            let cross = if r ^ a.beta_raw(b) { -other } else { other };
            (e[i].clone() + cross) * half.clone()
        })
        .collect();
    ExpectationVector::from_table(n, out).expect("same size")
}

/// `Tr_q`, unnormalized; `e'_{a'} = e_a` for `a` idle on qubit `q`.
pub fn partial_trace<T: Scalar>(op: &ExpectationVector<T>, q: usize) -> Result<ExpectationVector<T>> {
    let n = op.n();
    if q >= n {
        return Err(Error::invalid(format!("qubit {} outside register of {n}", q + 1)));
    }
    let e = (0..1usize << (2 * (n - 1))).map(|i| op.get(&PauliPoint::from_index(n - 1, i).insert_qubit(q)).clone()).collect();
    ExpectationVector::from_table(n - 1, e)
}

/// Unnormalized post-measurement operator `Φ^r(A)`; its trace is the
/// outcome probability.
pub fn measure_operator<T: Scalar>(op: &ExpectationVector<T>, spec: &MeasurementSpec, r: bool) -> Result<ExpectationVector<T>> {
    let b = spec.point(op.n())?;
    let projected = project_unchecked(op, &b, r);
    if spec.destructive {
        partial_trace(&projected, spec.qubit)
    } else {
        Ok(projected)
    }
}

/// How [`generic_update_distribution`] picks among decompositions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UpdateObjective {
    /// Any convex decomposition; fails outside the catalog hull.
    #[default]
    Feasibility,
    /// Minimal `‖q‖₁`, allowing negative weights.
    MinNorm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenericOutcome {
    pub outcome: bool,
    pub probability: f64,
    /// Weights scaled by `probability`, so they reconstruct `Φ^r(A)`.
    /// `None` for a zero-probability outcome.
    pub distribution: Option<QuasiDistribution>,
}

/// Outcome probabilities below this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Decomposes each post-measurement operator `Φ^r(A)` over `target`.
pub fn generic_update_distribution(
    op: &FloatOperator,
    spec: &MeasurementSpec,
    target: &PhaseSpaceCatalog,
    objective: UpdateObjective,
) -> Result<[GenericOutcome; 2]> {
    let out_n = if spec.destructive { op.n().saturating_sub(1) } else { op.n() };
    if target.n() != out_n {
        return Err(Error::DimensionMismatch(target.n(), out_n));
    }
    let one = |r: bool| -> Result<GenericOutcome> {
        let post = measure_operator(op, spec, r)?;
        let probability = *post.trace();
        if probability <= ZERO_PROBABILITY {
            return Ok(GenericOutcome { outcome: r, probability: probability.max(0.0), distribution: None });
        }
        let state = post.scale(&probability.recip());
        let mut q = match objective {
            UpdateObjective::Feasibility => decompose_probability(&state, target)?,
            UpdateObjective::MinNorm => robustness(&state, target)?.1,
        };
        for t in &mut q.terms {
            t.p *= probability;
        }
        q.one_norm *= probability;
        Ok(GenericOutcome { outcome: r, probability, distribution: Some(q) })
    };
    Ok([one(false)?, one(true)?])
}

/// Cumulative traces `t_k = Tr(Pi_{a_k} ... Pi_{a_1} A Pi_{a_1} ... Pi_{a_k})`
/// over the qubits of a local maximal stabilizer label, one per qubit. The
/// last entry is `Tr(Pi A)`; `t_k / t_{k-1}` is the conditional trace of the
/// normalized post-measurement operator wherever `t_{k-1} != 0`.
pub fn facet_chain<T: Scalar>(op: &ExpectationVector<T>, label: &StabilizerProjector) -> Result<Vec<T>> {
    let n = op.n();
    if label.n() != n {
        return Err(Error::DimensionMismatch(label.n(), n));
    }
    if label.subspace().dim() != n || !label.subspace().is_local() {
        return Err(Error::invalid("facet chain needs a local stabilizer state"));
    }
    let mut cur = op.clone();
    let mut traces = Vec::with_capacity(n);
    for q in 0..n {
        let (b, s) = Axis::LOCAL
            .iter()
            .map(|ax| PauliPoint::local(n, q, *ax))
            .find_map(|b| label.evaluate(&b).ok().map(|s| (b, s)))
            .ok_or_else(|| Error::invalid("label is not a product of single-qubit states"))?;
        cur = project_unchecked(&cur, &b, s);
        traces.push(cur.trace().clone());
    }
    Ok(traces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{eigenprojector, DenseOperator};
    use crate::expectation::{ExactOperator, FloatOperator};
    use crate::local::random_local_pair;
    use crate::scalar::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dense_projection(op: &FloatOperator, b: &PauliPoint, r: bool) -> DenseOperator {
        let p = eigenprojector(b, r).unwrap();
        p.mul(&op.to_matrix().unwrap()).mul(&p)
    }

    #[test]
    fn projection_matches_dense() {
        let op = FloatOperator::from_entries(
            2,
            [
                (PauliPoint::x_on(2, 0), 0.3),
                (PauliPoint::from_axes(&[Axis::Y, Axis::Z]), -0.4),
                (PauliPoint::from_axes(&[Axis::Z, Axis::X]), 0.2),
                (PauliPoint::from_axes(&[Axis::X, Axis::X]), 0.1),
            ],
        )
        .unwrap();
        for q in 0..2 {
            for ax in Axis::LOCAL {
                for r in [false, true] {
                    let b = PauliPoint::local(2, q, ax);
                    let got = project_operator(&op, &b, r).unwrap().to_matrix().unwrap();
                    assert!(got.max_abs_diff(&dense_projection(&op, &b, r)) < 1e-12);
                }
            }
        }
        assert!(project_operator(&op, &PauliPoint::from_axes(&[Axis::X, Axis::X]), false).is_err());
    }

    #[test]
    fn projection_examples() {
        let mixed = ExactOperator::maximally_mixed(1);
        let p = project_operator(&mixed, &PauliPoint::x_on(1, 0), false).unwrap();
        assert_eq!(p.trace(), &Rational::from_ratio(1, 2));
        let one = Rational::from_i64(1);
        let a = ExactOperator::from_entries(
            1,
            [(PauliPoint::x_on(1, 0), one.clone()), (PauliPoint::y_on(1, 0), one.clone()), (PauliPoint::z_on(1, 0), one)],
        )
        .unwrap();
        assert!(project_operator(&a, &PauliPoint::x_on(1, 0), true).unwrap().is_zero());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = FloatOperator::from_entries(1, [(PauliPoint::x_on(1, 0), h), (PauliPoint::y_on(1, 0), h)]).unwrap();
        let p = project_operator(&t, &PauliPoint::x_on(1, 0), false).unwrap();
        assert!((p.trace() - (1.0 + h) / 2.0).abs() < 1e-15);
    }

    fn weighted(outcome: &UpdateOutcome) -> FloatOperator {
        let n = outcome.successors[0].1.n();
        let mut acc = FloatOperator::zeros(n);
        for (w, p) in &outcome.successors {
            acc.add_scaled(&(w * outcome.probability), &p.operator());
        }
        acc
    }

    #[test]
    fn closed_forms_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            for _ in 0..40 {
                let pair = random_local_pair(n, &mut rng).unwrap();
                let op: FloatOperator = pair.operator();
                for q in 0..n {
                    for ax in Axis::LOCAL {
                        let b = PauliPoint::local(n, q, ax);
                        let des = destructive_update(&pair, q, ax).unwrap();
                        let non = nondestructive_update(&pair, q, ax).unwrap();
                        for r in [false, true] {
                            let dense = dense_projection(&op, &b, r);
                            let d = &des[r as usize];
                            let nd = &non[r as usize];
                            assert_eq!(d.outcome, r);
                            if d.probability == 0.0 {
                                assert!(dense.max_abs_diff(&DenseOperator::zeros(n)) < 1e-12);
                                assert!(nd.successors.is_empty());
                                continue;
                            }
                            for (_, s) in d.successors.iter().chain(&nd.successors) {
                                crate::local::validate_assignment(s.omega(), s.gamma()).unwrap();
                            }
                            assert!(weighted(nd).to_matrix().unwrap().max_abs_diff(&dense) < 1e-12);
                            let traced = dense.partial_trace(q);
                            if n == 1 {
                                assert!((traced.trace().re - d.probability).abs() < 1e-12);
                            } else {
                                assert!(weighted(d).to_matrix().unwrap().max_abs_diff(&traced) < 1e-12);
                            }
                        }
                        assert_eq!(des[0].probability + des[1].probability, 1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_of_deterministic_vertices() {
        let pair = LocalPair::deterministic(&[(true, false, false), (false, true, true)]);
        let out = destructive_update(&pair, 0, Axis::X).unwrap();
        assert_eq!(out[1].probability, 1.0);
        assert_eq!(out[1].successors[0].1, LocalPair::deterministic(&[(false, true, true)]));
    }

    #[test]
    fn facet_chain_reproduces_facet_value() {
        let op = ExactOperator::from_entries(
            2,
            [
                (PauliPoint::x_on(2, 0), Rational::from_ratio(1, 3)),
                (PauliPoint::from_axes(&[Axis::X, Axis::Z]), Rational::from_ratio(-1, 2)),
                (PauliPoint::z_on(2, 1), Rational::from_ratio(1, 5)),
            ],
        )
        .unwrap();
        for label in crate::stabilizer::enumerate_local_stabilizer_states(2).unwrap() {
            let chain = facet_chain(&op, &label).unwrap();
            assert_eq!(chain.last().unwrap(), &label.expectation(&op).unwrap());
        }
    }
}
