//! Isotropic subspaces, value assignments and stabilizer projectors.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;

use crate::dense::{pauli_matrix, DenseOperator};
use crate::error::{Error, Result};
use crate::expectation::ExpectationVector;
use crate::gf2::AffineSystem;
use crate::pauli::{all_points, Axis, PauliPoint};
use crate::scalar::{Rational, Scalar};

/// Subspace of `E_n` held as a reduced echelon basis.
///
/// Vectors are ordered by table index; each basis vector owns its highest
/// set bit and no other basis vector has that bit set. Basis vectors are
/// sorted by decreasing pivot, so two subspaces are equal iff their bases
/// are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: usize,
    basis: Vec<PauliPoint>,
}

fn pivot(a: &PauliPoint) -> usize {
    63 - (a.index() as u64).leading_zeros() as usize
}

impl Subspace {
    pub fn trivial(n: usize) -> Self {
        Subspace { n, basis: Vec::new() }
    }

    pub fn whole(n: usize) -> Self {
        Self::span_of(n, (0..2 * n).map(|i| PauliPoint::from_index(n, 1 << i)))
    }

    /// Span of arbitrary (possibly dependent) generators.
    pub fn span_of(n: usize, gens: impl IntoIterator<Item = PauliPoint>) -> Self {
        let mut s = Subspace::trivial(n);
        for g in gens {
            debug_assert_eq!(g.n(), n);
            s.insert(g);
        }
        s
    }

    /// Adds a generator, keeping the reduced form. Returns false when it
    /// was already in the span.
    fn insert(&mut self, g: PauliPoint) -> bool {
        let r = self.reduce(g);
        if r.is_zero() {
            return false;
        }
        let p = pivot(&r);
        for b in self.basis.iter_mut() {
            if (b.index() >> p) & 1 == 1 {
                *b = b.add(&r);
            }
        }
        self.basis.push(r);
        self.basis.sort_by_key(|b| std::cmp::Reverse(pivot(b)));
        true
    }

    fn reduce(&self, mut a: PauliPoint) -> PauliPoint {
        for b in &self.basis {
            if (a.index() >> pivot(b)) & 1 == 1 {
                a = a.add(b);
            }
        }
        a
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PauliPoint] {
        &self.basis
    }

    pub fn contains(&self, a: &PauliPoint) -> bool {
        self.reduce(*a).is_zero()
    }

    /// Mask over basis vectors whose sum is `a`.
    pub fn coordinates(&self, a: &PauliPoint) -> Option<u64> {
        let mut a = *a;
        let mut mask = 0u64;
        for (i, b) in self.basis.iter().enumerate() {
            if (a.index() >> pivot(b)) & 1 == 1 {
                a = a.add(b);
                mask |= 1 << i;
            }
        }
        a.is_zero().then_some(mask)
    }

    pub fn element(&self, mask: u64) -> PauliPoint {
        self.basis
            .iter()
            .enumerate()
            .filter(|(i, _)| (mask >> i) & 1 == 1)
            .fold(PauliPoint::zero(self.n), |acc, (_, b)| acc.add(b))
    }

    pub fn elements(&self) -> impl Iterator<Item = PauliPoint> + '_ {
        (0..1u64 << self.dim()).map(|m| self.element(m))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for b in &other.basis {
            s.insert(*b);
        }
        s
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let (small, big) = if self.dim() <= other.dim() { (self, other) } else { (other, self) };
        Subspace::span_of(self.n, small.elements().filter(|a| big.contains(a)))
    }

    /// Symplectic complement `{a : [a,b] = 0 for all b}`.
    pub fn perp(&self) -> Subspace {
        let n = self.n;
        // Unknowns: bit i of the table index of a (x-block then z-block).
        let mut sys = AffineSystem::new(2 * n);
        for b in &self.basis {
            let mut vars = Vec::new();
            for q in 0..n {
                if (b.z_bits() >> q) & 1 == 1 {
                    vars.push(q);
                }
                if (b.x_bits() >> q) & 1 == 1 {
                    vars.push(n + q);
                }
            }
            sys.push(&vars, false);
        }
        let sol = sys.solve().expect("homogeneous system is consistent");
        Subspace::span_of(
            n,
            sol.kernel.iter().map(|v| {
                let idx = (0..2 * n).filter(|&i| v.get(i)).map(|i| 1usize << i).sum();
                PauliPoint::from_index(n, idx)
            }),
        )
    }

    pub fn is_isotropic(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| self.basis[i + 1..].iter().all(|b| a.commutes(b)))
    }

    pub fn is_local_isotropic(&self) -> bool {
        let el: Vec<_> = self.elements().collect();
        el.iter().enumerate().all(|(i, a)| el[i + 1..].iter().all(|b| a.locally_commutes(b)))
    }
}

/// Pairwise commutation of generators (isotropy is bilinear).
pub fn is_isotropic(basis: &[PauliPoint]) -> bool {
    basis.iter().enumerate().all(|(i, a)| basis[i + 1..].iter().all(|b| a.commutes(b)))
}

/// Every pair of spanned elements locally commutes.
pub fn is_local_isotropic(basis: &[PauliPoint]) -> bool {
    match basis.first() {
        None => true,
        Some(b) => Subspace::span_of(b.n(), basis.iter().copied()).is_local_isotropic(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsotropicSubspace(Subspace);

impl IsotropicSubspace {
    pub fn new(n: usize, gens: impl IntoIterator<Item = PauliPoint>) -> Result<Self> {
        let s = Subspace::span_of(n, gens);
        if !s.is_isotropic() {
            return Err(Error::invalid("generators do not pairwise commute"));
        }
        Ok(IsotropicSubspace(s))
    }

    pub fn as_subspace(&self) -> &Subspace {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn basis(&self) -> &[PauliPoint] {
        self.0.basis()
    }

    pub fn contains(&self, a: &PauliPoint) -> bool {
        self.0.contains(a)
    }

    pub fn perp(&self) -> Subspace {
        self.0.perp()
    }

    pub fn is_maximal(&self) -> bool {
        self.dim() == self.n()
    }

    pub fn is_local(&self) -> bool {
        self.0.is_local_isotropic()
    }
}

/// Value assignment on an isotropic subspace, stored on its echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StabilizerProjector {
    subspace: IsotropicSubspace,
    bits: Vec<bool>,
}

pub type ValueAssignment = StabilizerProjector;

/// Reduced echelon basis that remembers which input generators each
/// vector is made of.
#[derive(Default)]
struct TrackedBasis {
    rows: Vec<(PauliPoint, u64)>,
}

impl TrackedBasis {
    fn insert(&mut self, g: PauliPoint, mask: u64) {
        let (mut v, mut m) = (g, mask);
        for (w, wm) in &self.rows {
            if (v.index() >> pivot(w)) & 1 == 1 {
                v = v.add(w);
                m ^= wm;
            }
        }
        if v.is_zero() {
            return;
        }
        let p = pivot(&v);
        for (w, wm) in self.rows.iter_mut() {
            if (w.index() >> p) & 1 == 1 {
                *w = w.add(&v);
                *wm ^= m;
            }
        }
        self.rows.push((v, m));
    }

    fn express(&self, a: &PauliPoint) -> Option<u64> {
        let (mut v, mut m) = (*a, 0u64);
        for (w, wm) in &self.rows {
            if (v.index() >> pivot(w)) & 1 == 1 {
                v = v.add(w);
                m ^= wm;
            }
        }
        v.is_zero().then_some(m)
    }
}

/// Value of a sum `b_{i1} + b_{i2} + ...` given the generator values,
/// accumulating `s(acc + b) = s(acc) + s(b) + beta(acc, b)`.
fn accumulate(basis: &[PauliPoint], bits: &[bool], mask: u64, n: usize) -> (PauliPoint, bool) {
    let mut acc = PauliPoint::zero(n);
    let mut val = false;
    for (i, b) in basis.iter().enumerate() {
        if (mask >> i) & 1 == 1 {
            val ^= bits[i] ^ acc.beta_raw(b);
            acc = acc.add(b);
        }
    }
    (acc, val)
}

impl StabilizerProjector {
    /// Projector `prod (1 + (-1)^{v_j} T_{g_j})/2` from commuting
    /// generators; dependent generators must carry consistent values.
    pub fn from_generators(n: usize, gens: &[(PauliPoint, bool)]) -> Result<Self> {
        let mut raw: Vec<PauliPoint> = Vec::new();
        let mut vals: Vec<bool> = Vec::new();
        let mut span = Subspace::trivial(n);
        for &(g, v) in gens {
            if g.n() != n {
                return Err(Error::DimensionMismatch(g.n(), n));
            }
            if let Some(b) = raw.iter().find(|b| !b.commutes(&g)) {
                return Err(Error::Anticommuting(b.to_string(), g.to_string()));
            }
            if span.contains(&g) {
                if g.is_zero() && v {
                    return Err(Error::invalid("value of the origin must be 0"));
                }
                let tmp = StabilizerProjector::raw_eval(&raw, &vals, &g, n);
                if tmp != v {
                    return Err(Error::invalid(format!("inconsistent value for {g}")));
                }
                continue;
            }
            span.insert(g);
            raw.push(g);
            vals.push(v);
        }
        let bits = span.basis().iter().map(|b| StabilizerProjector::raw_eval(&raw, &vals, b, n)).collect();
        Ok(StabilizerProjector { subspace: IsotropicSubspace(span), bits })
    }

    fn raw_eval(raw: &[PauliPoint], vals: &[bool], a: &PauliPoint, n: usize) -> bool {
        let mut tracked = TrackedBasis::default();
        for (i, g) in raw.iter().enumerate() {
            tracked.insert(*g, 1 << i);
        }
        let mask = tracked.express(a).expect("point outside span");
        accumulate(raw, vals, mask, n).1
    }

    pub fn n(&self) -> usize {
        self.subspace.n()
    }

    pub fn subspace(&self) -> &IsotropicSubspace {
        &self.subspace
    }

    pub fn basis(&self) -> &[PauliPoint] {
        self.subspace.basis()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn rank(&self) -> usize {
        1 << (self.n() - self.subspace.dim())
    }

    /// `s(a)` for `a` in the span.
    pub fn evaluate(&self, a: &PauliPoint) -> Result<bool> {
        let mask = self
            .subspace
            .as_subspace()
            .coordinates(a)
            .ok_or_else(|| Error::invalid(format!("{a} is outside the span")))?;
        Ok(accumulate(self.basis(), &self.bits, mask, self.n()).1)
    }

    /// All `(a, s(a))` over the span.
    pub fn signed_span(&self) -> Vec<(PauliPoint, bool)> {
        (0..1u64 << self.subspace.dim()).map(|m| accumulate(self.basis(), &self.bits, m, self.n())).collect()
    }

    /// `Tr(Pi A) = (1/2^k) sum_{a in I} (-1)^{s(a)} e_a`.
    pub fn expectation<T: Scalar>(&self, op: &ExpectationVector<T>) -> Result<T> {
        if op.n() != self.n() {
            return Err(Error::DimensionMismatch(self.n(), op.n()));
        }
        Ok(self.expectation_unchecked(op))
    }

    pub(crate) fn expectation_unchecked<T: Scalar>(&self, op: &ExpectationVector<T>) -> T {
        let mut acc = T::zero();
        for (a, s) in self.signed_span() {
            let v = op.get(&a).clone();
            acc = if s { acc - v } else { acc + v };
        }
        acc * T::pow2_inv(self.subspace.dim())
    }

    /// Normalized state `Pi / Tr(Pi)` as an expectation table.
    pub fn state<T: Scalar>(&self) -> ExpectationVector<T> {
        let mut v = ExpectationVector::zeros(self.n());
        for (a, s) in self.signed_span() {
            v.set(&a, T::sign_of(s));
        }
        v
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        let mut m = DenseOperator::identity(self.n());
        for (b, s) in self.basis().iter().zip(&self.bits) {
            let t = pauli_matrix(b)?.scale(if *s { -1.0 } else { 1.0 });
            m = m.mul(&DenseOperator::identity(self.n()).add(&t).scale(0.5));
        }
        Ok(m)
    }
}

/// Result of `Pi_I^s Pi_J^r Pi_I^s`.
#[derive(Clone, Debug, PartialEq)]
pub enum Sandwich {
    Zero,
    Scaled(Rational, StabilizerProjector),
}

/// `Pi_I^s Pi_J^r Pi_I^s = delta * |I^perp cap J|/|J| * Pi_{I + I^perp cap J}^{s*r}`.
pub fn sandwich(p: &StabilizerProjector, q: &StabilizerProjector) -> Result<Sandwich> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch(p.n(), q.n()));
    }
    let n = p.n();
    let i = p.subspace.as_subspace();
    let j = q.subspace.as_subspace();
    for a in i.intersection(j).elements() {
        if p.evaluate(&a)? != q.evaluate(&a)? {
            return Ok(Sandwich::Zero);
        }
    }
    let k = i.perp().intersection(j);
    let coeff = Rational::new(BigInt::one() << k.dim(), BigInt::one() << j.dim());
    let mut gens: Vec<(PauliPoint, bool)> = p.basis().iter().copied().zip(p.bits.iter().copied()).collect();
    for b in k.basis() {
        gens.push((*b, q.evaluate(b)?));
    }
    let proj = StabilizerProjector::from_generators(n, &gens)?;
    Ok(Sandwich::Scaled(coeff, proj))
}

/// Local stabilizer states: one axis per qubit and a sign per qubit.
///
/// Axis choices are enumerated by base-3 code with qubit 1 least
/// significant, signs by bit mask; `6^n` states in total.
pub fn enumerate_local_stabilizer_states(n: usize) -> Result<Vec<StabilizerProjector>> {
    if n > crate::expectation::TABLE_LIMIT {
        return Err(Error::TooManyQubits { what: "local stabilizer enumeration", n, limit: crate::expectation::TABLE_LIMIT });
    }
    let mut out = Vec::with_capacity(6usize.pow(n as u32));
    for code in 0..3usize.pow(n as u32) {
        let axes = local_axes(n, code);
        for signs in 0..1u64 << n {
            out.push(local_state(&axes, signs));
        }
    }
    Ok(out)
}

/// Axis per qubit for a base-3 code (qubit 1 least significant).
pub fn local_axes(n: usize, code: usize) -> Vec<Axis> {
    let mut c = code;
    (0..n)
        .map(|_| {
            let a = Axis::LOCAL[c % 3];
            c /= 3;
            a
        })
        .collect()
}

/// Product state with `axes[q]` measured to outcome bit `q` of `signs`.
pub fn local_state(axes: &[Axis], signs: u64) -> StabilizerProjector {
    let n = axes.len();
    let gens: Vec<_> = axes
        .iter()
        .enumerate()
        .map(|(q, a)| (PauliPoint::local(n, q, *a), (signs >> q) & 1 == 1))
        .collect();
    StabilizerProjector::from_generators(n, &gens).expect("local generators commute")
}

/// All maximal isotropic subspaces of `E_n`, sorted.
pub fn maximal_isotropic_subspaces(n: usize) -> Vec<IsotropicSubspace> {
    let mut found: BTreeSet<Subspace> = BTreeSet::new();
    let mut seen: BTreeSet<Subspace> = BTreeSet::new();
    let mut stack = vec![Subspace::trivial(n)];
    let points: Vec<PauliPoint> = all_points(n).skip(1).collect();
    while let Some(s) = stack.pop() {
        if s.dim() == n {
            found.insert(s);
            continue;
        }
        for a in &points {
            if s.contains(a) || !s.basis().iter().all(|b| b.commutes(a)) {
                continue;
            }
            let mut t = s.clone();
            t.insert(*a);
            if seen.insert(t.clone()) {
                stack.push(t);
            }
        }
    }
    found.into_iter().map(IsotropicSubspace).collect()
}

/// All stabilizer states for `n <= 3`, canonically ordered.
pub fn enumerate_stabilizer_states(n: usize) -> Result<Vec<StabilizerProjector>> {
    if n > 3 {
        return Err(Error::TooManyQubits { what: "stabilizer state enumeration", n, limit: 3 });
    }
    let mut out = Vec::new();
    for sub in maximal_isotropic_subspaces(n) {
        for signs in 0..1u64 << n {
            let bits = (0..n).map(|i| (signs >> i) & 1 == 1).collect();
            out.push(StabilizerProjector { subspace: sub.clone(), bits });
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expectation::FloatOperator;
    use crate::scalar::Rational;

    fn pp(s: &str) -> PauliPoint {
        PauliPoint::from_axes(&s.chars().map(|c| Axis::from_letter(c).unwrap()).collect::<Vec<_>>())
    }

    #[test]
    fn isotropy_examples() {
        assert!(is_isotropic(&[pp("XI"), pp("IX")]));
        assert!(is_local_isotropic(&[pp("XI"), pp("IX")]));
        assert!(is_isotropic(&[pp("XX"), pp("ZZ")]));
        assert!(!is_local_isotropic(&[pp("XX"), pp("ZZ")]));
        assert!(!is_isotropic(&[pp("X"), pp("Z")]));
    }

    #[test]
    fn evaluate_examples() {
        let p = StabilizerProjector::from_generators(2, &[(pp("XI"), false), (pp("IX"), true)]).unwrap();
        assert_eq!(p.evaluate(&pp("XX")).unwrap(), true);
        assert_eq!(p.evaluate(&pp("IX")).unwrap(), true);
        assert_eq!(p.evaluate(&pp("XI")).unwrap(), false);
        assert_eq!(p.evaluate(&pp("II")).unwrap(), false);
        assert!(p.evaluate(&pp("ZI")).is_err());
    }

    #[test]
    fn inconsistent_generators_rejected() {
        assert!(StabilizerProjector::from_generators(2, &[(pp("XI"), false), (pp("IX"), false), (pp("XX"), true)]).is_err());
        assert!(StabilizerProjector::from_generators(1, &[(pp("X"), false), (pp("Z"), false)]).is_err());
        // XX and ZZ with values 0,0 force YY to -1: s(YY) = 0 + 0 + beta(XX,ZZ) = 1
        let p = StabilizerProjector::from_generators(2, &[(pp("XX"), false), (pp("ZZ"), false)]).unwrap();
        assert_eq!(p.evaluate(&pp("YY")).unwrap(), true);
    }

    #[test]
    fn perp_examples() {
        let z1 = Subspace::span_of(1, [pp("Z")]);
        assert_eq!(z1.perp(), z1);
        assert_eq!(Subspace::trivial(1).perp(), Subspace::whole(1));
        let x1 = Subspace::span_of(2, [pp("XI")]);
        assert_eq!(x1.perp(), Subspace::span_of(2, [pp("XI"), pp("IX"), pp("IZ")]));
    }

    #[test]
    fn projector_expectation_examples() {
        let z = StabilizerProjector::from_generators(1, &[(pp("Z"), false)]).unwrap();
        let mm = ExpectationVector::<Rational>::maximally_mixed(1);
        assert_eq!(z.expectation(&mm).unwrap(), Rational::from_ratio(1, 2));
        let a000 = ExpectationVector::<Rational>::from_entries(
            1,
            [pp("X"), pp("Y"), pp("Z")].into_iter().map(|a| (a, Rational::from_i64(1))),
        )
        .unwrap();
        let xm = StabilizerProjector::from_generators(1, &[(pp("X"), true)]).unwrap();
        assert_eq!(xm.expectation(&a000).unwrap(), Rational::from_i64(0));
        // |T><T|: e_x = e_y = 1/sqrt2. Dense trace oracle.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = FloatOperator::from_entries(1, [(pp("X"), h), (pp("Y"), h)]).unwrap();
        let dense = xm.to_dense().unwrap().mul(&t.to_matrix().unwrap()).trace().re;
        assert!((xm.expectation(&t).unwrap() - dense).abs() < 1e-12);
        assert!((dense - (1.0 - h) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn sandwich_examples() {
        let z0 = StabilizerProjector::from_generators(1, &[(pp("Z"), false)]).unwrap();
        let z1 = StabilizerProjector::from_generators(1, &[(pp("Z"), true)]).unwrap();
        let x0 = StabilizerProjector::from_generators(1, &[(pp("X"), false)]).unwrap();
        assert_eq!(sandwich(&z0, &z0).unwrap(), Sandwich::Scaled(Rational::from_i64(1), z0.clone()));
        assert_eq!(sandwich(&z0, &z1).unwrap(), Sandwich::Zero);
        // dense: |0><0| |+><+| |0><0| = 1/2 |0><0|
        assert_eq!(sandwich(&z0, &x0).unwrap(), Sandwich::Scaled(Rational::from_ratio(1, 2), z0.clone()));
        let dense = z0.to_dense().unwrap().mul(&x0.to_dense().unwrap()).mul(&z0.to_dense().unwrap());
        assert!(dense.max_abs_diff(&z0.to_dense().unwrap().scale(0.5)) < 1e-15);
    }

    #[test]
    fn state_counts() {
        assert_eq!(enumerate_local_stabilizer_states(1).unwrap().len(), 6);
        assert_eq!(enumerate_local_stabilizer_states(2).unwrap().len(), 36);
        assert_eq!(enumerate_local_stabilizer_states(3).unwrap().len(), 216);
        assert_eq!(enumerate_stabilizer_states(1).unwrap().len(), 6);
        assert_eq!(enumerate_stabilizer_states(2).unwrap().len(), 60);
        assert!(enumerate_stabilizer_states(4).is_err());
    }

    #[test]
    fn three_qubit_stabilizer_count_matches_product_formula() {
        let subs = maximal_isotropic_subspaces(3);
        // prod_{k=1}^{n} (2^k + 1) maximal isotropics
        assert_eq!(subs.len(), 3 * 5 * 9);
        let states = enumerate_stabilizer_states(3).unwrap();
        assert_eq!(states.len(), 8 * 135);
        let distinct: BTreeSet<_> = states.iter().collect();
        assert_eq!(distinct.len(), 1080);
    }
}
