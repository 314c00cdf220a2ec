//! Locally closed sets `Ω ⊆ E_n` and local pairs `(Ω, γ)`.
//!
//! `Ω` is closed under sums of locally commuting elements and `γ` is
//! additive on such pairs. Pairs generate the operators
//! `A = 2^-n sum_{a in Ω} (-1)^{γ(a)} T_a`.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::expectation::{ExactOperator, ExpectationVector, TABLE_LIMIT};
use crate::gf2::{AffineSystem, SolutionSpace};
use crate::pauli::{all_points, max_weight_code, max_weight_point, PauliPoint};
use crate::scalar::Scalar;

const ABSENT: u32 = u32::MAX;

/// Elements are kept sorted; `index` maps a table index to a position.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LocallyClosedSet {
    n: usize,
    elements: Vec<PauliPoint>,
    index: Vec<u32>,
}

impl fmt::Debug for LocallyClosedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocallyClosedSet").field("n", &self.n).field("elements", &self.elements).finish()
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > TABLE_LIMIT {
        return Err(Error::TooManyQubits { what: "locally closed set", n, limit: TABLE_LIMIT });
    }
    Ok(())
}

impl LocallyClosedSet {
    pub(crate) fn from_sorted(n: usize, elements: Vec<PauliPoint>) -> Self {
        let mut index = vec![ABSENT; 1 << (2 * n)];
        for (i, a) in elements.iter().enumerate() {
            index[a.index()] = i as u32;
        }
        LocallyClosedSet { n, elements, index }
    }

    /// Checks that the set contains `0` and is locally closed.
    pub fn new(n: usize, elements: impl IntoIterator<Item = PauliPoint>) -> Result<Self> {
        check_n(n)?;
        let mut set = BTreeSet::new();
        for a in elements {
            if a.n() != n {
                return Err(Error::DimensionMismatch(a.n(), n));
            }
            set.insert(a);
        }
        let s = LocallyClosedSet::from_sorted(n, set.into_iter().collect());
        if !s.contains(&PauliPoint::zero(n)) {
            return Err(Error::invalid("a locally closed set must contain 0"));
        }
        for a in &s.elements {
            for b in &s.elements {
                if a.locally_commutes(b) && !s.contains(&a.add(b)) {
                    return Err(Error::invalid(format!("not locally closed: {a} + {b} missing")));
                }
            }
        }
        Ok(s)
    }

    /// `E_n` itself.
    pub fn whole(n: usize) -> Self {
        LocallyClosedSet::from_sorted(n, all_points(n).collect())
    }

    /// `{0} ∪ E_n^maxw`.
    pub fn max_weight(n: usize) -> Self {
        let mut v: Vec<PauliPoint> = std::iter::once(PauliPoint::zero(n)).chain(crate::pauli::max_weight_points(n)).collect();
        v.sort();
        LocallyClosedSet::from_sorted(n, v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[PauliPoint] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, a: &PauliPoint) -> Option<usize> {
        if a.n() != self.n {
            return None;
        }
        match self.index[a.index()] {
            ABSENT => None,
            i => Some(i as usize),
        }
    }

    pub fn contains(&self, a: &PauliPoint) -> bool {
        self.position(a).is_some()
    }

    /// Closed under all commuting sums, not only locally commuting ones.
    pub fn is_commuting_closed(&self) -> bool {
        self.elements.iter().all(|a| self.elements.iter().all(|b| !a.commutes(b) || self.contains(&a.add(b))))
    }

    /// Pairs `(i, j, k)` with `a_i, a_j` locally commuting, `i < j` and
    /// `a_i + a_j = a_k`.
    fn sum_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate().skip(i + 1) {
                if a.locally_commutes(b) {
                    let k = self.position(&a.add(b)).expect("closed set");
                    out.push((i, j, k));
                }
            }
        }
        out
    }

    /// All local value assignments, as the solution space of the additivity
    /// constraints over element positions.
    pub fn assignment_space(&self) -> SolutionSpace {
        self.assignment_system().solve().expect("the zero assignment is always valid")
    }

    fn assignment_system(&self) -> AffineSystem {
        let mut sys = AffineSystem::new(self.len());
        sys.push(&[self.position(&PauliPoint::zero(self.n)).expect("contains 0")], false);
        for (i, j, k) in self.sum_triples() {
            sys.push(&[i, j, k], false);
        }
        sys
    }
}

/// Least locally closed superset of `seed ∪ {0}`.
pub fn local_closure(n: usize, seed: impl IntoIterator<Item = PauliPoint>) -> Result<LocallyClosedSet> {
    check_n(n)?;
    let mut member = vec![false; 1 << (2 * n)];
    let mut list: Vec<PauliPoint> = Vec::new();
    let mut work: Vec<PauliPoint> = Vec::new();
    let push = |a: PauliPoint, member: &mut Vec<bool>, work: &mut Vec<PauliPoint>| {
        if !member[a.index()] {
            member[a.index()] = true;
            work.push(a);
        }
    };
    push(PauliPoint::zero(n), &mut member, &mut work);
    for a in seed {
        if a.n() != n {
            return Err(Error::DimensionMismatch(a.n(), n));
        }
        push(a, &mut member, &mut work);
    }
    while let Some(a) = work.pop() {
        let mut sums = Vec::new();
        for b in &list {
            if a.locally_commutes(b) {
                sums.push(a.add(b));
            }
        }
        list.push(a);
        for s in sums {
            push(s, &mut member, &mut work);
        }
    }
    list.sort();
    Ok(LocallyClosedSet::from_sorted(n, list))
}

/// First pair `(a, b)` of locally commuting elements with
/// `γ(a + b) != γ(a) + γ(b)`, or a nonzero `γ(0)`.
pub fn validate_assignment(omega: &LocallyClosedSet, gamma: &[bool]) -> Result<()> {
    if gamma.len() != omega.len() {
        return Err(Error::invalid(format!("expected {} values, got {}", omega.len(), gamma.len())));
    }
    let zero = PauliPoint::zero(omega.n());
    if gamma[omega.position(&zero).expect("contains 0")] {
        return Err(Error::InvalidAssignment(zero.to_string(), zero.to_string()));
    }
    for (i, j, k) in omega.sum_triples() {
        if gamma[i] ^ gamma[j] != gamma[k] {
            return Err(Error::InvalidAssignment(omega.elements[i].to_string(), omega.elements[j].to_string()));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairClass {
    Deterministic,
    Cnc,
    MaxWeight,
    Generic,
}

impl PairClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PairClass::Deterministic => "deterministic",
            PairClass::Cnc => "cnc",
            PairClass::MaxWeight => "maxweight",
            PairClass::Generic => "generic",
        }
    }
}

/// A locally closed set with a valid local value assignment, `gamma[i]`
/// belonging to `omega.elements()[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalPair {
    omega: LocallyClosedSet,
    gamma: Vec<bool>,
}

impl PartialOrd for LocalPair {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LocalPair {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.omega.n, &self.omega.elements, &self.gamma).cmp(&(other.omega.n, &other.omega.elements, &other.gamma))
    }
}

impl LocalPair {
    pub fn new(omega: LocallyClosedSet, gamma: Vec<bool>) -> Result<Self> {
        validate_assignment(&omega, &gamma)?;
        Ok(LocalPair { omega, gamma })
    }

    pub(crate) fn new_unchecked(omega: LocallyClosedSet, gamma: Vec<bool>) -> Self {
        debug_assert!(validate_assignment(&omega, &gamma).is_ok());
        LocalPair { omega, gamma }
    }

    pub fn from_fn(omega: LocallyClosedSet, f: impl Fn(&PauliPoint) -> bool) -> Result<Self> {
        let gamma = omega.elements.iter().map(f).collect();
        LocalPair::new(omega, gamma)
    }

    /// Builds a pair from explicit `(point, value)` entries.
    pub fn from_entries(n: usize, entries: &[(PauliPoint, bool)]) -> Result<Self> {
        let omega = LocallyClosedSet::new(n, entries.iter().map(|e| e.0))?;
        let mut gamma = vec![false; omega.len()];
        for (a, v) in entries {
            gamma[omega.position(a).expect("just inserted")] = *v;
        }
        LocalPair::new(omega, gamma)
    }

    /// Recovers `(Ω, γ)` from an operator whose expectations are `±1` on
    /// their support.
    pub fn from_operator<T: Scalar>(op: &ExpectationVector<T>) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, v) in op.values().iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let neg = if v.approx_eq(&T::one()) {
                false
            } else if v.approx_eq(&-T::one()) {
                true
            } else {
                return Err(Error::invalid("expectations are not all in {-1, 0, 1}"));
            };
            entries.push((PauliPoint::from_index(op.n(), i), neg));
        }
        LocalPair::from_entries(op.n(), &entries)
    }

    /// `(E_n, γ)` for the product of eight-state vertices `A^{r_i s_i t_i}`;
    /// `signs[q] = (r, s, t)`.
    pub fn deterministic(signs: &[(bool, bool, bool)]) -> Self {
        let n = signs.len();
        let omega = LocallyClosedSet::whole(n);
        let gamma = omega
            .elements
            .iter()
            .map(|a| {
                (0..n).fold(false, |acc, q| {
                    let (r, s, t) = signs[q];
                    acc ^ match a.axis(q) {
                        crate::pauli::Axis::I => false,
                        crate::pauli::Axis::X => r,
                        crate::pauli::Axis::Y => s,
                        crate::pauli::Axis::Z => t,
                    }
                })
            })
            .collect();
        LocalPair::new_unchecked(omega, gamma)
    }

    /// `({0} ∪ E_n^maxw, γ)` with `γ(a) = f(code(a))`, `f` a table over
    /// `3^n` base-3 codes.
    pub fn max_weight(n: usize, f: &[bool]) -> Result<Self> {
        if f.len() != 3usize.pow(n as u32) {
            return Err(Error::invalid(format!("expected {} function values, got {}", 3usize.pow(n as u32), f.len())));
        }
        let omega = LocallyClosedSet::max_weight(n);
        let gamma = omega.elements.iter().map(|a| max_weight_code(a).is_some_and(|c| f[c])).collect();
        Ok(LocalPair::new_unchecked(omega, gamma))
    }

    pub fn n(&self) -> usize {
        self.omega.n
    }

    pub fn omega(&self) -> &LocallyClosedSet {
        &self.omega
    }

    pub fn gamma(&self) -> &[bool] {
        &self.gamma
    }

    pub fn value(&self, a: &PauliPoint) -> Option<bool> {
        self.omega.position(a).map(|i| self.gamma[i])
    }

    /// `(a, γ(a))` over `Ω`.
    pub fn entries(&self) -> impl Iterator<Item = (PauliPoint, bool)> + '_ {
        self.omega.elements.iter().copied().zip(self.gamma.iter().copied())
    }

    /// `e_a = (-1)^{γ(a)}` on `Ω`, zero elsewhere.
    pub fn operator<T: Scalar>(&self) -> ExpectationVector<T> {
        let mut v = ExpectationVector::zeros(self.n());
        for (a, g) in self.entries() {
            v.set(&a, T::sign_of(g));
        }
        v
    }

    /// `Ω` closed under commuting sums and `γ` additive up to `β` there.
    pub fn is_cnc(&self) -> bool {
        let els = &self.omega.elements;
        for (i, a) in els.iter().enumerate() {
            for (j, b) in els.iter().enumerate().skip(i) {
                if !a.commutes(b) {
                    continue;
                }
                let Some(k) = self.omega.position(&a.add(b)) else { return false };
                if self.gamma[i] ^ self.gamma[j] ^ a.beta_raw(b) != self.gamma[k] {
                    return false;
                }
            }
        }
        true
    }

    /// Every class tag that applies; `[Generic]` when none does.
    pub fn classes(&self) -> Vec<PairClass> {
        let n = self.n();
        let mut out = Vec::new();
        if self.omega.len() == 1 << (2 * n) {
            out.push(PairClass::Deterministic);
        }
        if n > 0 && self.omega == LocallyClosedSet::max_weight(n) {
            out.push(PairClass::MaxWeight);
        }
        if self.is_cnc() {
            out.push(PairClass::Cnc);
        }
        if out.is_empty() {
            out.push(PairClass::Generic);
        }
        out
    }
}

/// Primary class tag: deterministic, then max-weight, then CNC.
pub fn classify(pair: &LocalPair) -> PairClass {
    pair.classes()[0]
}

pub fn pair_operator<T: Scalar>(pair: &LocalPair) -> ExpectationVector<T> {
    pair.operator()
}

/// Can `γ` be extended to a valid assignment on the closure of `Ω ∪ {a}`?
pub fn extends_to(pair: &LocalPair, a: &PauliPoint) -> Result<bool> {
    let closure = local_closure(pair.n(), pair.omega.elements.iter().copied().chain(std::iter::once(*a)))?;
    let mut sys = closure.assignment_system();
    for (b, g) in pair.entries() {
        sys.push(&[closure.position(&b).expect("superset")], g);
    }
    Ok(sys.solve().is_some())
}

/// Maximal with respect to `⪯`: no point outside `Ω` admits an extension.
pub fn is_maximal(pair: &LocalPair) -> Result<bool> {
    for a in all_points(pair.n()) {
        if !pair.omega.contains(&a) && extends_to(pair, &a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_table(n: usize, f: &[bool]) -> Result<()> {
    let expect = 3usize.pow(n as u32);
    if f.len() != expect {
        return Err(Error::invalid(format!("expected a table of {expect} values, got {}", f.len())));
    }
    Ok(())
}

fn digit(code: usize, i: usize) -> usize {
    (code / 3usize.pow(i as u32)) % 3
}

fn with_digit(code: usize, i: usize, v: usize) -> usize {
    let p = 3usize.pow(i as u32);
    code - digit(code, i) * p + v * p
}

/// `f = c + sum_i g_i(s_i)`.
pub fn is_npartite_linear(n: usize, f: &[bool]) -> Result<bool> {
    check_table(n, f)?;
    for i in 0..n {
        for v in 1..3 {
            let mut diff = None;
            for code in 0..f.len() {
                if digit(code, i) != 0 {
                    continue;
                }
                let d = f[code] ^ f[with_digit(code, i, v)];
                if *diff.get_or_insert(d) != d {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `f = g(s_A) + h(s_B)` for some split of the parties into two nonempty
/// blocks.
pub fn is_bipartite_linear(n: usize, f: &[bool]) -> Result<bool> {
    check_table(n, f)?;
    if n < 2 {
        return Ok(false);
    }
    let pw: Vec<usize> = (0..n).map(|i| 3usize.pow(i as u32)).collect();
    // Party 1 always in block A; B = set bits of `mask` shifted by one.
    'split: for mask in 1..1usize << (n - 1) {
        let in_b = |i: usize| i > 0 && (mask >> (i - 1)) & 1 == 1;
        let split = |code: usize| -> (usize, usize) {
            let mut a = 0;
            let mut b = 0;
            for i in 0..n {
                let d = digit(code, i) * pw[i];
                if in_b(i) {
                    b += d;
                } else {
                    a += d;
                }
            }
            (a, b)
        };
        let parts: Vec<(usize, usize)> = (0..f.len()).map(split).collect();
        let a_vals: BTreeSet<usize> = parts.iter().map(|p| p.0).collect();
        let b_vals: BTreeSet<usize> = parts.iter().map(|p| p.1).collect();
        let (a0, b0) = (*a_vals.iter().next().unwrap(), *b_vals.iter().next().unwrap());
        for &a in &a_vals {
            for &b in &b_vals {
                if f[a + b] ^ f[a + b0] ^ f[a0 + b] ^ f[a0 + b0] {
                    continue 'split;
                }
            }
        }
        return Ok(true);
    }
    Ok(false)
}

/// Random local pair: the closure of a few random points with a uniformly
/// random valid assignment.
pub fn random_local_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<LocalPair> {
    let d = 1usize << (2 * n);
    let k = rng.random_range(0..=n + 2);
    let seed: Vec<PauliPoint> = (0..k).map(|_| PauliPoint::from_index(n, rng.random_range(0..d))).collect();
    let omega = local_closure(n, seed)?;
    let space = omega.assignment_space();
    let gamma = space.combine(|_| rng.random_bool(0.5));
    let gamma = (0..omega.len()).map(|i| gamma.get(i)).collect();
    Ok(LocalPair::new_unchecked(omega, gamma))
}

/// Random max-weight pair from a uniformly random function table.
pub fn random_max_weight_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LocalPair {
    let f: Vec<bool> = (0..3usize.pow(n as u32)).map(|_| rng.random_bool(0.5)).collect();
    LocalPair::max_weight(n, &f).expect("table size matches")
}

/// Operator of a max-weight pair, by function table.
pub fn max_weight_operator(n: usize, f: &[bool]) -> Result<ExactOperator> {
    let mut op = ExactOperator::maximally_mixed(n);
    check_table(n, f)?;
    for (code, v) in f.iter().enumerate() {
        op.set(&max_weight_point(n, code), crate::scalar::Rational::sign_of(*v));
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;
    use crate::polytope::{local_lambda_facets, membership};
    use crate::scalar::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pp(axes: &[Axis]) -> PauliPoint {
        PauliPoint::from_axes(axes)
    }

    use Axis::{I, X, Y, Z};

    #[test]
    fn closure_examples() {
        let c = local_closure(1, [pp(&[X])]).unwrap();
        assert_eq!(c.elements(), &[pp(&[I]), pp(&[X])]);
        let c = local_closure(2, [pp(&[X, I]), pp(&[I, X])]).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.contains(&pp(&[X, X])));
        let c = local_closure(2, [pp(&[Y, Y]), pp(&[X, X])]).unwrap();
        assert_eq!(c.len(), 3);
        assert!(!c.contains(&pp(&[Z, Z])));
    }

    #[test]
    fn closure_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_local_pair(2, &mut rng).unwrap();
            let again = local_closure(2, p.omega().elements().iter().copied()).unwrap();
            assert_eq!(&again, p.omega());
        }
    }

    #[test]
    fn assignment_validation() {
        let omega = local_closure(1, [pp(&[X])]).unwrap();
        assert!(validate_assignment(&omega, &[false, true]).is_ok());
        let omega = local_closure(2, [pp(&[X, I]), pp(&[I, X])]).unwrap();
        let gamma: Vec<bool> = omega.elements().iter().map(|a| *a == pp(&[X, X])).collect();
        match validate_assignment(&omega, &gamma) {
            Err(Error::InvalidAssignment(a, b)) => assert_eq!((a, b), ("x1".to_string(), "x2".to_string())),
            other => panic!("{other:?}"),
        }
        let omega = local_closure(2, [pp(&[Y, Y]), pp(&[X, X])]).unwrap();
        assert!(validate_assignment(&omega, &[false, true, true]).is_ok());
    }

    #[test]
    fn operators_are_members() {
        let sys = local_lambda_facets(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = random_local_pair(2, &mut rng).unwrap();
            let op: ExactOperator = p.operator();
            assert!(membership(&op, &sys).unwrap().status.is_member());
        }
    }

    #[test]
    fn maximality_examples() {
        let det = LocalPair::deterministic(&[(true, false, true)]);
        assert!(is_maximal(&det).unwrap());
        let trivial = LocalPair::new(LocallyClosedSet::new(1, [PauliPoint::zero(1)]).unwrap(), vec![false]).unwrap();
        assert!(!is_maximal(&trivial).unwrap());
    }

    #[test]
    fn max_weight_maximality_matches_bipartite_linearity() {
        for bits in 0..512u32 {
            let f: Vec<bool> = (0..9).map(|i| (bits >> i) & 1 == 1).collect();
            let pair = LocalPair::max_weight(2, &f).unwrap();
            assert_eq!(is_maximal(&pair).unwrap(), !is_bipartite_linear(2, &f).unwrap(), "{bits}");
        }
        for bits in 0..8u32 {
            let f: Vec<bool> = (0..3).map(|i| (bits >> i) & 1 == 1).collect();
            assert!(is_maximal(&LocalPair::max_weight(1, &f).unwrap()).unwrap());
        }
    }

    #[test]
    fn linearity_examples() {
        let zero = vec![false; 9];
        assert!(is_npartite_linear(2, &zero).unwrap());
        assert!(is_bipartite_linear(2, &zero).unwrap());
        let g: Vec<bool> = (0..9).map(|c| c % 3 == 1).collect();
        assert!(is_bipartite_linear(2, &g).unwrap());
        let and: Vec<bool> = (0..9).map(|c| c % 3 == 1 && c / 3 == 1).collect();
        assert!(!is_bipartite_linear(2, &and).unwrap());
        assert!(!is_npartite_linear(2, &and).unwrap());
        assert!(is_bipartite_linear(2, &[false; 8]).is_err());
        let count = (0..512u32)
            .filter(|bits| {
                let f: Vec<bool> = (0..9).map(|i| (bits >> i) & 1 == 1).collect();
                is_bipartite_linear(2, &f).unwrap()
            })
            .count();
        assert_eq!(count, 32);
    }

    #[test]
    fn bipartite_linearity_at_three_parties() {
        // f = g(s1) + h(s2, s3) is linear across the split {1} | {2, 3}.
        let f: Vec<bool> = (0..27).map(|c| (c % 3 == 2) ^ ((c / 3) % 3 == 1 && c / 9 == 2)).collect();
        assert!(is_bipartite_linear(3, &f).unwrap());
        assert!(!is_npartite_linear(3, &f).unwrap());
        let and3: Vec<bool> = (0..27).map(|c| c == 26).collect();
        assert!(!is_bipartite_linear(3, &and3).unwrap());
    }

    #[test]
    fn classification() {
        let det = LocalPair::deterministic(&[(false, false, false), (true, false, false)]);
        assert_eq!(classify(&det), PairClass::Deterministic);
        let one = LocalPair::deterministic(&[(false, true, false)]);
        assert_eq!(one.classes(), vec![PairClass::Deterministic, PairClass::MaxWeight, PairClass::Cnc]);
        let and: Vec<bool> = (0..9).map(|c| c % 3 == 1 && c / 3 == 1).collect();
        assert_eq!(classify(&LocalPair::max_weight(2, &and).unwrap()), PairClass::MaxWeight);
        let omega = local_closure(2, [pp(&[Y, Y]), pp(&[X, X])]).unwrap();
        let p = LocalPair::new(omega, vec![false, false, false]).unwrap();
        assert_eq!(classify(&p), PairClass::Generic);
    }

    #[test]
    fn operator_round_trip() {
        let and: Vec<bool> = (0..9).map(|c| c % 3 == 1 && c / 3 == 1).collect();
        let p = LocalPair::max_weight(2, &and).unwrap();
        let op: ExactOperator = p.operator();
        assert_eq!(op, max_weight_operator(2, &and).unwrap());
        assert_eq!(LocalPair::from_operator(&op).unwrap(), p);
        let bad = ExactOperator::from_entries(1, [(pp(&[X]), Rational::from_ratio(1, 2))]).unwrap();
        assert!(LocalPair::from_operator(&bad).is_err());
    }
}
