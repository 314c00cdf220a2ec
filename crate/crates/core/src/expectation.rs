//! Trace-normalized Hermitian operators stored as Pauli expectations.
//!
//! `A = (1/2^n) sum_a e_a T_a` with `e_a = Tr(T_a A)`. The table is dense
//! over all `4^n` points, indexed by [`PauliPoint::index`].

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dense::{check_dense, DenseOperator};
use crate::error::{Error, Result};
use crate::pauli::{all_points, PauliPoint};
use crate::scalar::{rational_from_f64, NumericMode, Rational, Scalar};

/// Full tables are kept up to this many qubits.
pub const TABLE_LIMIT: usize = 7;

#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationVector<T> {
    n: usize,
    e: Vec<T>,
}

pub type ExactOperator = ExpectationVector<Rational>;
pub type FloatOperator = ExpectationVector<f64>;

fn check_table(n: usize) -> Result<()> {
    if n > TABLE_LIMIT {
        return Err(Error::TooManyQubits { what: "expectation table", n, limit: TABLE_LIMIT });
    }
    Ok(())
}

impl<T: Scalar> ExpectationVector<T> {
    /// Trace-one operator from a full table; `e[0]` must be one.
    pub fn new(n: usize, e: Vec<T>) -> Result<Self> {
        let v = Self::from_table(n, e)?;
        if !v.e[0].is_one() && !(T::MODE == NumericMode::Double && v.e[0].approx_eq(&T::one())) {
            return Err(Error::invalid("identity expectation must be 1"));
        }
        Ok(v)
    }

    /// Unnormalized operator; `e[0]` is its trace.
    pub fn from_table(n: usize, e: Vec<T>) -> Result<Self> {
        check_table(n)?;
        if e.len() != 1 << (2 * n) {
            return Err(Error::invalid(format!("expected {} expectations, got {}", 1usize << (2 * n), e.len())));
        }
        Ok(ExpectationVector { n, e })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n <= TABLE_LIMIT);
        ExpectationVector { n, e: vec![T::zero(); 1 << (2 * n)] }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let mut v = Self::zeros(n);
        v.e[0] = T::one();
        v
    }

    /// Trace-one operator from sparse entries; unspecified points are zero.
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (PauliPoint, T)>) -> Result<Self> {
        check_table(n)?;
        let mut v = Self::maximally_mixed(n);
        for (a, val) in entries {
            if a.n() != n {
                return Err(Error::DimensionMismatch(a.n(), n));
            }
            v.e[a.index()] = val;
        }
        Ok(v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> NumericMode {
        T::MODE
    }

    pub fn get(&self, a: &PauliPoint) -> &T {
        &self.e[a.index()]
    }

    pub fn set(&mut self, a: &PauliPoint, v: T) {
        self.e[a.index()] = v;
    }

    pub fn values(&self) -> &[T] {
        &self.e
    }

    pub fn trace(&self) -> &T {
        &self.e[0]
    }

    /// Nonzero entries (tolerance-aware in double mode).
    pub fn support(&self) -> impl Iterator<Item = (PauliPoint, &T)> + '_ {
        self.e
            .iter()
            .enumerate()
            .filter(|(_, v)| v.sign_tol() != Ordering::Equal)
            .map(move |(i, v)| (PauliPoint::from_index(self.n, i), v))
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|v| v.sign_tol() == Ordering::Equal)
    }

    pub fn scale(&self, s: &T) -> Self {
        ExpectationVector { n: self.n, e: self.e.iter().map(|v| v.clone() * s.clone()).collect() }
    }

    /// Divides by the trace; `None` for a traceless operator.
    pub fn normalized(&self) -> Option<Self> {
        if self.e[0].sign_tol() == Ordering::Equal {
            return None;
        }
        let t = self.e[0].clone();
        Some(ExpectationVector { n: self.n, e: self.e.iter().map(|v| v.clone() / t.clone()).collect() })
    }

    /// `self + w * other`
    pub fn add_scaled(&mut self, w: &T, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.e.iter_mut().zip(&other.e) {
            *a = a.clone() + w.clone() * b.clone();
        }
    }

    /// Largest absolute difference between entries, in `f64`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.e.iter().zip(&other.e).map(|(a, b)| (a.clone() - b.clone()).to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.n == other.n && self.e.iter().zip(&other.e).all(|(a, b)| a.approx_eq(b))
    }

    pub fn to_double(&self) -> FloatOperator {
        ExpectationVector { n: self.n, e: self.e.iter().map(Scalar::to_f64).collect() }
    }

    /// Dense rendering `(1/2^n) sum_a e_a T_a`.
    pub fn to_matrix(&self) -> Result<DenseOperator> {
        check_dense(self.n)?;
        let n = self.n;
        let d = 1usize << n;
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        let norm = 1.0 / d as f64;
        for a in all_points(n) {
            let v = self.e[a.index()].to_f64();
            if v == 0.0 {
                continue;
            }
            for (i, j, ph) in pauli_entries(&a) {
                m[(i, j)] += ph * (v * norm);
            }
        }
        DenseOperator::new(n, m)
    }
}

impl FloatOperator {
    /// `e_a = Tr(T_a M)` for a Hermitian, trace-one matrix.
    pub fn from_matrix(m: &DenseOperator) -> Result<Self> {
        let n = m.n();
        check_table(n)?;
        if !m.is_hermitian(1e-10) {
            return Err(Error::invalid("matrix is not Hermitian"));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::invalid(format!("matrix trace is {tr}, expected 1")));
        }
        Ok(Self::from_matrix_unchecked(m))
    }

    /// `e_a = Re Tr(T_a M)` without Hermiticity or trace checks.
    pub fn from_matrix_unchecked(m: &DenseOperator) -> Self {
        let n = m.n();
        let mat = m.matrix();
        let e = all_points(n)
            .map(|a| {
                pauli_entries(&a).map(|(i, j, ph)| ph * mat[(j, i)]).sum::<Complex64>().re
            })
            .collect();
        ExpectationVector { n, e }
    }
}

impl ExactOperator {
    /// Exact copy of a double table; every `f64` is a binary fraction.
    pub fn from_double(v: &FloatOperator) -> Result<Self> {
        let e = v
            .values()
            .iter()
            .map(|x| rational_from_f64(*x).ok_or_else(|| Error::invalid("non-finite expectation")))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExpectationVector { n: v.n(), e })
    }
}

impl Eq for ExactOperator {}

impl Hash for ExactOperator {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.e.hash(state);
    }
}

impl Ord for ExactOperator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.e.cmp(&other.e))
    }
}

impl PartialOrd for ExactOperator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Nonzero entries `(row, col, value)` of `T_a`, one per row.
///
/// `T_a |j> = i^{a_X.a_Z} (-1)^{a_Z.j} |j xor a_X>` with qubit 1 the most
/// significant bit of `j`.
pub(crate) fn pauli_entries(a: &PauliPoint) -> impl Iterator<Item = (usize, usize, Complex64)> {
    let n = a.n();
    let rev = |w: u64| -> usize { (0..n).filter(|q| (w >> q) & 1 == 1).map(|q| 1usize << (n - 1 - q)).sum() };
    let xm = rev(a.x_bits());
    let zm = rev(a.z_bits());
    let base = match (a.x_bits() & a.z_bits()).count_ones() % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    (0..1usize << n).map(move |i| {
        let j = i ^ xm;
        let ph = if (zm & j).count_ones() & 1 == 1 { -base } else { base };
        (i, j, ph)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::pauli_matrix;
    use crate::pauli::Axis;

    #[test]
    fn fast_pauli_entries_match_kronecker() {
        for n in 0..=3 {
            for a in all_points(n) {
                let dense = pauli_matrix(&a).unwrap();
                let mut m = DMatrix::<Complex64>::zeros(1 << n, 1 << n);
                for (i, j, ph) in pauli_entries(&a) {
                    m[(i, j)] = ph;
                }
                assert_eq!(&m, dense.matrix(), "{a}");
            }
        }
    }

    #[test]
    fn eight_state_vertex_matrix() {
        let e = ExactOperator::from_entries(
            1,
            Axis::LOCAL.iter().map(|ax| (PauliPoint::local(1, 0, *ax), Rational::from_i64(1))),
        )
        .unwrap();
        let m = e.to_matrix().unwrap();
        let expect = DenseOperator::identity(1)
            .add(&pauli_matrix(&PauliPoint::x_on(1, 0)).unwrap())
            .add(&pauli_matrix(&PauliPoint::y_on(1, 0)).unwrap())
            .add(&pauli_matrix(&PauliPoint::z_on(1, 0)).unwrap())
            .scale(0.5);
        assert!(m.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_scaled_identity() {
        let m = FloatOperator::maximally_mixed(3).to_matrix().unwrap();
        assert!(m.max_abs_diff(&DenseOperator::identity(3).scale(0.125)) < 1e-15);
    }

    #[test]
    fn from_matrix_rejects_bad_input() {
        let id = DenseOperator::identity(1);
        assert!(FloatOperator::from_matrix(&id).is_err());
        let x = pauli_matrix(&PauliPoint::x_on(1, 0)).unwrap();
        let skew = DenseOperator::identity(1).scale(0.5).add(&x.mul(&DenseOperator::new(1, DMatrix::from_diagonal_element(2, 2, Complex64::new(0.0, 0.1))).unwrap()));
        assert!(FloatOperator::from_matrix(&skew).is_err());
    }

    #[test]
    fn normalization_rules() {
        assert!(ExactOperator::new(1, vec![Rational::from_i64(2), Rational::from_i64(0), Rational::from_i64(0), Rational::from_i64(0)]).is_err());
        let v = ExactOperator::from_table(1, vec![Rational::from_i64(2), Rational::from_i64(1), Rational::from_i64(0), Rational::from_i64(0)]).unwrap();
        let u = v.normalized().unwrap();
        assert_eq!(u.get(&PauliPoint::x_on(1, 0)), &Rational::from_ratio(1, 2));
        assert!(ExactOperator::zeros(1).normalized().is_none());
    }
}
