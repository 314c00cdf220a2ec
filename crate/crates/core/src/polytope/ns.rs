//! Behaviours of the `(n, 3, 2)` Bell scenario and the affine bijection
//! with `Λ_n^loc`.
//!
//! Settings are indexed by base-3 code (qubit 1 least significant, digits
//! `0, 1, 2` for `x, y, z`) and outcomes by bit mask; entry
//! `p[code * 2^n + mask]`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::expectation::{ExpectationVector, TABLE_LIMIT};
use crate::pauli::{Axis, PauliPoint};
use crate::scalar::{Rational, Scalar};
use crate::stabilizer::local_axes;

#[derive(Clone, Debug, PartialEq)]
pub struct NsTable<T> {
    n: usize,
    p: Vec<T>,
}

fn settings_count(n: usize) -> usize {
    3usize.pow(n as u32)
}

impl<T: Scalar> NsTable<T> {
    pub fn new(n: usize, p: Vec<T>) -> Result<Self> {
        if n > TABLE_LIMIT {
            return Err(Error::TooManyQubits { what: "behaviour table", n, limit: TABLE_LIMIT });
        }
        let expect = settings_count(n) << n;
        if p.len() != expect {
            return Err(Error::invalid(format!("expected {expect} table entries, got {}", p.len())));
        }
        Ok(NsTable { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[T] {
        &self.p
    }

    pub fn get(&self, setting: usize, outcomes: u64) -> &T {
        &self.p[(setting << self.n) + outcomes as usize]
    }

    /// `(settings, outcomes, p)` with settings as axes, qubit 1 first.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<Axis>, u64, &T)> + '_ {
        self.p.iter().enumerate().map(move |(i, v)| (local_axes(self.n, i >> self.n), (i & ((1 << self.n) - 1)) as u64, v))
    }

    /// Non-negativity, normalization per setting and non-signaling.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if let Some(i) = self.p.iter().position(|v| v.sign_tol() == Ordering::Less) {
            return Err(Error::invalid(format!("negative entry at position {i}")));
        }
        for c in 0..settings_count(n) {
            let total = (0..1u64 << n).fold(T::zero(), |acc, s| acc + self.get(c, s).clone());
            if !total.approx_eq(&T::one()) {
                return Err(Error::invalid(format!("setting {c} sums to {:?}", total)));
            }
        }
        for party in 0..n {
            for row in no_signaling_rows(n, party) {
                let mut acc = T::zero();
                for (idx, coeff) in row {
                    acc = if coeff > 0 { acc + self.p[idx].clone() } else { acc - self.p[idx].clone() };
                }
                if acc.sign_tol() != Ordering::Equal {
                    return Err(Error::invalid(format!("table signals from party {}", party + 1)));
                }
            }
        }
        Ok(())
    }
}

/// Rows `sum_{s_i} p(.., a_i = x, ..) - sum_{s_i} p(.., a_i = y|z, ..) = 0`.
fn no_signaling_rows(n: usize, party: usize) -> Vec<Vec<(usize, i64)>> {
    let pw = 3usize.pow(party as u32);
    let mut rows = Vec::new();
    for c in 0..settings_count(n) {
        if (c / pw) % 3 != 0 {
            continue;
        }
        for other in [1, 2] {
            let c2 = c + other * pw;
            for s in 0..1usize << n {
                if (s >> party) & 1 == 1 {
                    continue;
                }
                let s1 = s | (1 << party);
                rows.push(vec![((c << n) + s, 1), ((c << n) + s1, 1), ((c2 << n) + s, -1), ((c2 << n) + s1, -1)]);
            }
        }
    }
    rows
}

impl NsTable<Rational> {
    /// Extreme point of `NS_n`: the equality rows together with the
    /// vanishing entries have full rank.
    pub fn is_extreme(&self) -> bool {
        let n = self.n;
        let dim = self.p.len();
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for c in 0..settings_count(n) {
            let mut r = vec![0; dim];
            r[c << n..(c + 1) << n].fill(1);
            rows.push(r);
        }
        for party in 0..n {
            for sparse in no_signaling_rows(n, party) {
                let mut r = vec![0; dim];
                for (i, v) in sparse {
                    r[i] = v;
                }
                rows.push(r);
            }
        }
        for (i, v) in self.p.iter().enumerate() {
            if v.sign_tol() == Ordering::Equal {
                let mut r = vec![0; dim];
                r[i] = 1;
                rows.push(r);
            }
        }
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        super::rank::rank(&refs) == dim
    }
}

fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// `p(a; s) = Tr(Pi_{a_1}^{s_1} ... Pi_{a_n}^{s_n} A)`; errors if any entry is
/// negative.
pub fn to_ns_table<T: Scalar>(op: &ExpectationVector<T>) -> Result<NsTable<T>> {
    let n = op.n();
    let mut p = Vec::with_capacity(settings_count(n) << n);
    let norm = T::pow2_inv(n);
    for c in 0..settings_count(n) {
        let axes = local_axes(n, c);
        let points: Vec<T> = (0..1u64 << n)
            .map(|sub| {
                let ax: Vec<Axis> = (0..n).map(|q| if (sub >> q) & 1 == 1 { axes[q] } else { Axis::I }).collect();
                op.get(&PauliPoint::from_axes(&ax)).clone()
            })
            .collect();
        for s in 0..1u64 << n {
            let mut acc = T::zero();
            for (sub, e) in points.iter().enumerate() {
                acc = if parity(sub as u64 & s) { acc - e.clone() } else { acc + e.clone() };
            }
            p.push(acc * norm.clone());
        }
    }
    if let Some(v) = p.iter().find(|v| v.sign_tol() == Ordering::Less) {
        return Err(Error::OutsidePolytope(v.to_f64()));
    }
    NsTable::new(n, p)
}

/// Inverse of [`to_ns_table`] by the moment formula; the table is validated
/// first.
pub fn from_ns_table<T: Scalar>(table: &NsTable<T>) -> Result<ExpectationVector<T>> {
    table.validate()?;
    let n = table.n();
    let mut e = Vec::with_capacity(1 << (2 * n));
    for idx in 0..1usize << (2 * n) {
        let a = PauliPoint::from_index(n, idx);
        let mut code = 0;
        for q in (0..n).rev() {
            code = code * 3 + a.axis(q).local_index().unwrap_or(0);
        }
        let supp = a.support();
        let mut acc = T::zero();
        for s in 0..1u64 << n {
            let v = table.get(code, s).clone();
            acc = if parity(s & supp) { acc - v } else { acc + v };
        }
        e.push(acc);
    }
    ExpectationVector::new(n, e)
}
