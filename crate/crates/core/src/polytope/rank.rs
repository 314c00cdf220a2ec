//! Exact rank of small integer matrices.
//!
//! Elimination runs modulo the Mersenne prime `2^61 - 1`. The modular rank
//! never exceeds the rational rank, and the two agree whenever every minor
//! is smaller than the modulus, which the Hadamard bound certifies for the
//! `±1` systems used at two qubits. Otherwise a deficient modular rank is
//! rechecked with fraction-free elimination over big integers.

use num_bigint::BigInt;
use num_traits::Zero;

pub(crate) const P: u64 = (1 << 61) - 1;

#[inline]
pub(crate) fn mulmod(a: u64, b: u64) -> u64 {
    let t = a as u128 * b as u128;
    let lo = (t as u64) & P;
    let hi = (t >> 61) as u64;
    let s = lo + hi;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub(crate) fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

pub(crate) fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

pub(crate) fn to_mod(v: i64) -> u64 {
    let r = v.rem_euclid(P as i64);
    r as u64
}

/// Rank modulo `2^61 - 1`, stopping early once `stop_at` is reached.
pub fn rank_mod_p(rows: &[&[i64]], stop_at: usize) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let d = first.len();
    let mut m: Vec<u64> = Vec::with_capacity(rows.len() * d);
    for r in rows {
        m.extend(r.iter().map(|&v| to_mod(v)));
    }
    let nrows = rows.len();
    let mut rank = 0;
    for col in 0..d {
        if rank >= stop_at || rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&i| m[i * d + col] != 0) else { continue };
        if piv != rank {
            for c in 0..d {
                m.swap(piv * d + c, rank * d + c);
            }
        }
        let inv = powmod(m[rank * d + col], P - 2);
        for i in rank + 1..nrows {
            let f = m[i * d + col];
            if f == 0 {
                continue;
            }
            let f = mulmod(f, inv);
            for c in col..d {
                let v = mulmod(f, m[rank * d + c]);
                m[i * d + c] = submod(m[i * d + c], v);
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over the rationals by fraction-free elimination.
pub fn rank_bigint(rows: &[&[i64]]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let d = first.len();
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let nrows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..d {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(piv, rank);
        for i in rank + 1..nrows {
            for c in col + 1..d {
                let v = (&m[rank][col] * &m[i][c] - &m[i][col] * &m[rank][c]) / &prev;
                m[i][c] = v;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// `log2` of the Hadamard bound on any minor of the matrix.
fn hadamard_log2(rows: &[&[i64]]) -> f64 {
    let Some(first) = rows.first() else { return 0.0 };
    let d = first.len().min(rows.len());
    let mut norms: Vec<f64> = rows.iter().map(|r| r.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt()).collect();
    norms.sort_by(|a, b| b.partial_cmp(a).unwrap());
    norms.iter().take(d).map(|x| x.max(1.0).log2()).sum()
}

/// True when the modular rank is certainly the rational rank.
pub fn modular_rank_is_exact(rows: &[&[i64]]) -> bool {
    hadamard_log2(rows) < 60.0
}

/// Exact rank over the rationals.
pub fn rank(rows: &[&[i64]]) -> usize {
    let r = rank_mod_p(rows, usize::MAX);
    let full = rows.len().min(rows.first().map_or(0, |x| x.len()));
    if r == full || modular_rank_is_exact(rows) {
        r
    } else {
        rank_bigint(rows)
    }
}

/// Exact test `rank >= target`.
pub fn rank_at_least(rows: &[&[i64]], target: usize, exact_mod_p: bool) -> bool {
    if rank_mod_p(rows, target) >= target {
        return true;
    }
    if exact_mod_p {
        return false;
    }
    rank_bigint(rows) >= target
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_ranks() {
        let a: [&[i64]; 3] = [&[1, 2, 3], &[2, 4, 6], &[0, 1, -1]];
        assert_eq!(rank(&a), 2);
        assert_eq!(rank_bigint(&a), 2);
        let id: [&[i64]; 3] = [&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]];
        assert_eq!(rank(&id), 3);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn modular_rank_false_deficiency_is_caught() {
        // det = 2^61 - 1 = P, so the modular rank drops to 1.
        let p = P as i64;
        let a: [&[i64]; 2] = [&[p, 0], &[0, 1]];
        assert_eq!(rank_mod_p(&a, usize::MAX), 1);
        assert_eq!(rank(&a), 2);
        assert!(rank_at_least(&a, 2, false));
    }

    proptest! {
        #[test]
        fn modular_and_bigint_agree_on_sign_matrices(rows in proptest::collection::vec(proptest::collection::vec(-1i64..=1, 6), 1..9)) {
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            prop_assert_eq!(rank_mod_p(&refs, usize::MAX), rank_bigint(&refs));
        }
    }
}
