//! Numeric modes for operator coordinates.
//!
//! Polytope combinatorics run over exact rationals; anything touching magic
//! states (irrational expectations) runs over `f64` with a fixed comparison
//! tolerance.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Comparison tolerance used in double mode.
pub const DOUBLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NumericMode {
    Rational,
    Double,
}

impl NumericMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NumericMode::Rational => "rational",
            NumericMode::Double => "double",
        }
    }
}

pub trait Scalar: Num + Signed + Clone + Debug + PartialOrd + Send + Sync + 'static {
    const MODE: NumericMode;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Sign with the mode's tolerance: exact for rationals, `|x| <= 1e-9`
    /// counts as zero for doubles.
    fn sign_tol(&self) -> Ordering;

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).sign_tol() == Ordering::Equal
    }

    fn from_i64(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    /// `(-1)^bit`
    fn sign_of(bit: bool) -> Self {
        if bit {
            -Self::one()
        } else {
            Self::one()
        }
    }

    /// `2^-k`
    fn pow2_inv(k: usize) -> Self;
}

impl Scalar for f64 {
    const MODE: NumericMode = NumericMode::Double;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sign_tol(&self) -> Ordering {
        if self.abs() <= DOUBLE_TOL {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn pow2_inv(k: usize) -> Self {
        0.5f64.powi(k as i32)
    }
}

impl Scalar for Rational {
    const MODE: NumericMode = NumericMode::Rational;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sign_tol(&self) -> Ordering {
        self.cmp(&Rational::zero())
    }

    fn pow2_inv(k: usize) -> Self {
        Rational::new(BigInt::one(), BigInt::one() << k)
    }
}

/// Exact rational from a double, for seeding exact computations with
/// binary fractions.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_f64(x)
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}
