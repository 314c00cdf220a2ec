//! Symplectic phase space `E_n = Z_2^n x Z_2^n`.
//!
//! A point stores its x- and z-blocks packed into words, qubit 1 in the
//! least significant bit. The table index of a point is `x | z << n`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest register a packed point can describe.
pub const MAX_QUBITS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliPoint {
    n: u8,
    x: u64,
    z: u64,
}

/// Per-qubit component of a local decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    pub const LOCAL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn bits(self) -> (bool, bool) {
        match self {
            Axis::I => (false, false),
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Axis {
        match (x, z) {
            (false, false) => Axis::I,
            (true, false) => Axis::X,
            (true, true) => Axis::Y,
            (false, true) => Axis::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Axis::I => 'I',
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Axis> {
        match c.to_ascii_uppercase() {
            'I' | '0' => Some(Axis::I),
            'X' => Some(Axis::X),
            'Y' => Some(Axis::Y),
            'Z' => Some(Axis::Z),
            _ => None,
        }
    }

    /// Position of a local axis in `x, y, z` order; `None` for the identity.
    pub fn local_index(self) -> Option<usize> {
        match self {
            Axis::I => None,
            Axis::X => Some(0),
            Axis::Y => Some(1),
            Axis::Z => Some(2),
        }
    }
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliPoint {
    pub fn new(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { what: "pauli point", n, limit: MAX_QUBITS });
        }
        if x & !mask(n) != 0 || z & !mask(n) != 0 {
            return Err(Error::invalid(format!("bits outside an {n}-qubit register")));
        }
        Ok(PauliPoint { n: n as u8, x, z })
    }

    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        PauliPoint { n: n as u8, x: 0, z: 0 }
    }

    /// Single-qubit point on qubit `q` (0-based).
    pub fn local(n: usize, q: usize, axis: Axis) -> Self {
        assert!(q < n && n <= MAX_QUBITS, "qubit {q} outside register of {n}");
        let (bx, bz) = axis.bits();
        PauliPoint { n: n as u8, x: (bx as u64) << q, z: (bz as u64) << q }
    }

    pub fn x_on(n: usize, q: usize) -> Self {
        Self::local(n, q, Axis::X)
    }

    pub fn y_on(n: usize, q: usize) -> Self {
        Self::local(n, q, Axis::Y)
    }

    pub fn z_on(n: usize, q: usize) -> Self {
        Self::local(n, q, Axis::Z)
    }

    pub fn from_index(n: usize, index: usize) -> Self {
        debug_assert!(2 * n < usize::BITS as usize);
        let index = index as u64;
        PauliPoint { n: n as u8, x: index & mask(n), z: (index >> n) & mask(n) }
    }

    /// Builds a point from per-qubit axes, qubit 1 first.
    pub fn from_axes(axes: &[Axis]) -> Self {
        let n = axes.len();
        let mut p = PauliPoint::zero(n);
        for (q, a) in axes.iter().enumerate() {
            let (bx, bz) = a.bits();
            p.x |= (bx as u64) << q;
            p.z |= (bz as u64) << q;
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn index(&self) -> usize {
        (self.x | (self.z << self.n)) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Support mask: qubits with a nonzero component.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn axis(&self, q: usize) -> Axis {
        Axis::from_bits((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1)
    }

    pub fn axes(&self) -> Vec<Axis> {
        (0..self.n()).map(|q| self.axis(q)).collect()
    }

    /// Per-qubit components `(qubit, axis)`, qubits 0-based.
    pub fn local_decomposition(&self) -> Vec<(usize, Axis)> {
        (0..self.n()).map(|q| (q, self.axis(q))).collect()
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    /// True for `x_i`, `y_i` or `z_i`.
    pub fn is_local(&self) -> bool {
        self.weight() == 1
    }

    pub fn add(&self, other: &PauliPoint) -> PauliPoint {
        debug_assert_eq!(self.n, other.n);
        PauliPoint { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z }
    }

    /// `[a,b] = a_X.b_Z + a_Z.b_X mod 2`.
    pub fn symplectic(&self, other: &PauliPoint) -> bool {
        debug_assert_eq!(self.n, other.n);
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) & 1 == 1
    }

    pub fn commutes(&self, other: &PauliPoint) -> bool {
        !self.symplectic(other)
    }

    /// Exponent `k` (mod 4) with `T_a T_b = i^k T_{a+b}`, from the phase
    /// convention `T_a = i^{a_X.a_Z} X^{a_X} Z^{a_Z}`.
    pub fn product_phase(&self, other: &PauliPoint) -> u32 {
        let (ax, az, bx, bz) = (self.x, self.z, other.x, other.z);
        let k = (ax & az).count_ones() as i64 + (bx & bz).count_ones() as i64
            + 2 * (az & bx).count_ones() as i64
            - ((ax ^ bx) & (az ^ bz)).count_ones() as i64;
        k.rem_euclid(4) as u32
    }

    /// `beta(a,b)` for commuting points, without the commutation check.
    pub(crate) fn beta_raw(&self, other: &PauliPoint) -> bool {
        self.product_phase(other) == 2
    }

    /// `T_a T_b = (-1)^beta T_{a+b}`; defined only for commuting points.
    pub fn beta(&self, other: &PauliPoint) -> Result<bool> {
        if self.symplectic(other) {
            return Err(Error::Anticommuting(self.to_string(), other.to_string()));
        }
        Ok(self.beta_raw(other))
    }

    /// Every per-qubit pair of components commutes.
    pub fn locally_commutes(&self, other: &PauliPoint) -> bool {
        debug_assert_eq!(self.n, other.n);
        // Qubit q clashes when both components are nonzero and different.
        let both = self.support() & other.support();
        let differ = (self.x ^ other.x) | (self.z ^ other.z);
        both & differ == 0
    }

    /// Removes qubit `q`, shifting higher qubits down by one.
    pub fn remove_qubit(&self, q: usize) -> PauliPoint {
        let low = mask(q);
        let squeeze = |w: u64| (w & low) | ((w >> 1) & !low);
        PauliPoint { n: self.n - 1, x: squeeze(self.x), z: squeeze(self.z) }
    }

    /// Inserts an identity component at qubit `q`.
    pub fn insert_qubit(&self, q: usize) -> PauliPoint {
        let low = mask(q);
        let spread = |w: u64| (w & low) | ((w & !low) << 1);
        PauliPoint { n: self.n + 1, x: spread(self.x), z: spread(self.z) }
    }

    /// Places `self` on the low qubits and `other` above it.
    pub fn concat(&self, other: &PauliPoint) -> PauliPoint {
        let s = self.n;
        PauliPoint { n: s + other.n, x: self.x | (other.x << s), z: self.z | (other.z << s) }
    }

    /// Bit strings `(x, z)`, qubit 1 first.
    pub fn bitstrings(&self) -> (String, String) {
        let f = |w: u64| (0..self.n()).map(|q| if (w >> q) & 1 == 1 { '1' } else { '0' }).collect();
        (f(self.x), f(self.z))
    }

    pub fn from_bitstrings(x: &str, z: &str) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::invalid(format!("bitstrings '{x}' and '{z}' differ in length")));
        }
        let parse = |s: &str| -> Result<u64> {
            s.chars().enumerate().try_fold(0u64, |acc, (q, c)| match c {
                '0' => Ok(acc),
                '1' => Ok(acc | (1 << q)),
                _ => Err(Error::invalid(format!("bad bit '{c}' in '{s}'"))),
            })
        };
        PauliPoint::new(x.len(), parse(x)?, parse(z)?)
    }

    /// Pauli string such as `XIZ`, qubit 1 first.
    pub fn label(&self) -> String {
        self.axes().into_iter().map(Axis::letter).collect()
    }
}

impl Ord for PauliPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.index()).cmp(&(other.n, other.index()))
    }
}

impl PartialOrd for PauliPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Writes `x1+z2` style sums; `0` for the origin.
impl fmt::Display for PauliPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (q, a) in self.local_decomposition() {
            if a == Axis::I {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            write!(f, "{}{}", a.letter().to_ascii_lowercase(), q + 1)?;
        }
        Ok(())
    }
}

fn check_same(a: &PauliPoint, b: &PauliPoint) -> Result<()> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    Ok(())
}

pub fn symplectic_form(a: &PauliPoint, b: &PauliPoint) -> Result<bool> {
    check_same(a, b)?;
    Ok(a.symplectic(b))
}

pub fn beta(a: &PauliPoint, b: &PauliPoint) -> Result<bool> {
    check_same(a, b)?;
    a.beta(b)
}

pub fn locally_commutes(a: &PauliPoint, b: &PauliPoint) -> Result<bool> {
    check_same(a, b)?;
    Ok(a.locally_commutes(b))
}

/// All `4^n` points in table-index order.
pub fn all_points(n: usize) -> impl Iterator<Item = PauliPoint> {
    (0..1usize << (2 * n)).map(move |i| PauliPoint::from_index(n, i))
}

/// Points of weight `n` (every qubit nonzero), ordered by their base-3
/// axis code with qubit 1 least significant.
pub fn max_weight_points(n: usize) -> Vec<PauliPoint> {
    (0..3usize.pow(n as u32)).map(|code| max_weight_point(n, code)).collect()
}

/// Max-weight point for a base-3 code (digit 0,1,2 = x,y,z; qubit 1 least significant).
pub fn max_weight_point(n: usize, code: usize) -> PauliPoint {
    let mut c = code;
    let axes: Vec<Axis> = (0..n)
        .map(|_| {
            let a = Axis::LOCAL[c % 3];
            c /= 3;
            a
        })
        .collect();
    PauliPoint::from_axes(&axes)
}

/// Inverse of [`max_weight_point`]; `None` when some qubit is idle.
pub fn max_weight_code(a: &PauliPoint) -> Option<usize> {
    let mut code = 0;
    for q in (0..a.n()).rev() {
        code = code * 3 + a.axis(q).local_index()?;
    }
    Some(code)
}
