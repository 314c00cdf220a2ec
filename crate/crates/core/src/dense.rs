//! Dense complex matrices used as test oracles and for state preparation.
//!
//! Qubit 1 is the leftmost tensor factor, i.e. the most significant bit of
//! a computational-basis index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Axis, PauliPoint};

/// Dense oracles refuse registers beyond this size.
pub const DENSE_LIMIT: usize = 10;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    m: CMatrix,
}

pub(crate) fn check_dense(n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        return Err(Error::TooManyQubits { what: "dense oracle", n, limit: DENSE_LIMIT });
    }
    Ok(())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single_qubit(axis: Axis) -> CMatrix {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    match axis {
        Axis::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Axis::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Axis::Y => DMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        Axis::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

impl DenseOperator {
    pub fn new(n: usize, m: CMatrix) -> Result<Self> {
        check_dense(n)?;
        let d = 1usize << n;
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::invalid(format!("expected {d}x{d} matrix, got {}x{}", m.nrows(), m.ncols())));
        }
        Ok(DenseOperator { n, m })
    }

    pub fn zeros(n: usize) -> Self {
        let d = 1usize << n;
        DenseOperator { n, m: DMatrix::zeros(d, d) }
    }

    pub fn identity(n: usize) -> Self {
        let d = 1usize << n;
        DenseOperator { n, m: DMatrix::identity(d, d) }
    }

    /// `|psi><psi|` for a statevector of length `2^n`.
    pub fn from_statevector(psi: &[Complex64]) -> Result<Self> {
        let d = psi.len();
        if !d.is_power_of_two() {
            return Err(Error::invalid("statevector length is not a power of two"));
        }
        let n = d.trailing_zeros() as usize;
        check_dense(n)?;
        let v = nalgebra::DVector::from_column_slice(psi);
        Ok(DenseOperator { n, m: &v * v.adjoint() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn mul(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator { n: self.n, m: &self.m * &other.m }
    }

    pub fn scale(&self, s: f64) -> DenseOperator {
        DenseOperator { n: self.n, m: self.m.map(|v| v * s) }
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator { n: self.n, m: &self.m + &other.m }
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator { n: self.n, m: self.m.adjoint() }
    }

    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator { n: self.n + other.n, m: self.m.kronecker(&other.m) }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        (&self.m - &other.m).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Traces out qubit `q` (0-based); higher qubits shift down.
    pub fn partial_trace(&self, q: usize) -> DenseOperator {
        assert!(q < self.n);
        let n = self.n;
        let bit = n - 1 - q;
        let d_out = 1usize << (n - 1);
        let low = (1usize << bit) - 1;
        let insert = |j: usize, v: usize| ((j & !low) << 1) | (v << bit) | (j & low);
        let mut out = DMatrix::zeros(d_out, d_out);
        for i in 0..d_out {
            for j in 0..d_out {
                out[(i, j)] = self.m[(insert(i, 0), insert(j, 0))] + self.m[(insert(i, 1), insert(j, 1))];
            }
        }
        DenseOperator { n: n - 1, m: out }
    }
}

/// `T_a` built as a Kronecker product of `I, X, Y, Z`.
pub fn pauli_matrix(a: &PauliPoint) -> Result<DenseOperator> {
    check_dense(a.n())?;
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in 0..a.n() {
        m = m.kronecker(&single_qubit(a.axis(q)));
    }
    Ok(DenseOperator { n: a.n(), m })
}

/// `(1 + (-1)^r T_b) / 2`
pub fn eigenprojector(b: &PauliPoint, r: bool) -> Result<DenseOperator> {
    let t = pauli_matrix(b)?;
    let s = if r { -1.0 } else { 1.0 };
    Ok(DenseOperator::identity(b.n()).add(&t.scale(s)).scale(0.5))
}

/// Single-qubit unitary embedded on qubit `q` of an `n`-qubit register.
pub fn embed_single(n: usize, q: usize, u: &CMatrix) -> DenseOperator {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for k in 0..n {
        if k == q {
            m = m.kronecker(u);
        } else {
            m = m.kronecker(&single_qubit(Axis::I));
        }
    }
    DenseOperator { n, m }
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
}

pub fn phase_gate() -> CMatrix {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
}

pub fn t_gate() -> CMatrix {
    let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), w])
}
