//! Classical simulation of measurement-based Pauli computation on the local
//! Λ polytope.
//!
//! The crate is organised bottom-up:
//!
//! - [`pauli`], [`expectation`], [`dense`]: the phase space `E_n`, operators
//!   as Pauli expectation tables, and dense matrices used as oracles.
//! - [`stabilizer`]: isotropic subspaces, value assignments, projectors.
//! - [`polytope`]: facet systems, membership, exact vertex enumeration,
//!   symmetries and the non-signaling table correspondence.
//! - [`local`] and [`catalog`]: locally closed pairs and the phase-space
//!   catalogs (DET, CNC, LC1, LC2, MAXW, STAB, VERT).
//! - [`update`]: closed-form and generic single-qubit measurement updates.
//! - [`lp`] and [`robustness`]: a dense revised simplex, robustness and
//!   quasi-probability sampling.
//! - [`mbpc`]: magic cluster states, adaptive schedules and the sampling
//!   simulator with its Born-rule oracle.
//! - [`io`]: JSON file formats.

pub mod catalog;
pub mod cnc;
pub mod dense;
pub mod error;
pub mod expectation;
pub mod gf2;
pub mod io;
pub mod local;
pub mod lp;
pub mod mbpc;
pub mod pauli;
pub mod polytope;
pub mod robustness;
pub mod scalar;
pub mod stabilizer;
pub mod update;

pub use error::{Error, Result};
pub use expectation::{ExactOperator, ExpectationVector, FloatOperator};
pub use pauli::{Axis, PauliPoint};
pub use scalar::{NumericMode, Rational, Scalar};
