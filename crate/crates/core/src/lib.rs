//! Exact constraint analysis of first-order lattice field theories.
//!
//! The pipeline runs entirely over the rationals: a declarative theory is
//! placed on a periodic lattice, its primary constraints and canonical
//! Hamiltonian are derived, the Dirac–Bergmann consistency loop is iterated
//! to a fixed point, and the constraints are split into first and second
//! class. Gauge and covariant-phase-space checks work on explicit lattice
//! field configurations.

pub mod covariant;
pub mod dirac;
pub mod error;
pub mod families;
pub mod gauge;
pub mod lattice;
pub mod linalg;
pub mod phase_space;
pub mod report;
pub mod sample;
pub mod theory;

pub use error::{Error, Result};
pub use linalg::{Rational, SparseMatrix};
