//! Numerical laboratory for finite interpolating Blaschke products.
//!
//! The library evaluates the objects that appear when a finite Blaschke
//! product `B` with zeros `a_1, ..., a_n` is used as an interpolation node
//! set: the model-space basis `h_j = B / (B'(a_j)(z - a_j))`, the tilde
//! transform pairing a trace `w` with its dual trace `w~`, weighted
//! sequence-space norms, Carleson box counts, and boundary quadrature.
//! Everything is finite-dimensional and double precision; the point is not
//! asymptotic rigor but trustworthy numbers for small `n`, with seeded and
//! reproducible experiment drivers on top.

pub mod blaschke;
pub mod disk;
pub mod error;
pub mod experiments;
pub mod families;
pub mod model;
pub mod report;
pub mod seq;
pub mod tilde;

pub use error::{Error, Result};
