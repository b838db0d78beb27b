//! Metriplectic dynamics on Lie-Poisson phase spaces.
//!
//! The library is layered:
//!
//! * [`algebra`] represents a Lie-Poisson structure by the structure
//!   constants of its underlying Lie algebra and evaluates the Poisson
//!   bivector, bracket, and anchor map at phase points.
//! * [`geometry`] derives the contravariant Levi-Civita connection and
//!   curvature for the Euclidean metric and contracts the curvature with an
//!   energy gradient into the symmetric bracket matrix that drives
//!   dissipation.
//! * [`models`] specializes the machinery to the free rigid body and the
//!   symmetric heavy top: Hamiltonians, entropy generators, and the combined
//!   conservative-plus-dissipative right-hand sides.
//! * [`dynamics`] integrates the flow (fixed-step RK4 or adaptive
//!   Dormand-Prince) while monitoring the invariants, and [`stability`]
//!   linearizes about the aligned equilibrium and computes spectra.
//!
//! Phase points, covectors, and tangent vectors are all plain `&[f64]`
//! slices. With the Euclidean metric the variance distinction carries no
//! numerical content, so it is kept as a documentation convention rather
//! than a type-level one.

pub mod algebra;
pub mod dynamics;
mod error;
pub mod geometry;
pub mod linalg;
pub mod models;
pub mod stability;

pub use error::{Error, Result};
pub use num_complex::Complex64;
