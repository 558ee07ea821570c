//! Symbolic-numeric toolkit for the smooth noncommutative two-torus.
//!
//! * [`algebra`]: twisted Fourier series, involution, derivations, trace.
//! * [`functional`]: inverse, inverse square root, exponential, circle functions.
//! * [`oracle`]: clock-and-shift matrices for rational theta.
//! * [`geometry`]: metrics, Levi-Civita connection, curvature, Gauss-Bonnet integrals.
//! * [`connection_space`]: inner derivations, perturbed connections and their curvature.

pub mod algebra;
pub mod algebra_matrix;
pub mod connection_space;
pub mod error;
pub mod functional;
pub mod geometry;
pub mod oracle;

pub use algebra::{TorusElement, TruncationPolicy};
pub use algebra_matrix::AlgebraMatrix;
pub use error::{Error, Result};
pub use functional::{Certified, SolverOptions};
