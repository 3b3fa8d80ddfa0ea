//! Finite-element Gaussian random fields with boundary-artifact mitigation.
//!
//! Covariance operators are built from `A = -gamma Laplace + alpha` on
//! simplicial meshes. Two corrections reduce the variance inflation (or
//! deflation) near the boundary: an optimized spatially varying Robin
//! coefficient ([`robin`]) and pointwise variance normalization
//! `C = g A^-2 g` ([`variance`]).

pub mod error;
pub mod fem;
pub mod geometry;
pub mod greens;
pub mod mesh;
pub mod par;
pub mod robin;
pub mod section;
pub mod solver;
pub mod sparse;
pub mod variance;

pub use error::{Error, Result};
