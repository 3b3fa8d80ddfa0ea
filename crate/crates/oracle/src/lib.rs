//! Reference computations for the test suites of `grf-core`.
//!
//! Everything here is deliberately simple and slow: dense matrices,
//! Gaussian elimination, generic adaptive quadrature. None of it shares
//! code with the library under test.

pub mod bessel;
pub mod beta;
pub mod dense;
pub mod quad;
