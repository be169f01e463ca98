//! Independent reference computations used only by tests.
//!
//! Everything here is exact (big rationals) or brute force. None of it shares
//! code with the `rigor` crate, so agreement between the two is evidence.

pub mod atan;
pub mod planar;
pub mod rational;
pub mod simplex;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
