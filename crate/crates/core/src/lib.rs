//! Exact solver for integer linear programs in standard form
//!
//! ```text
//!     max c^T x   subject to   A x = b,  x in Z^n, x >= 0
//! ```
//!
//! where `A` is a `k x n` integer matrix of full row rank and `k` is small.
//! The solver preconditions `A` with a matrix `B'` built from an
//! approximate minimum-volume enclosing ellipsoid, so that `B'^{-1} A` has
//! columns of Euclidean norm at most one, and then runs a divide-and-conquer
//! dynamic program whose states are integer vectors inside windows
//! `b / 2^j + 4 eta B' [-1, 1]^k`.
//!
//! All arithmetic that decides anything is exact (big integers and
//! rationals). Floating point is only used to steer the ellipsoid iteration,
//! whose output is then rationalized and certified.

pub mod conv;
pub mod dp;
mod error;
pub mod expbound;
pub mod lattice;
pub mod linalg;
pub mod mvee;
pub mod oracle;
pub mod precond;
pub mod problem;
pub mod simplex;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
pub use num_rational::BigRational as Rational;
