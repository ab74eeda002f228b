//! Exact arithmetic for real quadratic fields and a polynomial-time test
//! deciding whether a fractional ideal is reduced with respect to a
//! tolerance parameter `C >= 1`.
//!
//! The pipeline is built bottom-up:
//!
//! * [`qfield`]: numbers `a + b*sqrt(d)` with rational `a`, `b` and exact
//!   sign determination; every inequality in the later modules reduces to
//!   a sign query here.
//! * [`ideal`]: fractional ideals as canonical (Hermite form) rational
//!   2x2 matrices over the integral basis `{1, omega}`.
//! * [`lattice`]: the Minkowski embedding of an ideal as a rank-2 lattice,
//!   Lagrange-Gauss reduction with exact rational Gram data, and bounded
//!   enumeration below an exact rational squared radius.
//! * [`creduced`]: the reduction test itself, which decides the verdict
//!   from at most eight candidate short vectors.
//! * [`oracle`]: an independent brute-force referee that settles the same
//!   question by exhaustive enumeration, used to validate `creduced`.
//! * [`fuzz`]: deterministic random instance generation for cross-checks.
//!
//! Floating point appears only in display helpers; every decision is made
//! on exact integers and rationals.

pub mod creduced;
pub mod fuzz;
pub mod ideal;
pub mod lattice;
pub mod oracle;
pub mod primes;
pub mod qfield;

pub use qfield::{QuadField, QuadNum};
