//! Census machinery for rank-3 ideal lattices of totally real cubic
//! fields.
//!
//! The quadratic reduction test stays polynomial because its constraint
//! set `G` keeps a bounded number of elements. In the cubic setting the
//! analogous set grows like the lattice covolume, and this crate builds
//! the witnesses: seed polynomials `aX^3 + bX^2 + cX + d`, the lattice
//! `Z + Z beta + Z (a beta^2)` embedded through the three real roots,
//! certified checks of the hypotheses (primitive 1, empty cuboid, short
//! first vector, covolume at least 10), and a census of
//! `G = { g : ||g|| < (6/pi) C^2 covol, some |g_i| < 1/C }` with
//! three-way In/Out/Ambiguous classification so reported counts are
//! proofs, not estimates.
//!
//! All real arithmetic is outward-rounded dyadic interval arithmetic
//! over exact root enclosures; a decision that stays ambiguous escalates
//! precision and, only if a configured cap is reached, surfaces as an
//! explicit error.

pub mod census;
pub mod dyadic;
pub mod gen;
pub mod lattice3;
pub mod roots;
pub mod seed;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubicError {
    #[error("degenerate polynomial: {0}")]
    Degenerate(String),
    #[error("polynomial does not have three distinct real roots")]
    NotTotallyReal,
    #[error("polynomial has the rational root {root}")]
    RationalRoot { root: String },
    #[error("could not factor {n} within the budget")]
    FactorBudgetExceeded { n: String },
    #[error("interval precision insufficient: {details}")]
    PrecisionInsufficient { details: String },
    #[error("census budget exceeded after {pairs_done} coefficient pairs; certified count so far {count_so_far}")]
    CensusBudgetExceeded { pairs_done: u64, count_so_far: u64 },
    #[error("seed search exhausted {candidates} candidates without success")]
    SearchBudgetExceeded { candidates: u64 },
    #[error("invalid seed: {0}")]
    Seed(String),
}
