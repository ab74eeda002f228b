//! Minkowski embedding of an ideal as a rank-2 lattice, Lagrange-Gauss
//! reduction, and exhaustive enumeration below a rational squared radius.
//!
//! For elements `x`, `y` of the field the inner product of their embedded
//! vectors is the rational number `Tr(xy)`, so all Gram data is exact and
//! the reduction never leaves the rationals. The embedded coordinates
//! themselves (values of `x` and its conjugate) stay symbolic as
//! quadratic numbers.

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{Signed, Zero};
use thiserror::Error;

use crate::ideal::FracIdeal;
use crate::qfield::QuadNum;

/// Default cap on enumeration work (candidate cells visited).
pub const DEFAULT_ENUM_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("enumeration budget exceeded: needed {cells} cells, budget {budget}")]
    EnumerationBudgetExceeded { cells: u128, budget: u64 },
}

/// Inner product of the embeddings of `x` and `y`: `Tr(xy)`.
pub fn trace_inner(x: &QuadNum, y: &QuadNum) -> BigRational {
    (x * y).trace()
}

/// Squared Euclidean length of the embedding of `x`: `Tr(x^2)`.
pub fn norm_sq(x: &QuadNum) -> BigRational {
    x.square().trace()
}

/// A Lagrange-reduced basis of the embedded ideal lattice.
///
/// Invariants: `|mu| <= 1/2`, `||b1|| <= ||b2||`, `b1` is a shortest
/// nonzero vector, and the first embedding of `b1` is positive.
#[derive(Debug, Clone)]
pub struct EmbeddedBasis {
    b1: QuadNum,
    b2: QuadNum,
    g11: BigRational,
    g12: BigRational,
    g22: BigRational,
    mu: BigRational,
    bstar2_sq: BigRational,
}

impl EmbeddedBasis {
    pub fn b1(&self) -> &QuadNum {
        &self.b1
    }

    pub fn b2(&self) -> &QuadNum {
        &self.b2
    }

    pub fn mu(&self) -> &BigRational {
        &self.mu
    }

    /// Squared length of the component of `b2` orthogonal to `b1`.
    pub fn bstar2_sq(&self) -> &BigRational {
        &self.bstar2_sq
    }

    /// Squared length of a shortest nonzero lattice vector.
    pub fn shortest_sq(&self) -> &BigRational {
        &self.g11
    }

    /// Squared covolume (Gram determinant); equals `N(I)^2 * Delta`.
    pub fn covol_sq(&self) -> BigRational {
        &self.g11 * &self.g22 - &self.g12 * &self.g12
    }

    /// Squared length of `s1*b1 + s2*b2`, evaluated on the Gram matrix.
    pub fn form(&self, s1: &BigInt, s2: &BigInt) -> BigRational {
        let s1 = BigRational::from_integer(s1.clone());
        let s2 = BigRational::from_integer(s2.clone());
        &self.g11 * &s1 * &s1
            + BigRational::from_integer(2.into()) * &self.g12 * &s1 * &s2
            + &self.g22 * &s2 * &s2
    }

    /// The element `s1*b1 + s2*b2`.
    pub fn vector(&self, s1: i64, s2: i64) -> QuadNum {
        let v1 = self.b1.scale(&BigRational::from_integer(s1.into()));
        let v2 = self.b2.scale(&BigRational::from_integer(s2.into()));
        v1 + v2
    }
}

/// Nearest integer with ties rounded up: `floor(q + 1/2)`.
fn round_half_up(q: &BigRational) -> BigInt {
    let num: BigInt = q.numer() * 2 + q.denom();
    let den: BigInt = q.denom() * 2;
    num.div_floor(&den)
}

/// Embeds the ideal and Lagrange-reduces its basis.
///
/// The loop swaps to keep `||b1|| <= ||b2||` and subtracts the rounded
/// projection; each pass strictly shortens `b2` or terminates, so the
/// procedure is finite and the output is deterministic for equal inputs.
pub fn embed_and_reduce(ideal: &FracIdeal) -> EmbeddedBasis {
    let (mut b1, mut b2) = ideal.basis_elements();
    let mut n1 = norm_sq(&b1);
    let mut n2 = norm_sq(&b2);
    loop {
        if n1 > n2 {
            std::mem::swap(&mut b1, &mut b2);
            std::mem::swap(&mut n1, &mut n2);
        }
        let mu = trace_inner(&b1, &b2) / &n1;
        let q = round_half_up(&mu);
        if q.is_zero() {
            break;
        }
        b2 = &b2 - &b1.scale(&BigRational::from_integer(q));
        n2 = norm_sq(&b2);
    }
    if b1.signum() < 0 {
        b1 = -b1;
    }
    let g11 = norm_sq(&b1);
    let g12 = trace_inner(&b1, &b2);
    let g22 = norm_sq(&b2);
    let mu = &g12 / &g11;
    let bstar2_sq = &g22 - &mu * &g12;
    EmbeddedBasis { b1, b2, g11, g12, g22, mu, bstar2_sq }
}

/// A lattice element with its coefficients over the reduced basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePoint {
    pub s1: i64,
    pub s2: i64,
    pub v: QuadNum,
}

/// Largest integer `s >= 0` with `s^2 < q`, or `None` when `q <= 0`.
fn max_int_with_sq_lt(q: &BigRational) -> Option<BigInt> {
    if !q.is_positive() {
        return None;
    }
    let floor_q = q.numer().div_floor(q.denom());
    let mut s = floor_q.sqrt();
    let as_rat = |x: &BigInt| BigRational::from_integer(x.clone());
    while &as_rat(&(&s + 1)) * &as_rat(&(&s + 1)) < *q {
        s += 1;
    }
    while !s.is_zero() && &as_rat(&s) * &as_rat(&s) >= *q {
        s -= 1;
    }
    if &as_rat(&s) * &as_rat(&s) >= *q {
        None
    } else {
        Some(s)
    }
}

/// Rational upper bound on `sqrt(q)` for `q >= 0`.
fn sqrt_upper(q: &BigRational) -> BigRational {
    debug_assert!(!q.is_negative());
    let s = (q.numer() * q.denom()).sqrt();
    BigRational::new(s + 1, q.denom().clone())
}

/// Enumerates one representative of each `+-` pair of nonzero vectors with
/// `||g||^2 < r_sq`, in ascending `(s2, s1)` order. The representative has
/// `s2 > 0`, or `s2 = 0` and `s1 > 0`. Work is capped by `budget` cells.
pub fn enumerate_bounded(
    basis: &EmbeddedBasis,
    r_sq: &BigRational,
    budget: u64,
) -> Result<Vec<LatticePoint>, LatticeError> {
    let mut out = Vec::new();
    let mut cells: u128 = 0;
    let Some(s2_max) = max_int_with_sq_lt(&(r_sq / &basis.bstar2_sq)) else {
        return Ok(out);
    };
    let mut s2 = BigInt::zero();
    while s2 <= s2_max {
        let s2_rat = BigRational::from_integer(s2.clone());
        let t = r_sq - &basis.bstar2_sq * &s2_rat * &s2_rat;
        if t.is_positive() {
            let center = -(&basis.mu * &s2_rat);
            let half = sqrt_upper(&(&t / &basis.g11));
            let lo = (&center - &half).ceil().to_integer();
            let hi = (&center + &half).floor().to_integer();
            let width = (&hi - &lo + 1i32).max(BigInt::zero());
            cells += u128::try_from(width.magnitude().clone())
                .unwrap_or(u128::MAX)
                .min(u128::MAX);
            if cells > budget as u128 {
                return Err(LatticeError::EnumerationBudgetExceeded { cells, budget });
            }
            let mut s1 = lo;
            while s1 <= hi {
                let keep = if s2.is_zero() { s1.is_positive() } else { true };
                if keep && basis.form(&s1, &s2) < *r_sq {
                    let s1_i = i64::try_from(&s1).expect("coefficient fits i64 under budget");
                    let s2_i = i64::try_from(&s2).expect("coefficient fits i64 under budget");
                    out.push(LatticePoint { s1: s1_i, s2: s2_i, v: basis.vector(s1_i, s2_i) });
                }
                s1 += 1;
            }
        }
        s2 += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::FracIdeal;
    use crate::qfield::QuadField;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ring(d: i64) -> FracIdeal {
        FracIdeal::ring_of_integers(QuadField::new(d).unwrap())
    }

    #[test]
    fn ring_of_integers_shortest_vector() {
        // Minimum of the trace form on O_F is 2, attained at +-1.
        let b = embed_and_reduce(&ring(5));
        assert_eq!(b.shortest_sq(), &rat(2, 1));
        assert_eq!(b.b1(), &QuadField::new(5).unwrap().one());
        let b = embed_and_reduce(&ring(2));
        assert_eq!(b.shortest_sq(), &rat(2, 1));
    }

    #[test]
    fn reduction_invariants() {
        let f = QuadField::new(79).unwrap();
        let p3 = FracIdeal::prime_above(&f, 3).unwrap();
        let b = embed_and_reduce(&p3.inverse());
        let half = rat(1, 2);
        assert!(b.mu().abs() <= half);
        assert!(norm_sq(b.b1()) <= norm_sq(b.b2()));
        assert!(b.b1().signum() > 0);
        // Gram determinant equals N(I)^2 * Delta.
        let n = p3.inverse().norm();
        let delta = BigRational::from_integer(f.discriminant().clone());
        assert_eq!(b.covol_sq(), &n * &n * &delta);
    }

    #[test]
    fn enumeration_golden_values_q5() {
        let b = embed_and_reduce(&ring(5));
        let f = QuadField::new(5).unwrap();
        // Radius^2 = 5/2 sees only the unit 1 (squared length 2).
        let pts = enumerate_bounded(&b, &rat(5, 2), 1000).unwrap();
        let elems: Vec<_> = pts.iter().map(|p| p.v.clone()).collect();
        assert_eq!(elems, vec![f.one()]);
        // Radius^2 = 2 is strict, so nothing qualifies.
        let pts = enumerate_bounded(&b, &rat(2, 1), 1000).unwrap();
        assert!(pts.is_empty());
        // Radius^2 = 7/2 adds the conjugate pair of length-3 vectors.
        let pts = enumerate_bounded(&b, &rat(7, 2), 1000).unwrap();
        let mut elems: Vec<_> = pts.iter().map(|p| p.v.clone()).collect();
        let w = f.omega();
        let expect = vec![f.one(), w.clone() - f.one(), w];
        let key = |x: &QuadNum| x.to_string();
        elems.sort_by_key(key);
        let mut expect = expect;
        expect.sort_by_key(key);
        assert_eq!(elems, expect);
    }

    #[test]
    fn enumeration_respects_budget() {
        let f = QuadField::new(79).unwrap();
        let p3 = FracIdeal::prime_above(&f, 3).unwrap();
        let b = embed_and_reduce(&p3.inverse());
        let err = enumerate_bounded(&b, &rat(100000, 1), 10).unwrap_err();
        match err {
            LatticeError::EnumerationBudgetExceeded { budget, .. } => assert_eq!(budget, 10),
        }
    }

    #[test]
    fn enumeration_is_complete_and_sound() {
        // Cross-check against a naive scan over a generous coefficient box.
        let f = QuadField::new(79).unwrap();
        let i = FracIdeal::prime_above(&f, 3).unwrap().inverse();
        let b = embed_and_reduce(&i);
        let r_sq = rat(9, 2);
        let pts = enumerate_bounded(&b, &r_sq, 100_000).unwrap();
        for p in &pts {
            assert!(norm_sq(&p.v) < r_sq);
            assert!(p.s2 > 0 || (p.s2 == 0 && p.s1 > 0));
        }
        let mut naive = 0;
        for s2 in 0..50i64 {
            for s1 in -50..50i64 {
                if s2 == 0 && s1 <= 0 {
                    continue;
                }
                if b.form(&BigInt::from(s1), &BigInt::from(s2)) < r_sq {
                    naive += 1;
                }
            }
        }
        assert_eq!(pts.len(), naive);
    }
}
