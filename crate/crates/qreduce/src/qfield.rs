//! Real quadratic fields `Q(sqrt(d))` and exact arithmetic on elements
//! `a + b*sqrt(d)` with rational coordinates.
//!
//! The central primitive is [`QuadNum::signum`], which determines the sign
//! of `a + b*sqrt(d)` without ever materializing a square root: when `a`
//! and `b` disagree in sign the comparison reduces to `a^2` versus `b^2 d`.
//! All order comparisons in the reduction pipeline route through it, so a
//! verdict never depends on floating point.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::primes::{squarefree_status, SquarefreeStatus};

/// Budget for certifying squarefreeness of `d` at construction time.
const SQUAREFREE_RHO_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("d = {0} is not squarefree (or could not be certified squarefree)")]
    NotSquarefree(BigInt),
    #[error("d = {0} must be an integer >= 2")]
    OutOfRange(BigInt),
}

/// A real quadratic field `Q(sqrt(d))` for squarefree `d >= 2`.
///
/// The discriminant is `d` when `d = 1 mod 4` and `4d` otherwise; the ring
/// of integers has integral basis `{1, omega}` with `omega = (1+sqrt(d))/2`
/// in the first case and `omega = sqrt(d)` in the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadField {
    d: BigInt,
    delta: BigInt,
}

impl QuadField {
    pub fn new(d: impl Into<BigInt>) -> Result<Self, FieldError> {
        let d: BigInt = d.into();
        if d < BigInt::from(2) {
            return Err(FieldError::OutOfRange(d));
        }
        match squarefree_status(&d, 1_000_000, SQUAREFREE_RHO_BUDGET) {
            SquarefreeStatus::Yes => {}
            _ => return Err(FieldError::NotSquarefree(d)),
        }
        let delta = if is_one_mod_four(&d) { d.clone() } else { 4 * &d };
        Ok(QuadField { d, delta })
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    /// Field discriminant: `d` or `4d`.
    pub fn discriminant(&self) -> &BigInt {
        &self.delta
    }

    pub fn is_one_mod_four(&self) -> bool {
        is_one_mod_four(&self.d)
    }

    /// Second basis element of the ring of integers over `Z`.
    pub fn omega(&self) -> QuadNum {
        if self.is_one_mod_four() {
            self.num(BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into()))
        } else {
            self.num(BigRational::zero(), BigRational::one())
        }
    }

    /// Element `a + b*sqrt(d)`.
    pub fn num(&self, a: BigRational, b: BigRational) -> QuadNum {
        QuadNum { a, b, d: self.d.clone() }
    }

    pub fn from_int(&self, n: impl Into<BigInt>) -> QuadNum {
        self.num(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_rational(&self, q: BigRational) -> QuadNum {
        self.num(q, BigRational::zero())
    }

    /// Element `x + y*omega` given coordinates over the integral basis.
    pub fn from_omega_coords(&self, x: &BigRational, y: &BigRational) -> QuadNum {
        let half = BigRational::new(1.into(), 2.into());
        if self.is_one_mod_four() {
            self.num(x + y * &half, y * &half)
        } else {
            self.num(x.clone(), y.clone())
        }
    }

    /// Coordinates `(x, y)` of an element over `{1, omega}`.
    pub fn omega_coords(&self, v: &QuadNum) -> (BigRational, BigRational) {
        debug_assert_eq!(v.d, self.d);
        if self.is_one_mod_four() {
            let y = &v.b + &v.b;
            (&v.a - &v.b, y)
        } else {
            (v.a.clone(), v.b.clone())
        }
    }

    pub fn zero(&self) -> QuadNum {
        self.num(BigRational::zero(), BigRational::zero())
    }

    pub fn one(&self) -> QuadNum {
        self.from_int(1)
    }
}

fn is_one_mod_four(d: &BigInt) -> bool {
    (d % 4u32) == BigInt::one()
}

/// An element `a + b*sqrt(d)` of a real quadratic field.
///
/// The representation is unique (rationals are kept normalized), so
/// structural equality is value equality. `sqrt(d)` always denotes the
/// positive square root; the second real embedding is [`QuadNum::conj`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadNum {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl QuadNum {
    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.a.clone())
    }

    /// Image under the nontrivial field automorphism `sqrt(d) -> -sqrt(d)`.
    pub fn conj(&self) -> QuadNum {
        QuadNum { a: self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    /// The rational constant `q` viewed as an element of the same field.
    pub fn rational_in_field(&self, q: &BigRational) -> QuadNum {
        QuadNum { a: q.clone(), b: BigRational::zero(), d: self.d.clone() }
    }

    /// Field norm `a^2 - b^2 d`, a rational number.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * big_rat(&self.d)
    }

    /// Field trace `2a`, a rational number.
    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> QuadNum {
        let n = self.norm();
        assert!(!n.is_zero(), "inverse of zero quadratic number");
        QuadNum { a: &self.a / &n, b: -&self.b / &n, d: self.d.clone() }
    }

    /// Exact sign of the real value `a + b*sqrt(d)`: -1, 0 or +1.
    ///
    /// When `a` and `b` have opposite signs the result is
    /// `sign(a^2 - b^2 d) * sign(a)`; the norm cannot vanish for nonzero
    /// coordinates because `d` is squarefree.
    pub fn signum(&self) -> i32 {
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        rat_sign(&self.norm()) * sa
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> QuadNum {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Exact floor, computed by refining two-sided rational bounds on
    /// `sqrt(d)` until they pin down an integer. Terminates because a
    /// quadratic irrational is never an integer.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        let mut bits = 16u32;
        loop {
            let (lo, hi) = sqrt_bounds(&self.d, bits);
            let (vlo, vhi) = if self.b.is_positive() {
                (&self.a + &self.b * &lo, &self.a + &self.b * &hi)
            } else {
                (&self.a + &self.b * &hi, &self.a + &self.b * &lo)
            };
            let flo = vlo.floor().to_integer();
            let fhi = vhi.floor().to_integer();
            if flo == fhi {
                return flo;
            }
            bits *= 2;
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self.clone()).floor()
    }

    /// Two-sided rational enclosure of the real value, within `2^-bits`.
    pub fn bounds(&self, bits: u32) -> (BigRational, BigRational) {
        if self.b.is_zero() {
            return (self.a.clone(), self.a.clone());
        }
        let (lo, hi) = sqrt_bounds(&self.d, bits);
        if self.b.is_positive() {
            (&self.a + &self.b * &lo, &self.a + &self.b * &hi)
        } else {
            (&self.a + &self.b * &hi, &self.a + &self.b * &lo)
        }
    }

    /// Display-only approximation; never used in decisions.
    pub fn approx(&self) -> f64 {
        let d = big_rat(&self.d);
        rat_f64(&self.a) + rat_f64(&self.b) * rat_f64(&d).sqrt()
    }

    fn add_ref(&self, rhs: &QuadNum) -> QuadNum {
        debug_assert_eq!(self.d, rhs.d);
        QuadNum { a: &self.a + &rhs.a, b: &self.b + &rhs.b, d: self.d.clone() }
    }

    fn sub_ref(&self, rhs: &QuadNum) -> QuadNum {
        debug_assert_eq!(self.d, rhs.d);
        QuadNum { a: &self.a - &rhs.a, b: &self.b - &rhs.b, d: self.d.clone() }
    }

    fn mul_ref(&self, rhs: &QuadNum) -> QuadNum {
        debug_assert_eq!(self.d, rhs.d);
        let d = big_rat(&self.d);
        QuadNum {
            a: &self.a * &rhs.a + &self.b * &rhs.b * &d,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
            d: self.d.clone(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> QuadNum {
        QuadNum { a: &self.a * q, b: &self.b * q, d: self.d.clone() }
    }

    pub fn square(&self) -> QuadNum {
        self.mul_ref(self)
    }
}

fn rat_sign(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

fn big_rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

fn rat_f64(q: &BigRational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Rational bounds `lo <= sqrt(d) <= hi` with `hi - lo = 2^-bits`.
fn sqrt_bounds(d: &BigInt, bits: u32) -> (BigRational, BigRational) {
    let scale = BigInt::one() << bits;
    let s = (d * &scale * &scale).sqrt();
    let lo = BigRational::new(s.clone(), scale.clone());
    let hi = BigRational::new(s + 1, scale);
    (lo, hi)
}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        if self.d != other.d {
            return None;
        }
        Some(self.sub_ref(other).signum().cmp(&0))
    }
}

impl Add for QuadNum {
    type Output = QuadNum;
    fn add(self, rhs: QuadNum) -> QuadNum {
        self.add_ref(&rhs)
    }
}

impl<'a> Add<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn add(self, rhs: &QuadNum) -> QuadNum {
        self.add_ref(rhs)
    }
}

impl Sub for QuadNum {
    type Output = QuadNum;
    fn sub(self, rhs: QuadNum) -> QuadNum {
        self.sub_ref(&rhs)
    }
}

impl<'a> Sub<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn sub(self, rhs: &QuadNum) -> QuadNum {
        self.sub_ref(rhs)
    }
}

impl Mul for QuadNum {
    type Output = QuadNum;
    fn mul(self, rhs: QuadNum) -> QuadNum {
        self.mul_ref(&rhs)
    }
}

impl<'a> Mul<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn mul(self, rhs: &QuadNum) -> QuadNum {
        self.mul_ref(rhs)
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum { a: -self.a, b: -self.b, d: self.d }
    }
}

impl fmt::Display for QuadNum {
    /// Canonical text form `a/b + c/e*sqrt(d)`, e.g. `1/2 + -3/2*sqrt(5)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} + {}/{}*sqrt({})",
            self.a.numer(),
            self.a.denom(),
            self.b.numer(),
            self.b.denom(),
            self.d
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed quadratic number literal: {0}")]
pub struct ParseQuadNumError(String);

impl FromStr for QuadNum {
    type Err = ParseQuadNumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseQuadNumError(s.to_string());
        let (lhs, rhs) = s.split_once('+').ok_or_else(err)?;
        let a: BigRational = lhs.trim().parse().map_err(|_| err())?;
        let rhs = rhs.trim();
        let (coef, surd) = rhs.split_once('*').ok_or_else(err)?;
        let b: BigRational = coef.trim().parse().map_err(|_| err())?;
        let surd = surd.trim();
        let inner = surd.strip_prefix("sqrt(").and_then(|t| t.strip_suffix(')')).ok_or_else(err)?;
        let d: BigInt = inner.trim().parse().map_err(|_| err())?;
        Ok(QuadNum { a, b, d })
    }
}

impl Serialize for QuadNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadNum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
