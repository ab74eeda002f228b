//! Exact dyadic numbers and outward-rounded interval arithmetic.
//!
//! A `Dyadic` is `mant * 2^exp` with arbitrary-precision mantissa, so
//! addition and multiplication are exact; only explicit rounding and the
//! inverse operations (division, square root) lose precision, and those
//! always round in a caller-chosen direction. `DyInterval` keeps a lower
//! and upper `Dyadic` bound and rounds outward, which is what makes the
//! downstream census classifications certified rather than heuristic.

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

/// Rounding direction for precision-losing operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// `mant * 2^exp`, normalized so `mant` is odd or zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Dyadic {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let shift = self.mant.trailing_zeros().unwrap_or(0);
        if shift > 0 {
            self.mant >>= shift;
            self.exp += shift as i64;
        }
    }

    pub fn zero() -> Dyadic {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Dyadic {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Dyadic {
        Dyadic::new(n.into(), 0)
    }

    /// Directed conversion of a rational: the result differs from `q` by
    /// less than `2^-bits` in the chosen direction.
    pub fn from_ratio(q: &BigRational, bits: u32, round: Round) -> Dyadic {
        let scaled = q * BigRational::from_integer(BigInt::one() << bits);
        let mant = match round {
            Round::Down => scaled.floor().to_integer(),
            Round::Up => scaled.ceil().to_integer(),
        };
        Dyadic::new(mant, -(bits as i64))
    }

    pub fn to_ratio(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << (self.exp as u64))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as u64))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let (a, b, exp) = align(self, other);
        Dyadic::new(a + b, exp)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let (a, b, exp) = align(self, other);
        Dyadic::new(a - b, exp)
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// Rounds to at most `bits` fractional bits in the given direction.
    pub fn round(&self, bits: u32, round: Round) -> Dyadic {
        let target = -(bits as i64);
        if self.exp >= target || self.mant.is_zero() {
            return self.clone();
        }
        let shift = (target - self.exp) as u64;
        let mant = match round {
            Round::Down => self.mant.clone() >> shift,
            Round::Up => {
                let floor: BigInt = self.mant.clone() >> shift;
                let back: BigInt = floor.clone() << shift;
                if back == self.mant {
                    floor
                } else {
                    floor + 1
                }
            }
        };
        Dyadic::new(mant, target)
    }

    /// Directed square root (`self >= 0`): within `2^-bits` of the truth.
    pub fn sqrt(&self, bits: u32, round: Round) -> Dyadic {
        assert!(self.signum() >= 0, "sqrt of negative dyadic");
        // floor/ceil of sqrt(self * 4^bits) gives the directed mantissa.
        let shift = 2 * bits as i64 + self.exp;
        let scaled: BigInt = if shift >= 0 {
            &self.mant << (shift as u64)
        } else {
            match round {
                Round::Down => &self.mant >> ((-shift) as u64),
                Round::Up => {
                    let down: BigInt = &self.mant >> ((-shift) as u64);
                    let back: BigInt = down.clone() << ((-shift) as u64);
                    if back == self.mant {
                        down
                    } else {
                        down + 1
                    }
                }
            }
        };
        let root = scaled.sqrt();
        let mant = match round {
            Round::Down => root,
            Round::Up => {
                if &root * &root == scaled {
                    root
                } else {
                    root + 1
                }
            }
        };
        Dyadic::new(mant, -(bits as i64))
    }

    /// Directed division: within `2^-bits` of the exact quotient.
    pub fn div(&self, other: &Dyadic, bits: u32, round: Round) -> Dyadic {
        assert!(!other.is_zero(), "division by zero dyadic");
        let q = self.to_ratio() / other.to_ratio();
        Dyadic::from_ratio(&q, bits, round)
    }

    pub fn cmp(&self, other: &Dyadic) -> std::cmp::Ordering {
        let (a, b, _) = align(self, other);
        a.cmp(&b)
    }

    /// Approximate value for reporting only.
    pub fn approx(&self) -> f64 {
        use num::ToPrimitive;
        self.to_ratio().to_f64().unwrap_or(f64::NAN)
    }
}

fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
    let exp = a.exp.min(b.exp);
    let am = &a.mant << ((a.exp - exp) as u64);
    let bm = &b.mant << ((b.exp - exp) as u64);
    (am, bm, exp)
}

/// A closed interval with dyadic endpoints; all operations round outward
/// at the precision given per call, so the true real result is always
/// contained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl DyInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> DyInterval {
        debug_assert!(lo.cmp(&hi) != std::cmp::Ordering::Greater, "inverted interval");
        DyInterval { lo, hi }
    }

    pub fn point(d: Dyadic) -> DyInterval {
        DyInterval { lo: d.clone(), hi: d }
    }

    pub fn from_int(n: impl Into<BigInt>) -> DyInterval {
        DyInterval::point(Dyadic::from_int(n))
    }

    /// Encloses an exact rational within `2^-bits` on each side.
    pub fn from_ratio(q: &BigRational, bits: u32) -> DyInterval {
        DyInterval {
            lo: Dyadic::from_ratio(q, bits, Round::Down),
            hi: Dyadic::from_ratio(q, bits, Round::Up),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn mid(&self) -> BigRational {
        (self.lo.to_ratio() + self.hi.to_ratio()) / BigRational::from_integer(2.into())
    }

    pub fn add(&self, other: &DyInterval) -> DyInterval {
        DyInterval::new(self.lo.add(&other.lo), self.hi.add(&other.hi))
    }

    pub fn sub(&self, other: &DyInterval) -> DyInterval {
        DyInterval::new(self.lo.sub(&other.hi), self.hi.sub(&other.lo))
    }

    pub fn neg(&self) -> DyInterval {
        DyInterval::new(self.hi.neg(), self.lo.neg())
    }

    pub fn mul(&self, other: &DyInterval) -> DyInterval {
        let candidates = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = candidates[0].clone();
        let mut hi = candidates[0].clone();
        for c in &candidates[1..] {
            if c.cmp(&lo) == std::cmp::Ordering::Less {
                lo = c.clone();
            }
            if c.cmp(&hi) == std::cmp::Ordering::Greater {
                hi = c.clone();
            }
        }
        DyInterval::new(lo, hi)
    }

    pub fn scale_int(&self, n: &BigInt) -> DyInterval {
        self.mul(&DyInterval::from_int(n.clone()))
    }

    /// Tight square: `[0, max^2]` when the interval straddles zero.
    pub fn square(&self) -> DyInterval {
        if self.lo.signum() >= 0 {
            DyInterval::new(self.lo.mul(&self.lo), self.hi.mul(&self.hi))
        } else if self.hi.signum() <= 0 {
            DyInterval::new(self.hi.mul(&self.hi), self.lo.mul(&self.lo))
        } else {
            let a = self.lo.mul(&self.lo);
            let b = self.hi.mul(&self.hi);
            let hi = if a.cmp(&b) == std::cmp::Ordering::Greater { a } else { b };
            DyInterval::new(Dyadic::zero(), hi)
        }
    }

    pub fn abs(&self) -> DyInterval {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            self.neg()
        } else {
            let a = self.lo.abs();
            let b = self.hi.abs();
            let hi = if a.cmp(&b) == std::cmp::Ordering::Greater { a } else { b };
            DyInterval::new(Dyadic::zero(), hi)
        }
    }

    /// Outward square root (`lo >= 0` required).
    pub fn sqrt(&self, bits: u32) -> DyInterval {
        DyInterval::new(self.lo.sqrt(bits, Round::Down), self.hi.sqrt(bits, Round::Up))
    }

    /// Outward division by an interval of certain sign.
    pub fn div(&self, other: &DyInterval, bits: u32) -> DyInterval {
        let sign = other
            .sign_certain()
            .expect("interval division requires a sign-certain divisor");
        let (num_lo, num_hi) = if sign > 0 {
            (self.lo.div(&other.hi, bits, Round::Down), self.hi.div(&other.lo, bits, Round::Up))
        } else {
            (self.hi.div(&other.hi, bits, Round::Down), self.lo.div(&other.lo, bits, Round::Up))
        };
        // The monotone endpoint pairing above is only exact for numerators
        // of constant sign; fall back to all four directed quotients.
        let candidates = [
            num_lo,
            num_hi,
            self.lo.div(&other.lo, bits, Round::Down),
            self.hi.div(&other.hi, bits, Round::Up),
            self.lo.div(&other.lo, bits, Round::Up),
            self.hi.div(&other.hi, bits, Round::Down),
            self.lo.div(&other.hi, bits, Round::Up),
            self.hi.div(&other.lo, bits, Round::Down),
        ];
        let mut lo = candidates[0].clone();
        let mut hi = candidates[0].clone();
        for c in &candidates[1..] {
            if c.cmp(&lo) == std::cmp::Ordering::Less {
                lo = c.clone();
            }
            if c.cmp(&hi) == std::cmp::Ordering::Greater {
                hi = c.clone();
            }
        }
        DyInterval::new(lo, hi)
    }

    /// Rounds both endpoints outward to `bits` fractional bits.
    pub fn round(&self, bits: u32) -> DyInterval {
        DyInterval::new(self.lo.round(bits, Round::Down), self.hi.round(bits, Round::Up))
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    /// `Some(sign)` when every point of the interval has that sign.
    pub fn sign_certain(&self) -> Option<i32> {
        if self.lo.signum() > 0 {
            Some(1)
        } else if self.hi.signum() < 0 {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    /// Certainly strictly less than the other interval.
    pub fn lt_certain(&self, other: &DyInterval) -> bool {
        self.hi.cmp(&other.lo) == std::cmp::Ordering::Less
    }

    /// Certainly greater than or equal to the other interval.
    pub fn ge_certain(&self, other: &DyInterval) -> bool {
        self.lo.cmp(&other.hi) != std::cmp::Ordering::Less
    }

    pub fn intersects(&self, other: &DyInterval) -> bool {
        self.lo.cmp(&other.hi) != std::cmp::Ordering::Greater
            && other.lo.cmp(&self.hi) != std::cmp::Ordering::Greater
    }
}

/// Sum of interval squares: the squared Euclidean norm of a vector of
/// intervals.
pub fn norm_sq(v: &[DyInterval]) -> DyInterval {
    let mut acc = DyInterval::point(Dyadic::zero());
    for x in v {
        acc = acc.add(&x.square());
    }
    acc
}

/// Alternating-series bounds for `atan(1/x)`, `x >= 2`.
fn atan_inv_bounds(x: i64, bits: u32) -> (BigRational, BigRational) {
    let x = BigRational::from_integer(x.into());
    let x_sq = &x * &x;
    let tol = BigRational::new(BigInt::one(), BigInt::one() << (bits + 8));
    let mut power = x.recip();
    let mut sum = BigRational::zero();
    let mut prev;
    let mut k: i64 = 0;
    loop {
        let term = &power / BigRational::from_integer((2 * k + 1).into());
        prev = sum.clone();
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if term < tol {
            break;
        }
        power /= &x_sq;
        k += 1;
    }
    if sum < prev {
        (sum, prev)
    } else {
        (prev, sum)
    }
}

/// Certified enclosure of pi via `16 atan(1/5) - 4 atan(1/239)`.
pub fn pi_interval(bits: u32) -> DyInterval {
    let (a5_lo, a5_hi) = atan_inv_bounds(5, bits);
    let (a239_lo, a239_hi) = atan_inv_bounds(239, bits);
    let sixteen = BigRational::from_integer(16.into());
    let four = BigRational::from_integer(4.into());
    let lo = &sixteen * &a5_lo - &four * &a239_hi;
    let hi = &sixteen * &a5_hi - &four * &a239_lo;
    DyInterval::new(
        Dyadic::from_ratio(&lo, bits, Round::Down),
        Dyadic::from_ratio(&hi, bits, Round::Up),
    )
}

/// Certified enclosure of `6/pi`, the census radius factor per unit of
/// `C^2 covol`.
pub fn six_over_pi_interval(bits: u32) -> DyInterval {
    let six = DyInterval::from_int(6);
    six.div(&pi_interval(bits + 4), bits)
}
