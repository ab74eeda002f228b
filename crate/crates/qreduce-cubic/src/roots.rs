//! Certified real-root isolation for integer cubics with positive
//! discriminant (three distinct real roots).
//!
//! Separating points between consecutive roots come from enclosures of
//! the critical points, every polynomial sign is evaluated exactly in
//! integer arithmetic, and each root ends up in a rational bracket of
//! requested width that converts to an outward dyadic interval. Exact
//! rational roots are reported as errors because the callers require
//! irreducible polynomials.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use crate::dyadic::{DyInterval, Dyadic, Round};
use crate::CubicError;

/// `a X^3 + b X^2 + c X + d` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicPoly {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl CubicPoly {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<CubicPoly, CubicError> {
        if a.is_zero() {
            return Err(CubicError::Degenerate("leading coefficient is zero".into()));
        }
        Ok(CubicPoly { a, b, c, d })
    }

    /// Discriminant `18abcd - 4b^3d + b^2c^2 - 4ac^3 - 27a^2d^2`.
    pub fn disc(&self) -> BigInt {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        BigInt::from(18) * a * b * c * d - BigInt::from(4) * b * b * b * d + b * b * c * c
            - BigInt::from(4) * a * c * c * c
            - BigInt::from(27) * a * a * d * d
    }

    /// Exact value at a rational point.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        let c = BigRational::from_integer(self.c.clone());
        let d = BigRational::from_integer(self.d.clone());
        ((a * x + b) * x + c) * x + d
    }

    /// Exact sign at a rational point.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Exact sign of the derivative `3aX^2 + 2bX + c` at a rational point.
    pub fn deriv_sign_at(&self, x: &BigRational) -> i32 {
        let ta = BigRational::from_integer(&self.a * 3);
        let tb = BigRational::from_integer(&self.b * 2);
        let c = BigRational::from_integer(self.c.clone());
        let v = (ta * x + tb) * x + c;
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Interval evaluation at an interval argument.
    pub fn eval_interval(&self, x: &DyInterval) -> DyInterval {
        let a = DyInterval::from_int(self.a.clone());
        let b = DyInterval::from_int(self.b.clone());
        let c = DyInterval::from_int(self.c.clone());
        let d = DyInterval::from_int(self.d.clone());
        a.mul(x).add(&b).mul(x).add(&c).mul(x).add(&d)
    }

    /// The polynomial with negated leading sign convention removed:
    /// returns a copy with `a > 0` (same roots).
    fn positive_lead(&self) -> CubicPoly {
        if self.a.is_positive() {
            self.clone()
        } else {
            CubicPoly {
                a: -&self.a,
                b: -&self.b,
                c: -&self.c,
                d: -&self.d,
            }
        }
    }

    /// A power of two exceeding every root's absolute value
    /// (Cauchy bound `1 + max(|b|,|c|,|d|)/|a|`).
    fn root_bound(&self) -> BigRational {
        let m = self.b.abs().max(self.c.abs()).max(self.d.abs());
        let bound = BigRational::one() + BigRational::new(m, self.a.abs());
        let mut power = BigRational::one();
        let two = BigRational::from_integer(2.into());
        while power < bound {
            power *= &two;
        }
        power
    }
}

/// Three certified root enclosures in ascending order, each of width at
/// most `2^-bits`.
pub fn isolate_roots(poly: &CubicPoly, bits: u32) -> Result<[DyInterval; 3], CubicError> {
    let p = poly.positive_lead();
    if !p.disc().is_positive() {
        return Err(CubicError::NotTotallyReal);
    }
    let bound = p.root_bound();
    let neg_bound = -&bound;

    // Separators strictly between consecutive roots, found near the two
    // critical points (the sign of P there is + then - for a > 0).
    let vertex = BigRational::new(-&p.b, &p.a * 3);
    let s1 = separator(&p, &neg_bound, &vertex, 1)?;
    let s2 = separator(&p, &vertex, &bound, -1)?;

    let r1 = refine(&p, neg_bound, s1.clone(), bits)?;
    let r2 = refine(&p, s1, s2.clone(), bits)?;
    let r3 = refine(&p, s2, bound, bits)?;
    Ok([r1, r2, r3])
}

/// Finds a rational point between two roots where `P` has the given sign,
/// by shrinking a bracket of the critical point that lies in `(lo, hi)`.
/// The derivative changes sign exactly once there, and `P` attains
/// `want` on a neighborhood of the critical point.
fn separator(
    p: &CubicPoly,
    lo: &BigRational,
    hi: &BigRational,
    want: i32,
) -> Result<BigRational, CubicError> {
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let two = BigRational::from_integer(2.into());
    for _ in 0..10_000 {
        for probe in [&lo, &hi] {
            match p.sign_at(probe) {
                s if s == want => return Ok(probe.clone()),
                0 => {
                    return Err(CubicError::RationalRoot {
                        root: format!("{probe}"),
                    })
                }
                _ => {}
            }
        }
        let mid = (&lo + &hi) / &two;
        match p.deriv_sign_at(&mid) {
            0 => {
                // The critical point itself: P there has the wanted sign
                // (strict since the discriminant is positive).
                debug_assert_eq!(p.sign_at(&mid), want);
                return Ok(mid);
            }
            s => {
                // Derivative sign left of the enclosed critical point is
                // the sign at `lo`'s side: shrink towards the sign flip.
                let left_sign = p.deriv_sign_at(&lo);
                if s == left_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
    }
    Err(CubicError::PrecisionInsufficient {
        details: "separator search did not converge".into(),
    })
}

/// Bisects a sign-change bracket down to width `2^-bits` and converts it
/// to an outward dyadic interval.
fn refine(
    p: &CubicPoly,
    mut lo: BigRational,
    mut hi: BigRational,
    bits: u32,
) -> Result<DyInterval, CubicError> {
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let two = BigRational::from_integer(2.into());
    let sign_lo = p.sign_at(&lo);
    let sign_hi = p.sign_at(&hi);
    debug_assert!(sign_lo * sign_hi < 0, "bracket must change sign");
    while &hi - &lo > target {
        let mid = (&lo + &hi) / &two;
        match p.sign_at(&mid) {
            0 => {
                return Err(CubicError::RationalRoot {
                    root: format!("{mid}"),
                })
            }
            s if s == sign_lo => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(DyInterval::new(
        Dyadic::from_ratio(&lo, bits + 2, Round::Down),
        Dyadic::from_ratio(&hi, bits + 2, Round::Up),
    ))
}

/// Certifies the absence of rational roots. Any rational root `p/q` in
/// lowest terms has `q` dividing the leading coefficient, so it suffices
/// to scan, for each positive divisor `q`, the at most two integers `p`
/// inside `q` times each root enclosure and evaluate exactly.
pub fn no_rational_roots(poly: &CubicPoly, rho_budget: u64) -> Result<bool, CubicError> {
    let p = poly.positive_lead();
    if !p.disc().is_positive() {
        return Err(CubicError::NotTotallyReal);
    }
    let lead = p.a.to_biguint().expect("positive lead");
    let factors = qreduce::primes::factor(&lead, rho_budget).ok_or_else(|| {
        CubicError::FactorBudgetExceeded {
            n: p.a.to_string(),
        }
    })?;
    let mut divisors: Vec<BigInt> = vec![BigInt::one()];
    for (prime, mult) in &factors {
        let prime = BigInt::from(prime.clone());
        let mut extended = Vec::new();
        for d in &divisors {
            let mut power = BigInt::one();
            for _ in 0..*mult {
                power *= &prime;
                extended.push(d * &power);
            }
        }
        divisors.extend(extended);
    }

    for q in divisors {
        // Enclosures of width < 1/(2q) leave at most one integer
        // candidate in q times each enclosure.
        let bits_needed = (q.bits() as u32) + 2;
        let roots = match isolate_roots(&p, bits_needed) {
            Ok(r) => r,
            Err(CubicError::RationalRoot { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        for root in &roots {
            let scaled_lo = (root.lo().to_ratio() * BigRational::from_integer(q.clone())).ceil();
            let scaled_hi = (root.hi().to_ratio() * BigRational::from_integer(q.clone())).floor();
            let mut num = scaled_lo.to_integer();
            while num <= scaled_hi.to_integer() {
                let candidate = BigRational::new(num.clone(), q.clone());
                if p.eval(&candidate).is_zero() {
                    return Ok(false);
                }
                num += 1;
            }
        }
    }
    Ok(true)
}
