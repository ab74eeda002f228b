//! Seed polynomials and their arithmetic certificates.
//!
//! A seed fixes the integer cubic, the cutoff `C` and a starting interval
//! precision. `check_seed` certifies the properties the census argument
//! needs from arithmetic alone: positive discriminant, no rational root,
//! coefficient gcd 1, prime leading coefficient (which makes 1 primitive
//! in the lattice), and the squarefree status of the discriminant (which
//! decides whether the constructed order is maximal).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use num::Integer;
use serde::{Deserialize, Serialize};

use qreduce::primes::{is_probable_prime, squarefree_status, SquarefreeStatus};

use crate::roots::{no_rational_roots, CubicPoly};
use crate::CubicError;

pub const DEFAULT_PRECISION_BITS: u32 = 96;
pub const MAX_PRECISION_BITS: u32 = 1 << 14;
pub const DEFAULT_RHO_BUDGET: u64 = 40_000_000;

/// A census problem instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicSeed {
    pub poly: CubicPoly,
    pub c: BigRational,
    pub precision_bits: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WireInt {
    Small(i64),
    Big(String),
}

impl WireInt {
    fn to_bigint(&self) -> Result<BigInt, CubicError> {
        match self {
            WireInt::Small(n) => Ok(BigInt::from(*n)),
            WireInt::Big(s) => s
                .parse()
                .map_err(|_| CubicError::Seed(format!("bad integer literal {s:?}"))),
        }
    }

    fn from_bigint(n: &BigInt) -> WireInt {
        use num::ToPrimitive;
        match n.to_i64() {
            Some(v) => WireInt::Small(v),
            None => WireInt::Big(n.to_string()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedWire {
    a: WireInt,
    b: WireInt,
    c: WireInt,
    d: WireInt,
    #[serde(rename = "C")]
    cutoff: String,
    precision_bits: u32,
}

impl CubicSeed {
    pub fn new(poly: CubicPoly, c: BigRational, precision_bits: u32) -> Result<CubicSeed, CubicError> {
        if c < BigRational::one() {
            return Err(CubicError::Seed(format!("C = {c} must be >= 1")));
        }
        if precision_bits == 0 || precision_bits > MAX_PRECISION_BITS {
            return Err(CubicError::Seed(format!(
                "precision_bits = {precision_bits} outside (0, {MAX_PRECISION_BITS}]"
            )));
        }
        Ok(CubicSeed { poly, c, precision_bits })
    }

    pub fn from_json(text: &str) -> Result<CubicSeed, CubicError> {
        let wire: SeedWire =
            serde_json::from_str(text).map_err(|e| CubicError::Seed(e.to_string()))?;
        let poly = CubicPoly::new(
            wire.a.to_bigint()?,
            wire.b.to_bigint()?,
            wire.c.to_bigint()?,
            wire.d.to_bigint()?,
        )?;
        let c = parse_ratio(&wire.cutoff)?;
        CubicSeed::new(poly, c, wire.precision_bits)
    }

    pub fn to_json(&self) -> String {
        let wire = SeedWire {
            a: WireInt::from_bigint(&self.poly.a),
            b: WireInt::from_bigint(&self.poly.b),
            c: WireInt::from_bigint(&self.poly.c),
            d: WireInt::from_bigint(&self.poly.d),
            cutoff: format!("{}/{}", self.c.numer(), self.c.denom()),
            precision_bits: self.precision_bits,
        };
        serde_json::to_string(&wire).expect("seed serializes")
    }
}

/// Parses an exact "num/den" rational (bare integers allowed).
pub fn parse_ratio(s: &str) -> Result<BigRational, CubicError> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| CubicError::Seed(format!("bad numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| CubicError::Seed(format!("bad denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(CubicError::Seed(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Arithmetic facts about a seed polynomial.
#[derive(Debug, Clone, Serialize)]
pub struct SeedReport {
    pub disc: String,
    pub disc_positive: bool,
    pub gcd_one: bool,
    pub irreducible: bool,
    pub lead_prime: bool,
    pub squarefree: String,
    /// `Some(true)` exactly when the squarefree status certifies that the
    /// order attached to the polynomial is the maximal order.
    pub order_maximal: Option<bool>,
}

impl SeedReport {
    pub fn all_hypotheses_hold(&self) -> bool {
        self.disc_positive
            && self.gcd_one
            && self.irreducible
            && self.lead_prime
            && self.order_maximal == Some(true)
    }
}

/// Certifies the arithmetic hypotheses of a seed.
pub fn check_seed(seed: &CubicSeed, rho_budget: u64) -> Result<SeedReport, CubicError> {
    let p = &seed.poly;
    let disc = p.disc();
    let disc_positive = disc.is_positive();

    let gcd_one = {
        let g = p.a.gcd(&p.b).gcd(&p.c).gcd(&p.d);
        g.is_one()
    };

    let lead_prime = p.a.is_positive()
        && is_probable_prime(&p.a.to_biguint().expect("positive lead"));

    let irreducible = if disc_positive {
        no_rational_roots(p, rho_budget)?
    } else {
        false
    };

    let (squarefree, order_maximal) = if disc_positive {
        let status = squarefree_status(&disc, 100_000, rho_budget);
        let maximal = match status {
            SquarefreeStatus::Yes => Some(true),
            SquarefreeStatus::No => Some(false),
            SquarefreeStatus::Unknown => None,
        };
        (format!("{status:?}").to_lowercase(), maximal)
    } else {
        ("not-applicable".to_string(), Some(false))
    };

    Ok(SeedReport {
        disc: disc.to_string(),
        disc_positive,
        gcd_one,
        irreducible,
        lead_prime,
        squarefree,
        order_maximal,
    })
}
