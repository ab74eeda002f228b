//! Fractional ideals of a real quadratic field as canonical rational
//! matrices over the integral basis `{1, omega}`.
//!
//! A fractional ideal is stored as the upper-triangular Hermite form of
//! its `Z`-basis: columns `(a, 0)` and `(b, c)` with `a, c > 0` and
//! `0 <= b < a`. The form is unique per module, so matrix equality is
//! ideal equality. Construction verifies stability under multiplication
//! by `omega`, which is exactly the condition for the `Z`-span to be a
//! module over the full ring of integers.

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qfield::{FieldError, QuadField, QuadNum};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("matrix columns do not span a rank-2 lattice")]
    Singular,
    #[error("Z-span is not stable under multiplication by omega")]
    NotAnIdeal,
    #[error("ideal does not contain 1")]
    OneNotInIdeal,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("malformed ideal JSON: {0}")]
    Parse(String),
}

/// A fractional ideal in Hermite-form representation.
///
/// Basis as elements: `a` and `b + c*omega` where the stored columns are
/// `(a, 0)` and `(b, c)` over `{1, omega}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FracIdeal {
    field: QuadField,
    /// Column-major entries: (0,0), (1,0), (0,1), (1,1).
    m: [BigRational; 4],
}

impl FracIdeal {
    /// Builds the ideal spanned over `Z` by the two columns (coordinates
    /// over `{1, omega}`), verifying rank and omega-stability.
    pub fn from_matrix(
        field: QuadField,
        cols: [(BigRational, BigRational); 2],
    ) -> Result<Self, IdealError> {
        let m = hnf(&cols)?;
        let ideal = FracIdeal { field, m };
        if !ideal.is_omega_stable() {
            return Err(IdealError::NotAnIdeal);
        }
        Ok(ideal)
    }

    /// The ring of integers as an ideal (identity matrix).
    pub fn ring_of_integers(field: QuadField) -> Self {
        FracIdeal {
            field,
            m: [
                BigRational::one(),
                BigRational::zero(),
                BigRational::zero(),
                BigRational::one(),
            ],
        }
    }

    /// Internal constructor for spans already known to be omega-stable
    /// (products, conjugates, scalings of valid ideals).
    fn from_span(field: QuadField, cols: &[(BigRational, BigRational)]) -> Result<Self, IdealError> {
        let m = hnf(cols)?;
        let ideal = FracIdeal { field, m };
        debug_assert!(ideal.is_omega_stable());
        Ok(ideal)
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn matrix(&self) -> &[BigRational; 4] {
        &self.m
    }

    /// Basis as field elements `(a, b + c*omega)`.
    pub fn basis_elements(&self) -> (QuadNum, QuadNum) {
        let e1 = self.field.from_omega_coords(&self.m[0], &self.m[1]);
        let e2 = self.field.from_omega_coords(&self.m[2], &self.m[3]);
        (e1, e2)
    }

    /// Ideal norm `|det|`; positive rational.
    pub fn norm(&self) -> BigRational {
        let det = &self.m[0] * &self.m[3] - &self.m[1] * &self.m[2];
        det.abs()
    }

    /// Exact membership test via back-substitution in the Hermite form.
    pub fn contains(&self, v: &QuadNum) -> bool {
        let (x, y) = self.field.omega_coords(v);
        let t = &y / &self.m[3];
        if !t.is_integer() {
            return false;
        }
        let s = (&x - &self.m[2] * &t) / &self.m[0];
        s.is_integer()
    }

    pub fn contains_one(&self) -> bool {
        self.contains(&self.field.one())
    }

    fn is_omega_stable(&self) -> bool {
        let w = self.field.omega();
        let (e1, e2) = self.basis_elements();
        self.contains(&(&w * &e1)) && self.contains(&(&w * &e2))
    }

    /// Product ideal: Hermite form of the four pairwise basis products.
    pub fn mul(&self, other: &FracIdeal) -> FracIdeal {
        assert_eq!(self.field, other.field, "ideals from different fields");
        let (a1, a2) = self.basis_elements();
        let (b1, b2) = other.basis_elements();
        let prods = [&a1 * &b1, &a1 * &b2, &a2 * &b1, &a2 * &b2];
        let cols: Vec<_> = prods.iter().map(|p| self.field.omega_coords(p)).collect();
        FracIdeal::from_span(self.field.clone(), &cols)
            .expect("product of rank-2 modules has rank 2")
    }

    /// Scale by a nonzero rational.
    pub fn scale(&self, q: &BigRational) -> FracIdeal {
        assert!(!q.is_zero(), "scaling ideal by zero");
        let cols = [
            (&self.m[0] * q, &self.m[1] * q),
            (&self.m[2] * q, &self.m[3] * q),
        ];
        FracIdeal::from_span(self.field.clone(), &cols).expect("scaled ideal keeps rank 2")
    }

    /// Conjugate ideal (image under the nontrivial automorphism).
    pub fn conj(&self) -> FracIdeal {
        let (e1, e2) = self.basis_elements();
        let cols = [
            self.field.omega_coords(&e1.conj()),
            self.field.omega_coords(&e2.conj()),
        ];
        FracIdeal::from_span(self.field.clone(), &cols).expect("conjugate ideal keeps rank 2")
    }

    /// Inverse ideal via `I * conj(I) = N(I) * O_F`, valid for every
    /// fractional ideal of the maximal order of a quadratic field.
    pub fn inverse(&self) -> FracIdeal {
        let n = self.norm();
        self.conj().scale(&n.recip())
    }

    /// Prime ideal of norm `p` above a rational prime `p`, or `None` when
    /// `p` is inert. Looks for a root of the minimal polynomial of omega
    /// modulo `p` and returns the span of `{p, omega - r}` over the ring
    /// of integers.
    pub fn prime_above(field: &QuadField, p: u64) -> Option<FracIdeal> {
        let root = omega_minpoly_root_mod_p(field, p)?;
        let w = field.omega();
        let gen2 = &w - &field.from_int(BigInt::from(root));
        let p_el = field.from_int(BigInt::from(p));
        // Z-span of p*{1, omega} and (omega - r)*{1, omega}.
        let elems = [
            p_el.clone(),
            &p_el * &w,
            gen2.clone(),
            &gen2 * &w,
        ];
        let cols: Vec<_> = elems.iter().map(|e| field.omega_coords(e)).collect();
        Some(FracIdeal::from_span(field.clone(), &cols).expect("prime ideal spans rank 2"))
    }
}

/// Smallest nonnegative root of the minimal polynomial of omega mod `p`.
fn omega_minpoly_root_mod_p(field: &QuadField, p: u64) -> Option<u64> {
    let p_big = BigInt::from(p);
    let (lin, con) = if field.is_one_mod_four() {
        // omega^2 - omega - (d-1)/4
        (BigInt::from(-1), -((field.d() - BigInt::one()) / BigInt::from(4)))
    } else {
        // omega^2 - d
        (BigInt::zero(), -field.d())
    };
    let modp = |x: &BigInt| -> u64 {
        use num::ToPrimitive;
        x.mod_floor(&p_big).to_u64().expect("residue fits u64")
    };
    let (lin, con) = (modp(&lin), modp(&con));
    (0..p).find(|&r| (r * r % p + lin * r % p + con) % p == 0)
}

/// Hermite form of the `Z`-span of the given columns.
fn hnf(cols: &[(BigRational, BigRational)]) -> Result<[BigRational; 4], IdealError> {
    let mut den = BigInt::one();
    for (x, y) in cols {
        den = den.lcm(x.denom()).lcm(y.denom());
    }
    let scale = BigRational::from_integer(den.clone());
    let mut v: Vec<(BigInt, BigInt)> = cols
        .iter()
        .map(|(x, y)| ((x * &scale).to_integer(), (y * &scale).to_integer()))
        .collect();

    // Gather the gcd of the omega row into a single pivot column.
    let pivot_idx = v.iter().position(|(_, y)| !y.is_zero()).ok_or(IdealError::Singular)?;
    let mut pivot = v.swap_remove(pivot_idx);
    for col in v.iter_mut() {
        if col.1.is_zero() {
            continue;
        }
        let eg = pivot.1.extended_gcd(&col.1);
        let (g, s, t) = (eg.gcd, eg.x, eg.y);
        let new_pivot = (&s * &pivot.0 + &t * &col.0, g.clone());
        let new_col = (&pivot.1 / &g * &col.0 - &col.1 / &g * &pivot.0, BigInt::zero());
        pivot = new_pivot;
        *col = new_col;
    }
    if pivot.1.is_negative() {
        pivot.0 = -pivot.0;
        pivot.1 = -pivot.1;
    }

    // Remaining columns live on the rational axis; their gcd is the first
    // diagonal entry.
    let mut a = BigInt::zero();
    for (x, y) in &v {
        debug_assert!(y.is_zero());
        a = a.gcd(x);
    }
    if a.is_zero() {
        return Err(IdealError::Singular);
    }
    let b = pivot.0.mod_floor(&a);

    let den_rat = BigRational::from_integer(den);
    Ok([
        BigRational::from_integer(a) / &den_rat,
        BigRational::zero(),
        BigRational::from_integer(b) / &den_rat,
        BigRational::from_integer(pivot.1) / &den_rat,
    ])
}

/// Witness data for the primitivity decision: the integer coordinate
/// matrix of the inverse ideal over `{1, omega}` and the gcd of its
/// entries. `1/k` lies in the ideal exactly when `k` divides every entry,
/// so primitivity of 1 is `gcd == 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitivityEvidence {
    pub coeffs: [[String; 2]; 2],
    pub gcd_all: String,
}

/// Decides whether 1 is primitive in `ideal`: no `1/k` with integer
/// `k >= 2` lies in the ideal. Requires `1` to be a member.
pub fn is_primitive_one(ideal: &FracIdeal) -> Result<(bool, PrimitivityEvidence), IdealError> {
    if !ideal.contains_one() {
        return Err(IdealError::OneNotInIdeal);
    }
    let inv = ideal.inverse();
    // 1 in I means O_F is contained in I, so the inverse is integral and
    // its Hermite entries are integers.
    let entry = |i: usize| -> BigInt {
        debug_assert!(inv.m[i].is_integer(), "inverse of an ideal containing 1 is integral");
        inv.m[i].to_integer()
    };
    let (k00, k10, k01, k11) = (entry(0), entry(1), entry(2), entry(3));
    let gcd_all = k00.gcd(&k10).gcd(&k01).gcd(&k11);
    let primitive = gcd_all.is_one();
    let evidence = PrimitivityEvidence {
        coeffs: [
            [k00.to_string(), k01.to_string()],
            [k10.to_string(), k11.to_string()],
        ],
        gcd_all: gcd_all.to_string(),
    };
    Ok((primitive, evidence))
}

/// Necessary size condition for reducedness: `N(I)^-1 <= C^2 sqrt(Delta)`,
/// decided exactly as `1 <= N(I)^2 C^4 Delta` over the rationals.
pub fn norm_bound_check(ideal: &FracIdeal, c: &BigRational) -> bool {
    let n = ideal.norm();
    let c2 = c * c;
    let delta = BigRational::from_integer(ideal.field().discriminant().clone());
    &n * &n * &c2 * &c2 * delta >= BigRational::one()
}

// --- JSON wire format -----------------------------------------------------

/// Integer that serializes as a JSON number when it fits in `i64` and as a
/// decimal string otherwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum WireInt {
    Small(i64),
    Big(String),
}

impl WireInt {
    fn to_bigint(&self) -> Result<BigInt, IdealError> {
        match self {
            WireInt::Small(n) => Ok(BigInt::from(*n)),
            WireInt::Big(s) => s
                .parse()
                .map_err(|_| IdealError::Parse(format!("bad integer literal {s:?}"))),
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

/// On-disk form of an ideal: squarefree `d` plus the four matrix entries
/// in column-major order, each as a `[numerator, denominator]` pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealWire {
    d: WireInt,
    mat: [[WireInt; 2]; 4],
}

impl IdealWire {
    pub fn from_ideal(ideal: &FracIdeal) -> IdealWire {
        let entry = |q: &BigRational| [WireInt::from_bigint(q.numer()), WireInt::from_bigint(q.denom())];
        IdealWire {
            d: WireInt::from_bigint(ideal.field.d()),
            mat: [
                entry(&ideal.m[0]),
                entry(&ideal.m[1]),
                entry(&ideal.m[2]),
                entry(&ideal.m[3]),
            ],
        }
    }

    pub fn to_ideal(&self) -> Result<FracIdeal, IdealError> {
        let field = QuadField::new(self.d.to_bigint()?)?;
        let entry = |pair: &[WireInt; 2]| -> Result<BigRational, IdealError> {
            let num = pair[0].to_bigint()?;
            let den = pair[1].to_bigint()?;
            if den.is_zero() {
                return Err(IdealError::Parse("zero denominator".into()));
            }
            Ok(BigRational::new(num, den))
        };
        let cols = [
            (entry(&self.mat[0])?, entry(&self.mat[1])?),
            (entry(&self.mat[2])?, entry(&self.mat[3])?),
        ];
        FracIdeal::from_matrix(field, cols)
    }
}

pub fn ideal_to_json(ideal: &FracIdeal) -> String {
    serde_json::to_string(&IdealWire::from_ideal(ideal)).expect("ideal serializes")
}

pub fn ideal_from_json(s: &str) -> Result<FracIdeal, IdealError> {
    let wire: IdealWire =
        serde_json::from_str(s).map_err(|e| IdealError::Parse(e.to_string()))?;
    wire.to_ideal()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn field(d: i64) -> QuadField {
        QuadField::new(d).unwrap()
    }

    #[test]
    fn ring_of_integers_is_identity() {
        let o = FracIdeal::ring_of_integers(field(5));
        assert_eq!(o.norm(), BigRational::one());
        assert!(o.contains_one());
        assert!(o.contains(&field(5).omega()));
        assert!(!o.contains(&field(5).num(rat(1, 2), rat(0, 1))));
    }

    #[test]
    fn scaled_ring_has_scaled_norm() {
        let o = FracIdeal::ring_of_integers(field(5));
        let i = o.scale(&rat(3, 1));
        assert_eq!(i.norm(), rat(9, 1));
        assert!(!i.contains_one());
        assert!(i.contains(&field(5).from_int(3)));
    }

    #[test]
    fn non_stable_span_is_rejected() {
        // Z*2 + Z*(1 + omega) in Q(sqrt(5)): 2 is inert, so no module of
        // norm 2 exists and omega-stability must fail.
        let err = FracIdeal::from_matrix(field(5), [(rat(2, 1), rat(0, 1)), (rat(1, 1), rat(1, 1))]);
        assert_eq!(err.unwrap_err(), IdealError::NotAnIdeal);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let err = FracIdeal::from_matrix(field(5), [(rat(2, 1), rat(1, 1)), (rat(4, 1), rat(2, 1))]);
        assert_eq!(err.unwrap_err(), IdealError::Singular);
    }

    #[test]
    fn split_prime_above_three_in_q79() {
        // 79 = 1 mod 3, so 3 splits in Q(sqrt(79)).
        let f = field(79);
        let p = FracIdeal::prime_above(&f, 3).unwrap();
        assert_eq!(p.norm(), rat(3, 1));
        // Root of X^2 - 79 mod 3 is r = 1, so the canonical basis is
        // {3, 2 + omega} with omega = sqrt(79).
        assert_eq!(p.m, [rat(3, 1), rat(0, 1), rat(2, 1), rat(1, 1)]);
        let inv = p.inverse();
        assert_eq!(inv.norm(), rat(1, 3));
        assert!(inv.contains_one());
        // I * I^-1 = O_F.
        assert_eq!(p.mul(&inv), FracIdeal::ring_of_integers(f));
    }

    #[test]
    fn inert_prime_has_no_degree_one_factor() {
        assert!(FracIdeal::prime_above(&field(5), 2).is_none());
        assert!(FracIdeal::prime_above(&field(5), 3).is_none());
        assert!(FracIdeal::prime_above(&field(5), 11).is_some()); // 11 splits
    }

    #[test]
    fn primitivity_examples() {
        let f = field(79);
        let p = FracIdeal::prime_above(&f, 3).unwrap();
        let (prim, ev) = is_primitive_one(&p.inverse()).unwrap();
        assert!(prim);
        assert_eq!(ev.gcd_all, "1");

        let half = FracIdeal::ring_of_integers(field(5)).scale(&rat(1, 2));
        let (prim, ev) = is_primitive_one(&half).unwrap();
        assert!(!prim);
        assert_eq!(ev.gcd_all, "2");

        let o3 = FracIdeal::ring_of_integers(field(5)).scale(&rat(3, 1));
        assert_eq!(is_primitive_one(&o3).unwrap_err(), IdealError::OneNotInIdeal);
    }

    #[test]
    fn norm_bound_examples() {
        let f = field(5);
        let o = FracIdeal::ring_of_integers(f.clone());
        assert!(norm_bound_check(&o, &rat(1, 1)));
        // An ideal with N(I)^-1 = 101 fails at C = 1 since 101^2 > 5;
        // 101 = 1 mod 5 splits in Q(sqrt(5)), giving such an ideal.
        let p101 = FracIdeal::prime_above(&f, 101).unwrap();
        let i = p101.inverse();
        assert_eq!(i.norm().recip(), rat(101, 1));
        assert!(!norm_bound_check(&i, &rat(1, 1)));
        assert!(norm_bound_check(&i, &rat(7, 1))); // 101^2 <= 7^4 * 5
    }

    #[test]
    fn product_of_inverses_matches_inverse_of_product() {
        let f = field(79);
        let p3 = FracIdeal::prime_above(&f, 3).unwrap();
        let p5 = FracIdeal::prime_above(&f, 5).unwrap();
        let prod = p3.mul(&p5);
        assert_eq!(prod.norm(), rat(15, 1));
        assert_eq!(prod.inverse(), p5.inverse().mul(&p3.inverse()));
    }

    #[test]
    fn json_round_trip() {
        let f = field(79);
        let i = FracIdeal::prime_above(&f, 3).unwrap().inverse();
        let s = ideal_to_json(&i);
        let back = ideal_from_json(&s).unwrap();
        assert_eq!(back, i);
        // Hand-written form of (1/2) O_F, with one string big integer.
        let manual = r#"{"d": 5, "mat": [[1,2],[0,1],[0,1],["1",2]]}"#;
        let j = ideal_from_json(manual).unwrap();
        assert_eq!(j.norm(), rat(1, 4));
        assert_eq!(j, FracIdeal::ring_of_integers(field(5)).scale(&rat(1, 2)));
    }
}
