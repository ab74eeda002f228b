//! The embedded rank-3 lattice `Z + Z beta + Z (a beta^2)` of a seed
//! polynomial, reduced and re-certified.
//!
//! LLL runs in exact rational arithmetic on the midpoints of the root
//! enclosures while tracking the integer change of basis, so the only
//! approximation in the whole pipeline sits in the root enclosures
//! themselves. Certified quantities (lengths, covolume, coordinates of
//! embedded vectors) are then recomputed as outward intervals from the
//! integer coordinates, never from the floating reduction.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use crate::dyadic::{DyInterval, Dyadic, Round};
use crate::roots::{isolate_roots, CubicPoly};
use crate::CubicError;

// Reduction quality. The classic 3/4 is too lax here: a basis headed by
// the unit vector (norm squared exactly 3) only gets swapped behind a
// shorter second vector when that vector has norm squared below 3 delta,
// and the short generators this crate cares about live in (9/4, 3). The
// near-optimal 99/100 makes the swap fire for all of them while every
// standard guarantee quoted elsewhere (size reduction |mu| <= 1/2,
// successive Gram-Schmidt ratio at most 2) holds a fortiori.
const LLL_DELTA: (i64, i64) = (99, 100);

/// Reduced, certified lattice data for one seed polynomial.
#[derive(Debug, Clone)]
pub struct CubicLattice {
    poly: CubicPoly,
    roots: [DyInterval; 3],
    bits: u32,
    /// Rows: the reduced basis in coordinates over `{1, beta, a beta^2}`.
    coords: [[BigInt; 3]; 3],
    /// Certified covolume, from the exact discriminant.
    covol: DyInterval,
}

impl CubicLattice {
    pub fn coords(&self) -> &[[BigInt; 3]; 3] {
        &self.coords
    }

    pub fn roots(&self) -> &[DyInterval; 3] {
        &self.roots
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn poly(&self) -> &CubicPoly {
        &self.poly
    }

    pub fn covol(&self) -> &DyInterval {
        &self.covol
    }

    /// Certified embedding of an integer coordinate vector.
    pub fn embed(&self, coords: &[BigInt; 3]) -> [DyInterval; 3] {
        let a = &self.poly.a;
        std::array::from_fn(|j| {
            let root = &self.roots[j];
            let beta_sq = root.square();
            DyInterval::from_int(coords[0].clone())
                .add(&root.scale_int(&coords[1]))
                .add(&beta_sq.scale_int(&(a * &coords[2])))
                .round(self.bits + 8)
        })
    }

    pub fn basis_vector(&self, i: usize) -> [DyInterval; 3] {
        self.embed(&self.coords[i])
    }

    /// Certified squared length of a coordinate vector.
    pub fn norm_sq_of(&self, coords: &[BigInt; 3]) -> DyInterval {
        crate::dyadic::norm_sq(&self.embed(coords))
    }

    /// Midpoint embedding, for non-certified range estimates only.
    pub fn embed_mid(&self, coords: &[BigInt; 3]) -> [BigRational; 3] {
        let a = BigRational::from_integer(self.poly.a.clone());
        std::array::from_fn(|j| {
            let r = self.roots[j].mid();
            BigRational::from_integer(coords[0].clone())
                + BigRational::from_integer(coords[1].clone()) * &r
                + BigRational::from_integer(coords[2].clone()) * &a * &r * &r
        })
    }

    /// Gram-Schmidt data of the reduced midpoint basis:
    /// `(squared star lengths, mu coefficients)`.
    pub fn gso_mid(&self) -> ([BigRational; 3], [[BigRational; 3]; 3]) {
        let rows: [[BigRational; 3]; 3] = std::array::from_fn(|i| self.embed_mid(&self.coords[i]));
        gso(&rows)
    }
}

fn dot(a: &[BigRational; 3], b: &[BigRational; 3]) -> BigRational {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn gso(rows: &[[BigRational; 3]; 3]) -> ([BigRational; 3], [[BigRational; 3]; 3]) {
    let mut star: Vec<[BigRational; 3]> = Vec::with_capacity(3);
    let mut mu = [
        [BigRational::zero(), BigRational::zero(), BigRational::zero()],
        [BigRational::zero(), BigRational::zero(), BigRational::zero()],
        [BigRational::zero(), BigRational::zero(), BigRational::zero()],
    ];
    let mut star_sq = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
    for i in 0..3 {
        let mut v = rows[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&rows[i], &star[j]) / &star_sq[j];
            for t in 0..3 {
                let shift = &mu[i][j] * &star[j][t];
                v[t] -= shift;
            }
        }
        star_sq[i] = dot(&v, &v);
        star.push(v);
    }
    (star_sq, mu)
}

/// Exact rational LLL on the rows, returning the integer
/// transform applied.
fn lll3(mut rows: [[BigRational; 3]; 3]) -> [[BigInt; 3]; 3] {
    let mut u: [[BigInt; 3]; 3] = [
        [BigInt::one(), BigInt::zero(), BigInt::zero()],
        [BigInt::zero(), BigInt::one(), BigInt::zero()],
        [BigInt::zero(), BigInt::zero(), BigInt::one()],
    ];
    let delta = BigRational::new(LLL_DELTA.0.into(), LLL_DELTA.1.into());
    let half = BigRational::new(1.into(), 2.into());

    let mut k = 1usize;
    while k < 3 {
        for j in (0..k).rev() {
            let (_, mu) = gso(&rows);
            if mu[k][j].abs() > half {
                let q = round_nearest(&mu[k][j]);
                for t in 0..3 {
                    let shift = BigRational::from_integer(q.clone()) * &rows[j][t];
                    rows[k][t] -= shift;
                    let ushift = &q * &u[j][t];
                    u[k][t] -= ushift;
                }
            }
        }
        let (star_sq, mu) = gso(&rows);
        let lovasz = &star_sq[k] >= &((&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &star_sq[k - 1]);
        if lovasz {
            k += 1;
        } else {
            rows.swap(k, k - 1);
            u.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
    u
}

fn round_nearest(q: &BigRational) -> BigInt {
    use num::Integer;
    let num: BigInt = q.numer() * 2 + q.denom();
    let den: BigInt = q.denom() * 2;
    num.div_floor(&den)
}

/// Builds the reduced lattice at the given root precision.
pub fn build_lattice(poly: &CubicPoly, bits: u32) -> Result<CubicLattice, CubicError> {
    let disc = poly.disc();
    if !disc.is_positive() {
        return Err(CubicError::NotTotallyReal);
    }
    let roots = isolate_roots(poly, bits)?;

    let a_rat = BigRational::from_integer(poly.a.abs());
    let mids: [BigRational; 3] = std::array::from_fn(|j| roots[j].mid());
    let rows: [[BigRational; 3]; 3] = [
        [BigRational::one(), BigRational::one(), BigRational::one()],
        mids.clone(),
        std::array::from_fn(|j| &a_rat * &mids[j] * &mids[j]),
    ];
    let coords = lll3(rows);

    // covol = sqrt(disc) / |a| exactly; certify by directed square root.
    let disc_iv = DyInterval::from_int(disc).sqrt(bits + 8);
    let covol = disc_iv.div(&DyInterval::from_int(poly.a.abs()), bits + 8);

    let lat = CubicLattice {
        poly: poly.clone(),
        roots,
        bits,
        coords,
        covol,
    };

    // Cross-check the discriminant covolume against the Vandermonde
    // product of certified root differences.
    let d21 = lat.roots[1].sub(&lat.roots[0]);
    let d31 = lat.roots[2].sub(&lat.roots[0]);
    let d32 = lat.roots[2].sub(&lat.roots[1]);
    let vander = d21
        .mul(&d31)
        .mul(&d32)
        .mul(&DyInterval::from_int(lat.poly.a.abs()))
        .round(bits + 8);
    if !vander.intersects(&lat.covol) {
        return Err(CubicError::PrecisionInsufficient {
            details: "covolume cross-check intervals are disjoint".into(),
        });
    }

    Ok(lat)
}

/// Builds at escalating precision until `decide` returns a value, the
/// precision cap is hit, or an error other than ambiguity occurs.
pub fn with_escalation<T>(
    poly: &CubicPoly,
    start_bits: u32,
    cap_bits: u32,
    mut decide: impl FnMut(&CubicLattice) -> Result<Option<T>, CubicError>,
) -> Result<T, CubicError> {
    let mut bits = start_bits.max(8);
    loop {
        let lat = build_lattice(poly, bits)?;
        if let Some(v) = decide(&lat)? {
            return Ok(v);
        }
        if bits >= cap_bits {
            return Err(CubicError::PrecisionInsufficient {
                details: format!("undecided at the precision cap of {cap_bits} bits"),
            });
        }
        bits = (bits * 2).min(cap_bits);
    }
}

/// Certified squared length of the first reduced basis vector.
pub fn b1_norm_sq(lat: &CubicLattice) -> DyInterval {
    lat.norm_sq_of(&lat.coords()[0])
}

/// Convenience: the dyadic interval for a rational bound.
pub fn ratio_interval(q: &BigRational, bits: u32) -> DyInterval {
    DyInterval::new(
        Dyadic::from_ratio(q, bits, Round::Down),
        Dyadic::from_ratio(q, bits, Round::Up),
    )
}
