//! Certified census of short lattice vectors with a small coordinate.
//!
//! The counted set is `{g in I : ||g|| < r and |g_i| < 1/C for some i}`
//! where `r` is the census radius `(6/pi) C^2 covol(I)`. Everything that
//! can be decided in exact rational arithmetic is: the squared length of
//! `x + y beta + z (a beta^2)` is the trace of its square, a rational
//! computed from power sums of the polynomial's roots, so ball
//! membership reduces to comparing exact rationals against tight
//! two-sided rational bounds on `r^2` (the only irrational ingredient is
//! pi). The per-coordinate slab tests genuinely need the real roots and
//! use outward interval arithmetic; vectors the intervals cannot settle
//! are reported as ambiguous rather than silently classified, and the
//! driver retries at doubled root precision until the ambiguity is gone
//! or a cap is reached.
//!
//! Counting walks coefficient pairs `(s2, s3)` inside an exact ellipse
//! (the projection of the ball) and resolves the `s1` axis in whole
//! integer runs, so the cost scales with the number of pairs, not with
//! the vastly larger number of ball points.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use qreduce::primes::{is_probable_prime, isqrt};

use crate::dyadic::{six_over_pi_interval, DyInterval};
use crate::lattice3::{build_lattice, CubicLattice};
use crate::roots::CubicPoly;
use crate::seed::{CubicSeed, MAX_PRECISION_BITS};
use crate::CubicError;

/// Default cap on visited `(s2, s3)` pairs before the census stops with
/// a partial, still-certified count.
pub const DEFAULT_PAIR_BUDGET: u64 = 50_000_000;

/// Per-pair cap on individually re-examined boundary candidates.
const POINT_FALLBACK_CAP: u128 = 4096;

/// Clamp for converting unbounded rational bounds to loop indices.
const RUN_CLAMP: i128 = i128::MAX / 8;

/// Tuning knobs for the census walk.
#[derive(Debug, Clone)]
pub struct CensusParams {
    slack: BigRational,
    pair_budget: u64,
}

impl Default for CensusParams {
    fn default() -> CensusParams {
        CensusParams {
            slack: BigRational::zero(),
            pair_budget: DEFAULT_PAIR_BUDGET,
        }
    }
}

impl CensusParams {
    /// `slack >= 0` widens the enumerated radius to `r (1 + slack)`;
    /// the extra shell is re-excluded exactly, so the counts do not
    /// change, only the amount of work.
    pub fn with_slack(mut self, slack: BigRational) -> CensusParams {
        assert!(!slack.is_negative(), "slack must be nonnegative");
        self.slack = slack;
        self
    }

    pub fn with_budget(mut self, pair_budget: u64) -> CensusParams {
        self.pair_budget = pair_budget;
        self
    }

    pub fn slack(&self) -> &BigRational {
        &self.slack
    }

    pub fn pair_budget(&self) -> u64 {
        self.pair_budget
    }
}

/// Power sums `sum(root_i^k)` for `k = 0..=4`, exact from the
/// coefficients via Newton's identities.
pub fn power_sums(poly: &CubicPoly) -> [BigRational; 5] {
    let a = BigRational::from_integer(poly.a.clone());
    let e1 = BigRational::from_integer(-poly.b.clone()) / &a;
    let e2 = BigRational::from_integer(poly.c.clone()) / &a;
    let e3 = BigRational::from_integer(-poly.d.clone()) / &a;
    let p0 = BigRational::from_integer(3.into());
    let p1 = e1.clone();
    let p2 = &e1 * &p1 - BigRational::from_integer(2.into()) * &e2;
    let p3 = &e1 * &p2 - &e2 * &p1 + BigRational::from_integer(3.into()) * &e3;
    let p4 = &e1 * &p3 - &e2 * &p2 + &e3 * &p1;
    [p0, p1, p2, p3, p4]
}

/// Exact squared Euclidean length of the vector with coordinates
/// `(x, y, z)` over the basis `{1, beta, a beta^2}`: the sum over the
/// three real embeddings equals the trace of the square.
pub fn trace_of_square(poly: &CubicPoly, coords: &[BigInt; 3]) -> BigRational {
    let [_, p1, p2, p3, p4] = power_sums(poly);
    let a = BigRational::from_integer(poly.a.clone());
    let x = BigRational::from_integer(coords[0].clone());
    let y = BigRational::from_integer(coords[1].clone());
    let z = BigRational::from_integer(coords[2].clone());
    let two = BigRational::from_integer(2.into());
    BigRational::from_integer(3.into()) * &x * &x
        + &two * &x * &y * &p1
        + (&y * &y + &two * &x * &z * &a) * &p2
        + &two * &y * &z * &a * &p3
        + &z * &z * &a * &a * &p4
}

/// Two-sided exact rational bounds on the squared census radius
/// `((6/pi) C^2 covol)^2`, with `covol^2 = disc / a^2` exact.
pub fn radius_sq_range(poly: &CubicPoly, c: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let disc = poly.disc();
    assert!(disc.is_positive(), "radius needs a positive discriminant");
    let factor = c * c * c * c * BigRational::new(disc, &poly.a * &poly.a);
    let sop = six_over_pi_interval(bits.max(64));
    let sq = sop.square();
    (
        sq.lo().to_ratio() * &factor,
        sq.hi().to_ratio() * &factor,
    )
}

/// Rational upper bound on `sqrt(r)` for `r >= 0`, off by less than
/// one over the denominator.
fn sqrt_ratio_upper(r: &BigRational) -> BigRational {
    assert!(!r.is_negative());
    let nd = (r.numer() * r.denom()).to_biguint().expect("nonnegative");
    let root: BigInt = (isqrt(&nd) + 1u32).into();
    BigRational::new(root, r.denom().clone())
}

fn floor_int(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

fn ceil_int(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

fn to_clamped(x: &BigInt) -> i128 {
    match x.to_i128() {
        Some(v) => v.clamp(-RUN_CLAMP, RUN_CLAMP),
        None => {
            if x.is_negative() {
                -RUN_CLAMP
            } else {
                RUN_CLAMP
            }
        }
    }
}

/// Inclusive integer run.
type Run = (i128, i128);

fn mk_run(lo: i128, hi: i128) -> Option<Run> {
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

fn union_runs(mut runs: Vec<Run>) -> Vec<Run> {
    runs.sort_unstable();
    let mut out: Vec<Run> = Vec::with_capacity(runs.len());
    for r in runs {
        match out.last_mut() {
            Some(last) if r.0 <= last.1.saturating_add(1) => last.1 = last.1.max(r.1),
            _ => out.push(r),
        }
    }
    out
}

fn intersect_with(set: &[Run], clip: Run) -> Vec<Run> {
    set.iter()
        .filter_map(|&(lo, hi)| mk_run(lo.max(clip.0), hi.min(clip.1)))
        .collect()
}

fn subtract_runs(a: &[Run], b: &[Run]) -> Vec<Run> {
    let mut out = Vec::new();
    for &(alo, ahi) in a {
        let mut lo = alo;
        for &(blo, bhi) in b {
            if bhi < lo || blo > ahi {
                continue;
            }
            if blo > lo {
                out.push((lo, blo - 1));
            }
            lo = lo.max(bhi.saturating_add(1));
            if lo > ahi {
                break;
            }
        }
        if lo <= ahi {
            out.push((lo, ahi));
        }
    }
    out
}

fn count_runs(set: &[Run]) -> u128 {
    set.iter()
        .map(|&(lo, hi)| (hi as i128 - lo) as u128 + 1)
        .sum()
}

/// The exact quadratic `q(s1) = 3 s1^2 + B s1 + W` giving the squared
/// length of `s1 + s2 beta + s3 (a beta^2)`.
struct BallQuad {
    b: BigRational,
    w: BigRational,
}

struct PairContext {
    p1: BigRational,
    p2: BigRational,
    p3: BigRational,
    p4: BigRational,
    a: BigRational,
}

impl PairContext {
    fn new(poly: &CubicPoly) -> PairContext {
        let [_, p1, p2, p3, p4] = power_sums(poly);
        PairContext {
            p1,
            p2,
            p3,
            p4,
            a: BigRational::from_integer(poly.a.clone()),
        }
    }

    fn ball_quad(&self, s2: i128, s3: i128) -> BallQuad {
        let s2 = BigRational::from_integer(s2.into());
        let s3 = BigRational::from_integer(s3.into());
        let tr_k = &s2 * &self.p1 + &s3 * &self.a * &self.p2;
        let two = BigRational::from_integer(2.into());
        let w = &s2 * &s2 * &self.p2
            + &two * &s2 * &s3 * &self.a * &self.p3
            + &s3 * &s3 * &self.a * &self.a * &self.p4;
        BallQuad { b: &two * &tr_k, w }
    }
}

impl BallQuad {
    fn value_at(&self, s1: i128) -> BigRational {
        let s = BigRational::from_integer(s1.into());
        BigRational::from_integer(3.into()) * &s * &s + &self.b * &s + &self.w
    }

    /// All integers `s1` with `q(s1) < threshold`, as one run (the
    /// quadratic is convex). Endpoints are located by a directed
    /// rational square root and then trimmed with exact evaluations.
    fn run_below(&self, threshold: &BigRational) -> Option<Run> {
        let twelve = BigRational::from_integer(12.into());
        let disc = &self.b * &self.b - &twelve * (&self.w - threshold);
        if !disc.is_positive() {
            return None;
        }
        let sd = sqrt_ratio_upper(&disc);
        let six = BigRational::from_integer(6.into());
        let mut lo = to_clamped(&ceil_int(&((-&self.b - &sd) / &six)));
        let mut hi = to_clamped(&floor_int(&((-&self.b + &sd) / &six)));
        while lo <= hi && self.value_at(lo) >= *threshold {
            lo += 1;
        }
        while lo <= hi && self.value_at(hi) >= *threshold {
            hi -= 1;
        }
        mk_run(lo, hi)
    }
}

/// The exact positive definite form `F(s2, s3)` equal to the minimum of
/// `q(s1)` over real `s1`; pairs outside `{F < T}` have no `s1` at all.
struct PairEllipse {
    alpha: BigRational,
    beta: BigRational,
    det: BigRational,
}

impl PairEllipse {
    fn new(poly: &CubicPoly) -> Result<PairEllipse, CubicError> {
        let [_, p1, p2, p3, p4] = power_sums(poly);
        let a = BigRational::from_integer(poly.a.clone());
        let three = BigRational::from_integer(3.into());
        let alpha = &p2 - &p1 * &p1 / &three;
        let beta = &a * (&p3 - &p1 * &p2 / &three);
        let gamma = &a * &a * (&p4 - &p2 * &p2 / &three);
        let det = &alpha * &gamma - &beta * &beta;
        if !alpha.is_positive() || !det.is_positive() {
            return Err(CubicError::Degenerate(
                "coefficient-pair form is not positive definite (repeated roots?)".into(),
            ));
        }
        Ok(PairEllipse { alpha, beta, det })
    }

    fn s3_max(&self, threshold: &BigRational) -> i128 {
        let bound = threshold * &self.alpha / &self.det;
        if bound.is_negative() {
            return -1;
        }
        to_clamped(&floor_int(&sqrt_ratio_upper(&bound)))
    }

    fn s2_range(&self, s3: i128, threshold: &BigRational) -> Option<Run> {
        let s3r = BigRational::from_integer(s3.into());
        let rad = &self.alpha * threshold - &self.det * &s3r * &s3r;
        if rad.is_negative() {
            return None;
        }
        let half = sqrt_ratio_upper(&rad) / &self.alpha;
        let center = -&self.beta * &s3r / &self.alpha;
        mk_run(
            to_clamped(&ceil_int(&(&center - &half))),
            to_clamped(&floor_int(&(&center + &half))),
        )
    }
}

/// Strict slab `|s1 + t| < oc` along the `s1` axis for one embedding
/// coordinate, with `t` known only as an interval: `(certified,
/// possible)` runs.
fn slab_runs(t: &DyInterval, oc: &BigRational) -> (Option<Run>, Option<Run>) {
    let tlo = t.lo().to_ratio();
    let thi = t.hi().to_ratio();
    let cert = mk_run(
        to_clamped(&(floor_int(&(-oc - &tlo)) + 1)),
        to_clamped(&(ceil_int(&(oc - &thi)) - 1)),
    );
    let loose = mk_run(
        to_clamped(&(floor_int(&(-oc - &thi)) + 1)),
        to_clamped(&(ceil_int(&(oc - &tlo)) - 1)),
    );
    (cert, loose)
}

/// Tri-state membership of a single coordinate vector in the census
/// set, for spot checks and for re-examining boundary candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemberStatus {
    In,
    Out,
    Ambiguous,
}

pub fn member_status(lat: &CubicLattice, c: &BigRational, coords: &[BigInt; 3]) -> MemberStatus {
    let (d2lo, d2hi) = radius_sq_range(lat.poly(), c, lat.bits());
    member_status_with(lat, c, coords, &d2lo, &d2hi)
}

fn member_status_with(
    lat: &CubicLattice,
    c: &BigRational,
    coords: &[BigInt; 3],
    d2lo: &BigRational,
    d2hi: &BigRational,
) -> MemberStatus {
    let q = trace_of_square(lat.poly(), coords);
    if q >= *d2hi {
        return MemberStatus::Out;
    }
    let ball_in = q < *d2lo;

    let oc = c.recip();
    let emb = lat.embed(coords);
    let mut any_in = false;
    let mut all_out = true;
    for g in &emb {
        let lo = g.lo().to_ratio();
        let hi = g.hi().to_ratio();
        if hi < oc && lo > -&oc {
            any_in = true;
            all_out = false;
        } else if lo >= oc || hi <= -&oc {
            // certainly outside this slab
        } else {
            all_out = false;
        }
    }
    if all_out {
        MemberStatus::Out
    } else if ball_in && any_in {
        MemberStatus::In
    } else {
        MemberStatus::Ambiguous
    }
}

/// Census counts; `certified` and `ambiguous` are full counts (both
/// signs of each vector).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusCounts {
    pub certified: u64,
    pub ambiguous: u64,
    pub pairs_visited: u64,
}

/// Counts the census set by walking coefficient pairs; one
/// representative per `{g, -g}` is enumerated and the result doubled.
pub fn count_census(
    lat: &CubicLattice,
    c: &BigRational,
    params: &CensusParams,
) -> Result<CensusCounts, CubicError> {
    let poly = lat.poly();
    let (d2lo, d2hi) = radius_sq_range(poly, c, lat.bits());
    let one_plus = BigRational::one() + &params.slack;
    let loose_t = &d2hi * &one_plus * &one_plus;

    let ellipse = PairEllipse::new(poly)?;
    let ctx = PairContext::new(poly);
    let oc = c.recip();
    let a = &poly.a;
    let roots = lat.roots();
    let rootsq: [DyInterval; 3] =
        std::array::from_fn(|i| roots[i].square().round(lat.bits() + 8));

    let mut certified: u128 = 0;
    let mut ambiguous: u128 = 0;
    let mut visited: u64 = 0;

    let budget_error = |visited: u64, certified: u128| CubicError::CensusBudgetExceeded {
        pairs_done: visited,
        count_so_far: u64::try_from(certified.saturating_mul(2)).unwrap_or(u64::MAX),
    };

    let s3_top = ellipse.s3_max(&loose_t);
    for s3 in 0..=s3_top {
        let Some((row_lo, row_hi)) = ellipse.s2_range(s3, &loose_t) else {
            continue;
        };
        let row_lo = if s3 == 0 { row_lo.max(0) } else { row_lo };
        for s2 in row_lo..=row_hi {
            if visited >= params.pair_budget {
                return Err(budget_error(visited, certified));
            }
            visited += 1;

            let quad = ctx.ball_quad(s2, s3);
            let Some(loose_ball) = quad.run_below(&loose_t) else {
                continue;
            };
            let cert_ball = quad.run_below(&d2lo);

            let s2_big = BigInt::from(s2);
            let as3_big = a * BigInt::from(s3);
            let t: [DyInterval; 3] = std::array::from_fn(|i| {
                roots[i]
                    .scale_int(&s2_big)
                    .add(&rootsq[i].scale_int(&as3_big))
            });

            let mut cert_slabs = Vec::with_capacity(3);
            let mut loose_slabs = Vec::with_capacity(3);
            for ti in &t {
                let (cert, loose) = slab_runs(ti, &oc);
                cert_slabs.extend(cert);
                loose_slabs.extend(loose);
            }

            let mut cert_set = match cert_ball {
                Some(run) => intersect_with(&union_runs(cert_slabs), run),
                None => Vec::new(),
            };
            let mut loose_set = intersect_with(&union_runs(loose_slabs), loose_ball);
            if s3 == 0 && s2 == 0 {
                cert_set = intersect_with(&cert_set, (1, RUN_CLAMP));
                loose_set = intersect_with(&loose_set, (1, RUN_CLAMP));
            }

            certified += count_runs(&cert_set);
            let boundary = subtract_runs(&loose_set, &cert_set);
            let boundary_count = count_runs(&boundary);
            if boundary_count == 0 {
                continue;
            }
            if boundary_count > POINT_FALLBACK_CAP {
                ambiguous += boundary_count;
                continue;
            }
            for &(lo, hi) in &boundary {
                for s1 in lo..=hi {
                    let coords = [BigInt::from(s1), s2_big.clone(), BigInt::from(s3)];
                    match member_status_with(lat, c, &coords, &d2lo, &d2hi) {
                        MemberStatus::In => certified += 1,
                        MemberStatus::Out => {}
                        MemberStatus::Ambiguous => ambiguous += 1,
                    }
                }
            }
        }
    }

    Ok(CensusCounts {
        certified: u64::try_from(certified.saturating_mul(2)).unwrap_or(u64::MAX),
        ambiguous: u64::try_from(ambiguous.saturating_mul(2)).unwrap_or(u64::MAX),
        pairs_visited: visited,
    })
}

/// Result of scanning the closed cube `|g_i| <= 1/C` intersected with
/// the open ball of squared radius `3/C^2` for nonzero lattice points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CuboidScan {
    Empty,
    Occupied([BigInt; 3]),
    Undecided,
}

/// Exhaustive scan: the sphere side is exact (rational trace against a
/// rational bound); the cube faces use intervals, which collapse to
/// exact values for the only vectors that can touch a face.
pub fn cuboid_scan(lat: &CubicLattice, c: &BigRational) -> Result<CuboidScan, CubicError> {
    let poly = lat.poly();
    let oc = c.recip();
    let bound = BigRational::from_integer(3.into()) / (c * c);
    let ellipse = PairEllipse::new(poly)?;
    let ctx = PairContext::new(poly);
    let mut undecided = false;

    let s3_top = ellipse.s3_max(&bound);
    for s3 in 0..=s3_top {
        let Some((row_lo, row_hi)) = ellipse.s2_range(s3, &bound) else {
            continue;
        };
        let row_lo = if s3 == 0 { row_lo.max(0) } else { row_lo };
        for s2 in row_lo..=row_hi {
            let quad = ctx.ball_quad(s2, s3);
            let Some((mut lo, hi)) = quad.run_below(&bound) else {
                continue;
            };
            if s3 == 0 && s2 == 0 {
                lo = lo.max(1);
            }
            for s1 in lo..=hi {
                let coords = [BigInt::from(s1), BigInt::from(s2), BigInt::from(s3)];
                let emb = lat.embed(&coords);
                let mut all_in = true;
                let mut any_out = false;
                let mut local_ambiguous = false;
                for g in &emb {
                    let glo = g.lo().to_ratio();
                    let ghi = g.hi().to_ratio();
                    if ghi <= oc && glo >= -&oc {
                        // inside this pair of closed faces
                    } else if glo > oc || ghi < -&oc {
                        any_out = true;
                        all_in = false;
                    } else {
                        all_in = false;
                        local_ambiguous = true;
                    }
                }
                if all_in {
                    return Ok(CuboidScan::Occupied(coords));
                }
                if !any_out && local_ambiguous {
                    undecided = true;
                }
            }
        }
    }
    if undecided {
        Ok(CuboidScan::Undecided)
    } else {
        Ok(CuboidScan::Empty)
    }
}

/// The four hypotheses that together guarantee the census lower bound.
/// `one_primitive` is `Some(true)` when verified through primality of
/// the leading coefficient and `None` (unverified) otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conditions {
    pub one_primitive: Option<bool>,
    pub s1_empty: bool,
    pub b1_short: bool,
    pub covol_at_least_10: bool,
}

impl Conditions {
    pub fn all_pass(&self) -> bool {
        self.one_primitive == Some(true) && self.s1_empty && self.b1_short && self.covol_at_least_10
    }
}

/// Evaluates the four hypotheses at the lattice's precision; `None`
/// means the cuboid scan was ambiguous and needs more precision.
pub fn evaluate_conditions(
    lat: &CubicLattice,
    c: &BigRational,
) -> Result<Option<Conditions>, CubicError> {
    let poly = lat.poly();
    let a = &poly.a;
    let one_primitive = match a.to_biguint() {
        Some(n) if is_probable_prime(&n) => Some(true),
        _ => None,
    };

    let s1_empty = match cuboid_scan(lat, c)? {
        CuboidScan::Empty => true,
        CuboidScan::Occupied(_) => false,
        CuboidScan::Undecided => return Ok(None),
    };

    // ||b1||^2 < 3/C^2, both sides exact rationals.
    let b1_sq = trace_of_square(poly, &lat.coords()[0]);
    let b1_short = b1_sq < BigRational::from_integer(3.into()) / (c * c);

    // covol = sqrt(disc)/a >= 10 iff disc >= 100 a^2, exact integers.
    let covol_at_least_10 = poly.disc() >= BigInt::from(100) * a * a;

    Ok(Some(Conditions {
        one_primitive,
        s1_empty,
        b1_short,
        covol_at_least_10,
    }))
}

/// Machine-readable census result.
#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub disc: String,
    pub covol: String,
    pub g_count: u64,
    pub ambiguous: u64,
    pub lower_bound: String,
    pub conditions: Conditions,
    #[serde(skip)]
    pub pairs_visited: u64,
    #[serde(skip)]
    pub disc_int: BigInt,
    #[serde(skip)]
    pub a_int: BigInt,
    #[serde(skip)]
    pub c: BigRational,
}

impl CensusReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("census report serializes")
    }

    /// `g_count >= (2/3) C^2 covol`, compared exactly: with `C = p/q`,
    /// squaring `3 g q^2 a >= 2 p^2 sqrt(disc)` gives an integer test.
    pub fn bound_holds(&self) -> bool {
        let p = self.c.numer();
        let q = self.c.denom();
        let lhs = BigInt::from(3) * BigInt::from(self.g_count) * q * q * &self.a_int;
        BigInt::from(4) * p.pow(4) * &self.disc_int <= &lhs * &lhs
    }
}

/// `sqrt(disc)/a > ratio * disc^(1/4)`, exactly: fourth powers give
/// `q^4 disc > p^4 a^4` for `ratio = p/q`.
pub fn covol_exceeds_root4(disc: &BigInt, a: &BigInt, ratio: &BigRational) -> bool {
    assert!(disc.is_positive() && a.is_positive());
    let p = ratio.numer();
    let q = ratio.denom();
    q.pow(4) * disc > p.pow(4) * a.pow(4)
}

/// `(2/3) C^2 sqrt(disc)/a >= threshold`, exactly via squaring.
pub fn lower_bound_at_least(
    disc: &BigInt,
    a: &BigInt,
    c: &BigRational,
    threshold: &BigRational,
) -> bool {
    assert!(disc.is_positive() && a.is_positive());
    let p = c.numer();
    let q = c.denom();
    let tn = threshold.numer();
    let td = threshold.denom();
    BigInt::from(4) * p.pow(4) * td * td * disc >= BigInt::from(9) * q.pow(4) * tn * tn * a * a
}

/// Positive rational rendered with a fixed number of fractional digits.
pub fn decimal_plain(r: &BigRational, frac_digits: u32) -> String {
    let neg = r.is_negative();
    let abs = r.abs();
    let scale = BigInt::from(10u32).pow(frac_digits);
    let scaled = floor_int(&(&abs * BigRational::from_integer(scale.clone())));
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    let sign = if neg { "-" } else { "" };
    if frac_digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{frac:0>width$}",
            frac = frac_part,
            width = frac_digits as usize
        )
    }
}

/// Scientific notation with the requested significant digits, for
/// magnitudes far from 1.
pub fn sci_string(r: &BigRational, sig: u32) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let abs = r.abs();
    // Decimal exponent: largest e with 10^e <= abs.
    let mut e: i64 = ((abs.numer().bits() as i64 - abs.denom().bits() as i64) as f64 * 0.30103)
        .floor() as i64;
    let pow10 = |k: i64| -> BigRational {
        let p = BigInt::from(10u32).pow(k.unsigned_abs() as u32);
        if k >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::one(), p)
        }
    };
    while abs < pow10(e) {
        e -= 1;
    }
    while abs >= pow10(e + 1) {
        e += 1;
    }
    let mantissa = &abs * pow10(-(e - (sig as i64 - 1)));
    let digits = floor_int(&mantissa).to_string();
    let (head, tail) = digits.split_at(1);
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

/// Embedded reduced basis and certified covolume, for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeSummary {
    pub basis: [[String; 3]; 3],
    pub covol: String,
    pub margin: String,
}

pub fn lattice_summary(lat: &CubicLattice) -> LatticeSummary {
    let basis = std::array::from_fn(|i| {
        let v = lat.basis_vector(i);
        std::array::from_fn(|j| sci_string(&v[j].mid(), 18))
    });
    let margin = lat
        .roots()
        .iter()
        .map(|r| r.width().to_ratio())
        .max()
        .expect("three roots");
    LatticeSummary {
        basis,
        covol: decimal_plain(&lat.covol().mid(), 6),
        margin: sci_string(&margin, 3),
    }
}

/// Full pipeline: build the lattice, scan the cuboid, count the census,
/// escalating root precision until nothing is ambiguous (or the cap is
/// reached, in which case residual ambiguity is reported honestly).
pub fn run_census(seed: &CubicSeed, params: &CensusParams) -> Result<CensusReport, CubicError> {
    let poly = &seed.poly;
    let mut bits = seed.precision_bits.max(8);
    loop {
        let lat = build_lattice(poly, bits)?;
        let conditions = evaluate_conditions(&lat, &seed.c)?;
        let counts = count_census(&lat, &seed.c, params)?;
        let settled = counts.ambiguous == 0 && conditions.is_some();
        if settled || bits >= MAX_PRECISION_BITS {
            let Some(conditions) = conditions else {
                return Err(CubicError::PrecisionInsufficient {
                    details: format!(
                        "cuboid scan still ambiguous at the {MAX_PRECISION_BITS}-bit cap"
                    ),
                });
            };
            let disc = poly.disc();
            let two_thirds_c_sq = BigRational::new(2.into(), 3.into()) * &seed.c * &seed.c;
            let lower = lat.covol().mid() * two_thirds_c_sq;
            return Ok(CensusReport {
                disc: disc.to_string(),
                covol: decimal_plain(&lat.covol().mid(), 6),
                g_count: counts.certified,
                ambiguous: counts.ambiguous,
                lower_bound: decimal_plain(&lower, 6),
                conditions,
                pairs_visited: counts.pairs_visited,
                disc_int: disc,
                a_int: poly.a.clone(),
                c: seed.c.clone(),
            });
        }
        bits = (bits * 2).min(MAX_PRECISION_BITS);
    }
}

/// Builds the lattice and evaluates the hypotheses with precision
/// escalation, without running the census walk.
pub fn check_lattice(seed: &CubicSeed) -> Result<(LatticeSummary, Conditions), CubicError> {
    let mut bits = seed.precision_bits.max(8);
    loop {
        let lat = build_lattice(&seed.poly, bits)?;
        if let Some(conditions) = evaluate_conditions(&lat, &seed.c)? {
            return Ok((lattice_summary(&lat), conditions));
        }
        if bits >= MAX_PRECISION_BITS {
            return Err(CubicError::PrecisionInsufficient {
                details: format!("cuboid scan still ambiguous at the {MAX_PRECISION_BITS}-bit cap"),
            });
        }
        bits = (bits * 2).min(MAX_PRECISION_BITS);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(a: i64, b: i64, c: i64, d: i64) -> CubicPoly {
        CubicPoly::new(a.into(), b.into(), c.into(), d.into()).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn power_sums_of_split_cubic() {
        // X^3 - X has roots 0, 1, -1.
        let p = poly(1, 0, -1, 0);
        let [p0, p1, p2, p3, p4] = power_sums(&p);
        assert_eq!(p0, rat(3, 1));
        assert_eq!(p1, rat(0, 1));
        assert_eq!(p2, rat(2, 1));
        assert_eq!(p3, rat(0, 1));
        assert_eq!(p4, rat(2, 1));
    }

    #[test]
    fn trace_of_square_matches_direct_sum() {
        // Roots 0, 1, -1; coords (1,2,3) over {1, beta, beta^2} embed to
        // 1, 6, 2 with squared sum 41.
        let p = poly(1, 0, -1, 0);
        let t = trace_of_square(&p, &[1.into(), 2.into(), 3.into()]);
        assert_eq!(t, rat(41, 1));
    }

    #[test]
    fn ball_run_is_exact() {
        let p = poly(1, 0, -1, 0);
        let ctx = PairContext::new(&p);
        let quad = ctx.ball_quad(0, 0);
        // 3 s^2 < 10: s in {-1, 0, 1}.
        assert_eq!(quad.run_below(&rat(10, 1)), Some((-1, 1)));
        // 3 s^2 < 3: s = 0 only (strict).
        assert_eq!(quad.run_below(&rat(3, 1)), Some((0, 0)));
        assert_eq!(quad.run_below(&rat(0, 1)), None);
    }

    #[test]
    fn run_set_operations() {
        let u = union_runs(vec![(5, 7), (1, 3), (4, 4)]);
        assert_eq!(u, vec![(1, 7)]);
        let s = subtract_runs(&[(1, 10)], &[(3, 4), (7, 7)]);
        assert_eq!(s, vec![(1, 2), (5, 6), (8, 10)]);
        assert_eq!(count_runs(&s), 7);
    }

    #[test]
    fn sqrt_upper_bound_is_upper() {
        let r = rat(2, 1);
        let s = sqrt_ratio_upper(&r);
        assert!(&s * &s >= r);
        let exact = rat(9, 4);
        let s2 = sqrt_ratio_upper(&exact);
        assert!(&s2 * &s2 >= exact);
        assert!(s2 <= rat(3, 2) + rat(1, 4));
    }

    #[test]
    fn unit_vector_is_excluded_member_test() {
        // All three embeddings of 1 are exactly 1, which fails the
        // strict slab |g_i| < 1 at C = 1.
        let p = poly(7, -2, -5, 1);
        let lat = build_lattice(&p, 96).unwrap();
        let one = rat(1, 1);
        assert_eq!(
            member_status(&lat, &one, &[1.into(), 0.into(), 0.into()]),
            MemberStatus::Out
        );
        // beta itself has all embeddings inside (-1, 1) and short
        // length, so it belongs.
        assert_eq!(
            member_status(&lat, &one, &[0.into(), 1.into(), 0.into()]),
            MemberStatus::In
        );
    }

    #[test]
    fn census_counts_small_lattice() {
        let p = poly(7, -2, -5, 1);
        let lat = build_lattice(&p, 96).unwrap();
        let counts = count_census(&lat, &rat(1, 1), &CensusParams::default()).unwrap();
        assert!(counts.certified >= 2, "beta and -beta at least");
        assert_eq!(counts.certified % 2, 0);
        assert_eq!(counts.ambiguous, 0);
        assert!(counts.pairs_visited > 0);
    }

    #[test]
    fn slack_does_not_change_counts() {
        let p = poly(7, -2, -5, 1);
        let lat = build_lattice(&p, 96).unwrap();
        let base = count_census(&lat, &rat(1, 1), &CensusParams::default()).unwrap();
        let slacked = count_census(
            &lat,
            &rat(1, 1),
            &CensusParams::default().with_slack(rat(1, 2)),
        )
        .unwrap();
        assert_eq!(base.certified, slacked.certified);
        assert_eq!(base.ambiguous, slacked.ambiguous);
        assert!(slacked.pairs_visited >= base.pairs_visited);
    }

    #[test]
    fn cuboid_scan_finds_occupant() {
        // beta lies in the closed unit cube with length below sqrt(3),
        // so the cuboid is occupied at C = 1.
        let p = poly(7, -2, -5, 1);
        let lat = build_lattice(&p, 96).unwrap();
        match cuboid_scan(&lat, &rat(1, 1)).unwrap() {
            CuboidScan::Occupied(w) => {
                let q = trace_of_square(&p, &w);
                assert!(q < rat(3, 1));
            }
            other => panic!("expected occupied cuboid, got {other:?}"),
        }
    }

    #[test]
    fn conditions_on_small_lattice() {
        let p = poly(7, -2, -5, 1);
        let lat = build_lattice(&p, 96).unwrap();
        let conds = evaluate_conditions(&lat, &rat(1, 1)).unwrap().unwrap();
        assert_eq!(conds.one_primitive, Some(true));
        assert!(!conds.s1_empty);
        assert!(conds.b1_short);
        // disc = 3569 < 100 * 49.
        assert!(!conds.covol_at_least_10);
        assert!(!conds.all_pass());
    }

    #[test]
    fn budget_stops_with_partial_count() {
        let p = poly(7, -2, -5, 1);
        let lat = build_lattice(&p, 96).unwrap();
        let err = count_census(&lat, &rat(1, 1), &CensusParams::default().with_budget(1))
            .unwrap_err();
        match err {
            CubicError::CensusBudgetExceeded { pairs_done, .. } => assert_eq!(pairs_done, 1),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn exact_bound_arithmetic() {
        let disc = BigInt::from(10_000);
        let a = BigInt::one();
        // covol = 100 > 1.6 * 10 = 16.
        assert!(covol_exceeds_root4(&disc, &a, &rat(8, 5)));
        // (2/3) * 100 = 66.66... >= 66 but not >= 67.
        assert!(lower_bound_at_least(&disc, &a, &rat(1, 1), &rat(66, 1)));
        assert!(!lower_bound_at_least(&disc, &a, &rat(1, 1), &rat(67, 1)));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_plain(&rat(22, 7), 4), "3.1428");
        assert_eq!(decimal_plain(&rat(-22, 7), 2), "-3.14");
        assert_eq!(decimal_plain(&rat(5, 1), 0), "5");
        assert_eq!(sci_string(&rat(12345, 1), 3), "1.23e4");
        assert_eq!(sci_string(&rat(1, 1024), 2), "9.7e-4");
        assert_eq!(sci_string(&rat(0, 1), 5), "0");
    }

    #[test]
    fn full_census_report_roundtrip() {
        let seed = CubicSeed::new(poly(7, -2, -5, 1), rat(1, 1), 96).unwrap();
        let report = run_census(&seed, &CensusParams::default()).unwrap();
        assert_eq!(report.disc, "3569");
        assert_eq!(report.ambiguous, 0);
        assert!(report.g_count >= 2);
        let json = report.to_json();
        assert!(json.get("pairs_visited").is_none(), "internal field leaked");
        assert_eq!(json["disc"], "3569");
        assert_eq!(json["conditions"]["one_primitive"], true);
    }
}
