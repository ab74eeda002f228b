//! The reduction test: decides whether a fractional ideal is reduced with
//! respect to a tolerance `C >= 1` in time polynomial in the input size.
//!
//! After cheap membership, size and primitivity gates, the verdict is
//! decided entirely by short vectors. Writing `g1, g2` for the two real
//! embeddings of a lattice element `g`, the relevant sets are
//!
//! * the exclusion square `S1`: `|g1| <= 1/C`, `|g2| <= 1/C`,
//!   `g1^2 + g2^2 < 2/C^2` - any nonzero member kills reducedness;
//! * the constraint set `G`: `(g1^2 - 1/C^2)(g2^2 - 1/C^2) < 0` together
//!   with a covolume-scaled length cutoff. Each `g` in `G` bounds the
//!   feasible metric parameter `alpha^4` from below (class `G1`, small
//!   first embedding) or above (class `G2`) through the quantity
//!   `B4(g) = -(C^2 g1^2 - 1)/(C^2 g2^2 - 1)`.
//!
//! The ideal is reduced exactly when the constraint interval
//! `[Bmin4, Bmax4]` is nonempty, and the extremal constraints always come
//! from at most eight specific short vectors, which is what keeps the
//! test polynomial.
//!
//! The length cutoff uses the rational over-approximation
//! `33/20 * C^2 * covol^2` of the exact transcendental bound
//! `(16/pi^2) C^2 covol^2` (`16/pi^2 = 1.6211... <= 33/20`). Enlarging
//! `G` this way is safe: a vector beyond the exact cutoff lies outside
//! the critical ellipse of every feasible metric, so its constraint is
//! implied and neither interval endpoint that decides the verdict moves.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ideal::{is_primitive_one, norm_bound_check, FracIdeal, IdealError};
use crate::lattice::{embed_and_reduce, norm_sq, EmbeddedBasis, LatticeError, DEFAULT_ENUM_BUDGET};
use crate::qfield::QuadNum;

/// Numerator/denominator of the rational factor replacing `16/pi^2` in
/// the squared length cutoff of `G`.
pub const RADIUS_SQ_FACTOR: (i64, i64) = (33, 20);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TestError {
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("cannot determine branch for shortest vector: {details}")]
    BranchUndetermined { details: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Test configuration: exact tolerance `C >= 1` plus knobs that never
/// affect exactness (referee radius slack, enumeration work cap).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    c: BigRational,
    enum_radius_slack: BigRational,
    enum_budget: u64,
}

impl Config {
    pub fn new(c: BigRational) -> Result<Self, TestError> {
        if c < BigRational::one() {
            return Err(TestError::Config(format!("C = {c} must be >= 1")));
        }
        Ok(Config {
            c,
            enum_radius_slack: BigRational::one(),
            enum_budget: DEFAULT_ENUM_BUDGET,
        })
    }

    pub fn with_slack(mut self, slack: BigRational) -> Result<Self, TestError> {
        if slack < BigRational::one() {
            return Err(TestError::Config(format!("slack = {slack} must be >= 1")));
        }
        self.enum_radius_slack = slack;
        Ok(self)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.enum_budget = budget;
        self
    }

    pub fn c(&self) -> &BigRational {
        &self.c
    }

    pub fn c_sq(&self) -> BigRational {
        &self.c * &self.c
    }

    pub fn enum_radius_slack(&self) -> &BigRational {
        &self.enum_radius_slack
    }

    pub fn enum_budget(&self) -> u64 {
        self.enum_budget
    }

    /// Lower end of the a-priori feasible range for `alpha^4`: `1/(16C^2)`.
    pub fn alpha4_lo(&self) -> BigRational {
        (BigRational::from_integer(16.into()) * self.c_sq()).recip()
    }

    /// Upper end of the a-priori feasible range for `alpha^4`: `16C^2`.
    pub fn alpha4_hi(&self) -> BigRational {
        BigRational::from_integer(16.into()) * self.c_sq()
    }

    /// Squared length cutoff of `G` for squared covolume `covol_sq`.
    pub fn radius_sq(&self, covol_sq: &BigRational) -> BigRational {
        let factor = BigRational::new(RADIUS_SQ_FACTOR.0.into(), RADIUS_SQ_FACTOR.1.into());
        factor * self.c_sq() * covol_sq
    }
}

/// Where the decision fell. Ordered by pipeline position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Stage {
    /// 1 is not a member of the ideal.
    ContainsOne,
    /// `N(I)^-1 <= C^2 sqrt(Delta)` failed.
    NormBound,
    /// Some `1/k`, `k >= 2`, is a member.
    Primitivity,
    /// A nonzero vector occupies the exclusion square.
    S1Occupied,
    /// The shortest vector already has squared length `>= 2/C^2`.
    EarlyShortest,
    /// Decided by the feasibility interval of candidate constraints.
    BminBmax,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::ContainsOne => "ContainsOne",
            Stage::NormBound => "NormBound",
            Stage::Primitivity => "Primitivity",
            Stage::S1Occupied => "S1Occupied",
            Stage::EarlyShortest => "EarlyShortest",
            Stage::BminBmax => "BminBmax",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CandidateClass {
    G1,
    G2,
    NotInG,
}

/// A candidate short vector with its constraint data. A degenerate
/// boundary value (`C^2 g_i^2 = 1` exactly) makes the sign product zero,
/// so the vector is classified `NotInG` and no division ever degenerates.
#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub s1: i64,
    pub s2: i64,
    #[serde(skip)]
    pub g: QuadNum,
    pub class: CandidateClass,
    #[serde(rename = "B4")]
    pub b4: Option<QuadNum>,
}

fn serialize_opt_ratio<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_some(&ratio_string(q)),
        None => s.serialize_none(),
    }
}

/// Full outcome of the reduction test.
///
/// `bmin4`/`bmax4` are the exact fourth-power interval endpoints (their
/// a-priori defaults when the decision never reached the interval stage)
/// and `witness_alpha4` is a rational feasible `alpha^4` when reduced.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub reduced: bool,
    pub stage: Stage,
    pub bmin4: QuadNum,
    pub bmax4: QuadNum,
    #[serde(serialize_with = "serialize_opt_ratio")]
    pub witness_alpha4: Option<BigRational>,
    pub candidates: Vec<Candidate>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

/// `"num/den"` form used for rationals crossing the CLI boundary.
pub fn ratio_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"num/den"` (or a bare integer) into an exact rational.
pub fn parse_ratio(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

fn qmax(a: QuadNum, b: QuadNum) -> QuadNum {
    if (&b - &a).signum() > 0 {
        b
    } else {
        a
    }
}

fn qmin(a: QuadNum, b: QuadNum) -> QuadNum {
    if (&b - &a).signum() < 0 {
        b
    } else {
        a
    }
}

/// Is the embedding of `g` inside the exclusion square? Box inequalities
/// are non-strict, the circle inequality is strict.
fn in_s1(g: &QuadNum, c: &BigRational) -> bool {
    let inv_c_sq = (c * c).recip();
    let lim = g.rational_in_field(&inv_c_sq);
    let c1 = (&g.square() - &lim).signum() <= 0;
    let c2 = (&g.conj().square() - &lim).signum() <= 0;
    let two = BigRational::from_integer(2.into());
    c1 && c2 && norm_sq(g) < two * inv_c_sq
}

/// Checks the exclusion square over the seven coefficient pairs that can
/// reach it: `(s1, 0)` for `s1` in `{1, 2}` and `(s1, 1)` for `|s1| <= 2`.
/// Returns the first occupant in ascending `(s2, s1)` order.
pub fn s1_contains_nonzero(basis: &EmbeddedBasis, c: &BigRational) -> Option<(i64, i64, QuadNum)> {
    let pairs: [(i64, i64); 7] = [(1, 0), (2, 0), (-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1)];
    for (s1, s2) in pairs {
        let g = basis.vector(s1, s2);
        if in_s1(&g, c) {
            return Some((s1, s2, g));
        }
    }
    None
}

/// Classifies a vector against `G` and computes its constraint value.
pub fn classify(
    s1: i64,
    s2: i64,
    g: QuadNum,
    config: &Config,
    covol_sq: &BigRational,
) -> Candidate {
    let c_sq = config.c_sq();
    let one = g.rational_in_field(&BigRational::one());
    let f1 = &g.square().scale(&c_sq) - &one;
    let f2 = &g.conj().square().scale(&c_sq) - &one;
    let sign1 = f1.signum();
    let sign2 = f2.signum();
    let in_radius = norm_sq(&g) < config.radius_sq(covol_sq);
    let class = if sign1 * sign2 < 0 && in_radius {
        if sign1 < 0 {
            CandidateClass::G1
        } else {
            CandidateClass::G2
        }
    } else {
        CandidateClass::NotInG
    };
    let b4 = match class {
        CandidateClass::NotInG => None,
        _ => Some((-f1) * f2.inv()),
    };
    Candidate { s1, s2, g, class, b4 }
}

/// Builds the candidate set `G3`: the shortest vector `b1`, the combs
/// `s1*b1 + b2` for `|s1| <= 2`, and the one or two integer translates
/// `t*b1 + b2` that can push the branch embedding inside `(-1/C, 1/C)`.
///
/// The branch is which embedding of `b1` is strictly below `1/C` in
/// absolute value. Once the exclusion square is known empty and
/// `||b1||^2 < 2/C^2`, exactly one embedding qualifies; the impossible
/// boundary cases are reported rather than guessed.
pub fn build_g3(basis: &EmbeddedBasis, config: &Config) -> Result<Vec<(i64, i64)>, TestError> {
    let c_sq = config.c_sq();
    let b1 = basis.b1();
    let one = b1.rational_in_field(&BigRational::one());
    let small1 = (&b1.square().scale(&c_sq) - &one).signum() < 0;
    let small2 = (&b1.conj().square().scale(&c_sq) - &one).signum() < 0;
    if small1 == small2 {
        return Err(TestError::BranchUndetermined {
            details: format!(
                "embeddings of b1 = {} are on the same side of 1/C (small1={small1}, small2={small2})",
                b1
            ),
        });
    }
    // Constrain the embedding that is still large: j = 2 when the first
    // embedding is the small one, j = 1 otherwise.
    let (b1j, b2j) = if small1 {
        (b1.conj(), basis.b2().conj())
    } else {
        (b1.clone(), basis.b2().clone())
    };
    let inv_c = config.c().recip();
    let plus = &(&b1j.rational_in_field(&inv_c) - &b2j) * &b1j.inv();
    let minus = &(&b1j.rational_in_field(&(-&inv_c)) - &b2j) * &b1j.inv();
    let (lo, hi) = if (&plus - &minus).signum() >= 0 {
        (minus, plus)
    } else {
        (plus, minus)
    };
    let t1 = lo.ceil();
    let t2 = hi.floor();

    let mut pairs: Vec<(i64, i64)> = vec![(1, 0)];
    for s1 in -2i64..=2 {
        pairs.push((s1, 1));
    }
    if t1 <= t2 {
        for t in [&t1, &t2] {
            let t = i64::try_from(t).expect("translate coefficient fits i64");
            if !pairs.contains(&(t, 1)) {
                pairs.push((t, 1));
            }
        }
    }
    pairs.sort();
    Ok(pairs)
}

/// Interval endpoints over classified candidates, with a-priori defaults
/// for empty classes.
pub fn bmin_bmax(candidates: &[Candidate], config: &Config) -> (QuadNum, QuadNum) {
    let template = &candidates
        .first()
        .expect("candidate list nonempty")
        .g;
    let mut bmin4 = template.rational_in_field(&config.alpha4_lo());
    let mut bmax4 = template.rational_in_field(&config.alpha4_hi());
    let mut seen_g1 = false;
    let mut seen_g2 = false;
    for cand in candidates {
        let Some(b4) = &cand.b4 else { continue };
        match cand.class {
            CandidateClass::G1 => {
                bmin4 = if seen_g1 { qmax(bmin4, b4.clone()) } else { b4.clone() };
                seen_g1 = true;
            }
            CandidateClass::G2 => {
                bmax4 = if seen_g2 { qmin(bmax4, b4.clone()) } else { b4.clone() };
                seen_g2 = true;
            }
            CandidateClass::NotInG => {}
        }
    }
    (bmin4, bmax4)
}

/// Picks a rational `alpha^4` witness in `[bmin4, bmax4]`, preferring the
/// intersection with the open a-priori range. Returns `None` (with a
/// note) only when the feasible set is a single irrational point.
fn pick_witness(
    bmin4: &QuadNum,
    bmax4: &QuadNum,
    config: &Config,
    notes: &mut Vec<String>,
) -> Option<BigRational> {
    let d_lo = bmin4.rational_in_field(&config.alpha4_lo());
    let d_hi = bmin4.rational_in_field(&config.alpha4_hi());
    let mut lo = qmax(bmin4.clone(), d_lo.clone());
    let mut hi = qmin(bmax4.clone(), d_hi.clone());
    if (&hi - &lo).signum() < 0 {
        notes.push("feasible interval lies outside the nominal alpha range".to_string());
        lo = bmin4.clone();
        hi = bmax4.clone();
    }
    let diff = (&hi - &lo).signum();
    if diff == 0 {
        return match lo.to_rational() {
            Some(q) => Some(q),
            None => {
                notes.push(format!(
                    "feasible alpha^4 is the single irrational value {lo}; no rational witness"
                ));
                None
            }
        };
    }
    // Fast path: rational endpoints give a rational midpoint.
    if let (Some(a), Some(b)) = (lo.to_rational(), hi.to_rational()) {
        return Some((a + b) / BigRational::from_integer(2.into()));
    }
    // Dyadic refinement of the midpoint until it lands inside.
    let two = BigRational::from_integer(2.into());
    let mid = (&lo + &hi).scale(&two.recip());
    let mut bits = 16u32;
    loop {
        let (mlo, mhi) = mid.bounds(bits);
        let w = (mlo + mhi) / &two;
        let wq = lo.rational_in_field(&w);
        if (&wq - &lo).signum() >= 0 && (&hi - &wq).signum() >= 0 {
            return Some(w);
        }
        bits *= 2;
        assert!(bits <= 1 << 20, "witness refinement did not converge");
    }
}

/// The full reduction test.
pub fn test_c_reduced(ideal: &FracIdeal, config: &Config) -> Result<Verdict, TestError> {
    test_c_reduced_filtered(ideal, config, false)
}

/// Variant exposing the optional range shortcut: when `b4_range_filter`
/// is set, candidates whose constraint value falls outside the open
/// a-priori range `(1/(16C^2), 16C^2)` are discarded before the interval
/// is formed. The default path keeps every constraint.
pub fn test_c_reduced_filtered(
    ideal: &FracIdeal,
    config: &Config,
    b4_range_filter: bool,
) -> Result<Verdict, TestError> {
    let mut notes = Vec::new();
    let template = ideal.field().one();
    let default_lo = template.rational_in_field(&config.alpha4_lo());
    let default_hi = template.rational_in_field(&config.alpha4_hi());
    let fail = |stage: Stage, notes: Vec<String>| Verdict {
        reduced: false,
        stage,
        bmin4: default_lo.clone(),
        bmax4: default_hi.clone(),
        witness_alpha4: None,
        candidates: Vec::new(),
        notes,
    };

    if !ideal.contains_one() {
        notes.push("1 is not a member of the ideal".to_string());
        return Ok(fail(Stage::ContainsOne, notes));
    }
    if !norm_bound_check(ideal, config.c()) {
        notes.push(format!(
            "inverse norm {} exceeds C^2 sqrt(Delta)",
            ratio_string(&ideal.norm().recip())
        ));
        return Ok(fail(Stage::NormBound, notes));
    }
    let (primitive, evidence) = is_primitive_one(ideal)?;
    if !primitive {
        notes.push(format!(
            "1 is not primitive: every coefficient of the inverse ideal is divisible by {}",
            evidence.gcd_all
        ));
        return Ok(fail(Stage::Primitivity, notes));
    }

    let basis = embed_and_reduce(ideal);
    if let Some((s1, s2, g)) = s1_contains_nonzero(&basis, config.c()) {
        notes.push(format!("exclusion square occupied by ({s1}, {s2}) = {g}"));
        return Ok(fail(Stage::S1Occupied, notes));
    }

    let two = BigRational::from_integer(2.into());
    let threshold = &two / &config.c_sq();
    if *basis.shortest_sq() >= threshold {
        notes.push("shortest vector has squared length >= 2/C^2".to_string());
        return Ok(Verdict {
            reduced: true,
            stage: Stage::EarlyShortest,
            bmin4: default_lo,
            bmax4: default_hi,
            witness_alpha4: Some(BigRational::one()),
            candidates: Vec::new(),
            notes,
        });
    }

    let covol_sq = basis.covol_sq();
    let pairs = build_g3(&basis, config)?;
    let mut candidates: Vec<Candidate> = pairs
        .into_iter()
        .map(|(s1, s2)| classify(s1, s2, basis.vector(s1, s2), config, &covol_sq))
        .collect();
    if b4_range_filter {
        let lo = template.rational_in_field(&config.alpha4_lo());
        let hi = template.rational_in_field(&config.alpha4_hi());
        for cand in candidates.iter_mut() {
            let Some(b4) = &cand.b4 else { continue };
            if (b4 - &lo).signum() <= 0 || (&hi - b4).signum() <= 0 {
                notes.push(format!(
                    "range shortcut dropped ({}, {}) with B4 = {}",
                    cand.s1, cand.s2, b4
                ));
                cand.class = CandidateClass::NotInG;
                cand.b4 = None;
            }
        }
    }
    let (bmin4, bmax4) = bmin_bmax(&candidates, config);
    let reduced = (&bmax4 - &bmin4).signum() >= 0;
    let witness_alpha4 = if reduced {
        pick_witness(&bmin4, &bmax4, config, &mut notes)
    } else {
        None
    };
    Ok(Verdict {
        reduced,
        stage: Stage::BminBmax,
        bmin4,
        bmax4,
        witness_alpha4,
        candidates,
        notes,
    })
}

/// Runs the test across an ascending tolerance grid and reports any
/// violation of monotonicity (reduced at a smaller `C` but not at a
/// larger one). Returns the per-`C` verdicts and the violating pairs.
pub fn monotonicity_check(
    ideal: &FracIdeal,
    cs: &[BigRational],
) -> Result<(Vec<(BigRational, bool)>, Vec<(BigRational, BigRational)>), TestError> {
    let mut results = Vec::new();
    for c in cs {
        let config = Config::new(c.clone())?;
        let verdict = test_c_reduced(ideal, &config)?;
        results.push((c.clone(), verdict.reduced));
    }
    let mut violations = Vec::new();
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let (ci, ri) = &results[i];
            let (cj, rj) = &results[j];
            if ci <= cj && *ri && !*rj {
                violations.push((ci.clone(), cj.clone()));
            }
        }
    }
    Ok((results, violations))
}
