//! End-to-end cross-checks: the polynomial-time test against the
//! brute-force oracle on generated instances, plus the structural
//! invariants that the candidate shortlist argument rests on.

use num::rational::BigRational;
use num::traits::One;

use qreduce::creduced::{test_c_reduced, Candidate, CandidateClass, Config, Stage, TestError};
use qreduce::fuzz::{gen_case, FuzzParams};
use qreduce::lattice::embed_and_reduce;
use qreduce::oracle::{oracle_test, validate_witness};

const CASES: u64 = 160;
const SEED: u64 = 20260825;

fn g_members(census: &[Candidate]) -> Vec<&Candidate> {
    census
        .iter()
        .filter(|c| c.class != CandidateClass::NotInG)
        .collect()
}

#[test]
fn fast_path_agrees_with_oracle_on_fuzz_cases() {
    let params = FuzzParams::new(SEED);
    let mut histogram: std::collections::BTreeMap<String, usize> = Default::default();
    let mut verdict_split = (0usize, 0usize);
    let mut undetermined = 0usize;
    let mut compared = 0usize;

    for index in 0..CASES {
        let case = gen_case(&params, index).expect("generator yields valid ideals");
        let config = Config::new(case.c.clone()).unwrap();
        let fast = match test_c_reduced(&case.ideal, &config) {
            Ok(v) => v,
            Err(TestError::BranchUndetermined { .. }) => {
                undetermined += 1;
                continue;
            }
            Err(e) => panic!("case {index}: unexpected error {e}"),
        };
        let oracle = oracle_test(&case.ideal, &config).expect("oracle completes");
        assert_eq!(
            fast.reduced, oracle.verdict,
            "case {index}: verdict mismatch at stage {} (d = {}, C = {})",
            fast.stage,
            case.ideal.field().d(),
            case.c,
        );
        compared += 1;
        *histogram.entry(fast.stage.to_string()).or_default() += 1;
        if fast.reduced {
            verdict_split.0 += 1;
        } else {
            verdict_split.1 += 1;
        }

        if fast.stage == Stage::BminBmax {
            assert_eq!(
                fast.bmin4, oracle.bmin4,
                "case {index}: interval lower endpoints differ"
            );
            assert_eq!(
                fast.bmax4, oracle.bmax4,
                "case {index}: interval upper endpoints differ"
            );
            // Every extremal constraint found by exhaustive enumeration
            // must be attained inside the eight-candidate shortlist.
            for class in [CandidateClass::G1, CandidateClass::G2] {
                let oracle_has = g_members(&oracle.g_census).iter().any(|c| c.class == class);
                let fast_has = fast.candidates.iter().any(|c| c.class == class);
                assert_eq!(
                    oracle_has, fast_has,
                    "case {index}: class {class:?} visibility differs"
                );
            }
        }

        if fast.reduced && fast.stage == Stage::BminBmax {
            if let Some(alpha4) = &fast.witness_alpha4 {
                assert!(
                    validate_witness(&case.ideal, &config, alpha4).unwrap(),
                    "case {index}: witness fails exhaustive validation"
                );
            }
        }
    }

    eprintln!("stage histogram: {histogram:?}");
    eprintln!(
        "verdicts: {} reduced / {} not; {} branch-undetermined",
        verdict_split.0, verdict_split.1, undetermined
    );
    assert!(compared + undetermined >= CASES as usize);
    assert!(
        histogram.len() >= 4,
        "fuzz mix should exercise most stages, saw {histogram:?}"
    );
    assert!(
        histogram.contains_key("BminBmax"),
        "fuzz mix must reach the interval stage, saw {histogram:?}"
    );
}

#[test]
fn structural_invariants_hold_on_fuzz_cases() {
    let params = FuzzParams::new(SEED);
    for index in 0..CASES {
        let case = gen_case(&params, index).expect("generator yields valid ideals");
        let config = Config::new(case.c.clone()).unwrap();
        let oracle = match oracle_test(&case.ideal, &config) {
            Ok(r) => r,
            Err(e) => panic!("case {index}: oracle error {e}"),
        };
        if oracle.stage != Stage::BminBmax {
            continue;
        }
        let members = g_members(&oracle.g_census);

        // |s2| <= 1 for every census vector in G.
        for c in &members {
            assert!(
                c.s2.abs() <= 1,
                "case {index}: G member with |s2| = {} > 1",
                c.s2.abs()
            );
        }

        // Census count (one per +- pair) stays below 17C + 3.
        let seventeen_c_plus_3 =
            BigRational::from_integer(17.into()) * &case.c + BigRational::from_integer(3.into());
        let count = BigRational::from_integer((members.len() as i64).into());
        assert!(
            count < seventeen_c_plus_3,
            "case {index}: census of {} pairs exceeds 17C + 3 = {}",
            members.len(),
            seventeen_c_plus_3
        );

        // Covolume bound at the interval stage: covol^2 < 4/C^2.
        let covol_sq = embed_and_reduce(&case.ideal).covol_sq();
        let bound = BigRational::from_integer(4.into()) / config.c_sq();
        assert!(
            covol_sq < bound,
            "case {index}: covol^2 = {covol_sq} >= 4/C^2 = {bound}"
        );

        // A produced witness lies in the open a-priori range.
        if oracle.verdict {
            let fast = test_c_reduced(&case.ideal, &config).unwrap();
            if let Some(alpha4) = &fast.witness_alpha4 {
                assert!(
                    *alpha4 > config.alpha4_lo() && *alpha4 < config.alpha4_hi(),
                    "case {index}: witness {alpha4} outside open a-priori range"
                );
            }
        }
    }
}

#[test]
fn radius_slack_does_not_change_verdicts() {
    let params = FuzzParams::new(SEED + 1);
    for index in 0..40 {
        let case = gen_case(&params, index).expect("generator yields valid ideals");
        let base = Config::new(case.c.clone()).unwrap();
        let wide = Config::new(case.c.clone())
            .unwrap()
            .with_slack(BigRational::from_integer(2.into()))
            .unwrap();
        let a = oracle_test(&case.ideal, &base).expect("oracle completes");
        let b = oracle_test(&case.ideal, &wide).expect("oracle completes");
        assert_eq!(
            a.verdict, b.verdict,
            "case {index}: enlarging the census radius changed the verdict"
        );
    }
}

#[test]
fn scaling_away_membership_is_detected() {
    let params = FuzzParams::new(SEED + 2);
    let mut seen_early_stage = false;
    for index in 0..30 {
        let case = gen_case(&params, index).unwrap();
        let config = Config::new(BigRational::one()).unwrap();
        if let Ok(v) = test_c_reduced(&case.ideal, &config) {
            if !case.ideal.contains_one() {
                assert!(!v.reduced);
                assert_eq!(v.stage, Stage::ContainsOne);
                seen_early_stage = true;
            }
        }
    }
    assert!(seen_early_stage, "fuzz mix should produce non-members of 1");
}
