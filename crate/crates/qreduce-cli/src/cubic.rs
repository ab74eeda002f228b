//! The cubic commands: exact discriminants, hypothesis reports,
//! short-vector censuses with certified counts, and seed search.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::Signed;
use serde_json::json;

use qreduce_cubic::census::{decimal_plain, run_census, CensusParams, DEFAULT_PAIR_BUDGET};
use qreduce_cubic::census::{check_lattice, sci_string};
use qreduce_cubic::gen::{gen_search, GenParams, DEFAULT_SEARCH_BUDGET};
use qreduce_cubic::roots::CubicPoly;
use qreduce_cubic::seed::{
    check_seed, parse_ratio, CubicSeed, DEFAULT_PRECISION_BITS, DEFAULT_RHO_BUDGET,
};
use qreduce_cubic::CubicError;

use crate::{emit, input_error, resolve_budget, EXIT_BUDGET, EXIT_OK};

#[derive(Subcommand)]
pub enum CubicCommand {
    /// Exact discriminant of a X^3 + b X^2 + c X + d.
    Disc(DiscArgs),
    /// Arithmetic hypothesis report for a seed polynomial.
    Check(SeedArgs),
    /// Certified short-vector census with the exact lower bound.
    Census(CensusArgs),
    /// Search for a seed whose hypotheses all verify at desk scale.
    Gen(GenArgs),
}

pub fn dispatch(command: CubicCommand) -> i32 {
    match command {
        CubicCommand::Disc(args) => cmd_disc(args),
        CubicCommand::Check(args) => cmd_check(args),
        CubicCommand::Census(args) => cmd_census(args),
        CubicCommand::Gen(args) => cmd_gen(args),
    }
}

/// Budget-flavored failures exit 4; everything else is an input error.
fn failure(e: &CubicError) -> i32 {
    eprintln!("error: {e}");
    match e {
        CubicError::CensusBudgetExceeded { .. }
        | CubicError::SearchBudgetExceeded { .. }
        | CubicError::FactorBudgetExceeded { .. } => EXIT_BUDGET,
        _ => crate::EXIT_INPUT,
    }
}

#[derive(Args)]
pub struct DiscArgs {
    /// Leading coefficient (nonzero).
    #[arg(allow_hyphen_values = true)]
    a: String,
    #[arg(allow_hyphen_values = true)]
    b: String,
    #[arg(allow_hyphen_values = true)]
    c: String,
    #[arg(allow_hyphen_values = true)]
    d: String,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_int(s: &str) -> Result<BigInt, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("bad integer literal {s:?}"))
}

fn cmd_disc(args: DiscArgs) -> i32 {
    let poly = match build_poly(&args.a, &args.b, &args.c, &args.d) {
        Ok(p) => p,
        Err(msg) => return input_error(&msg),
    };
    let report = json!({
        "poly": {
            "a": poly.a.to_string(),
            "b": poly.b.to_string(),
            "c": poly.c.to_string(),
            "d": poly.d.to_string(),
        },
        "disc": poly.disc().to_string(),
    });
    let text = serde_json::to_string_pretty(&report).expect("disc report serializes");
    match emit(&text, args.out.as_deref()) {
        Ok(()) => EXIT_OK,
        Err(msg) => input_error(&msg),
    }
}

fn build_poly(a: &str, b: &str, c: &str, d: &str) -> Result<CubicPoly, String> {
    CubicPoly::new(parse_int(a)?, parse_int(b)?, parse_int(c)?, parse_int(d)?)
        .map_err(|e| e.to_string())
}

#[derive(Args)]
pub struct SeedArgs {
    /// Leading coefficient of the seed polynomial a X^3 + b X^2 + c X + d.
    #[arg(allow_hyphen_values = true, value_name = "A", conflicts_with = "file")]
    coeff_a: Option<String>,
    #[arg(allow_hyphen_values = true, value_name = "B", conflicts_with = "file")]
    coeff_b: Option<String>,
    #[arg(allow_hyphen_values = true, value_name = "C3", conflicts_with = "file")]
    coeff_c: Option<String>,
    #[arg(allow_hyphen_values = true, value_name = "D", conflicts_with = "file")]
    coeff_d: Option<String>,
    /// Seed JSON file as produced by `cubic gen` (instead of coefficients).
    #[arg(long)]
    file: Option<PathBuf>,
    /// Tolerance C >= 1, exact rational "num/den".
    #[arg(long = "C", default_value = "1/1")]
    c: String,
    /// Root isolation precision in bits.
    #[arg(long = "precision-bits", default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: u32,
    /// Work cap: Pollard rho steps for `check`, visited coefficient
    /// pairs for `census`.
    #[arg(long)]
    budget: Option<u64>,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SeedArgs {
    fn seed(&self) -> Result<CubicSeed, String> {
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            // Accept both a bare seed and the `gen` wrapper around one.
            let nested = serde_json::from_str::<serde_json::Value>(&text)
                .ok()
                .and_then(|v| v.get("seed").map(|s| s.to_string()));
            let direct = CubicSeed::from_json(&text);
            return match (direct, nested) {
                (Ok(seed), _) => Ok(seed),
                (Err(_), Some(inner)) => CubicSeed::from_json(&inner).map_err(|e| e.to_string()),
                (Err(e), None) => Err(e.to_string()),
            };
        }
        let (a, b, c3, d) = match (&self.coeff_a, &self.coeff_b, &self.coeff_c, &self.coeff_d) {
            (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
            _ => return Err("either all four coefficients or --file is required".into()),
        };
        let poly = build_poly(a, b, c3, d)?;
        let c = parse_ratio(&self.c).map_err(|e| e.to_string())?;
        CubicSeed::new(poly, c, self.precision_bits).map_err(|e| e.to_string())
    }
}

fn cmd_check(args: SeedArgs) -> i32 {
    let seed = match args.seed() {
        Ok(s) => s,
        Err(msg) => return input_error(&msg),
    };
    let rho_budget = resolve_budget(args.budget, DEFAULT_RHO_BUDGET);
    let report = match check_seed(&seed, rho_budget) {
        Ok(r) => r,
        Err(e) => return failure(&e),
    };
    let all_hold = report.all_hypotheses_hold();
    let out = json!({
        "seed": seed_value(&seed),
        "arithmetic": report,
        "all_hypotheses_hold": all_hold,
    });
    let text = serde_json::to_string_pretty(&out).expect("check report serializes");
    match emit(&text, args.out.as_deref()) {
        Ok(()) => EXIT_OK,
        Err(msg) => input_error(&msg),
    }
}

fn seed_value(seed: &CubicSeed) -> serde_json::Value {
    serde_json::from_str(&seed.to_json()).expect("seed round-trips")
}

pub type CensusArgs = SeedArgs;

fn cmd_census(args: SeedArgs) -> i32 {
    let seed = match args.seed() {
        Ok(s) => s,
        Err(msg) => return input_error(&msg),
    };
    let pair_budget = resolve_budget(args.budget, DEFAULT_PAIR_BUDGET);

    // The pair walk visits about 12 C^2 covol coefficient pairs. When
    // even the estimate dwarfs the cap, report the exact bound facts and
    // decline the enumeration instead of burning the whole budget.
    let disc = seed.poly.disc();
    if disc.is_positive() {
        let a = BigInt::from(seed.poly.a.magnitude().clone());
        let covol_floor = BigRational::new(disc.sqrt(), a);
        let estimate = (BigRational::from_integer(12.into()) * &seed.c * &seed.c * &covol_floor)
            .ceil()
            .to_integer()
            + BigInt::from(1024);
        if estimate > BigInt::from(pair_budget) {
            let (summary, conditions) = match check_lattice(&seed) {
                Ok(pair) => pair,
                Err(e) => return failure(&e),
            };
            let two_thirds_c_sq = BigRational::new(2.into(), 3.into()) * &seed.c * &seed.c;
            let lower_bound = two_thirds_c_sq * &covol_floor;
            let out = json!({
                "seed": seed_value(&seed),
                "disc": disc.to_string(),
                "lattice": summary,
                "conditions": conditions,
                "lower_bound": decimal_plain(&lower_bound, 2),
                "lower_bound_sci": sci_string(&lower_bound, 5),
                "census": "declined",
                "estimated_pairs": estimate.to_string(),
                "pair_budget": pair_budget,
            });
            let text = serde_json::to_string_pretty(&out).expect("decline report serializes");
            if let Err(msg) = emit(&text, args.out.as_deref()) {
                return input_error(&msg);
            }
            eprintln!(
                "census declined: estimated {estimate} pairs exceed the budget of {pair_budget}"
            );
            return EXIT_BUDGET;
        }
    }

    let params = CensusParams::default().with_budget(pair_budget);
    let report = match run_census(&seed, &params) {
        Ok(r) => r,
        Err(e) => return failure(&e),
    };
    let mut value = report.to_json();
    let map = value.as_object_mut().expect("census report is an object");
    map.insert("bound_holds".into(), json!(report.bound_holds()));
    let text = serde_json::to_string_pretty(&value).expect("census report serializes");
    match emit(&text, args.out.as_deref()) {
        Ok(()) => EXIT_OK,
        Err(msg) => input_error(&msg),
    }
}

#[derive(Args)]
pub struct GenArgs {
    /// Tolerance C >= 1, exact rational "num/den".
    #[arg(long = "C", default_value = "1/1")]
    c: String,
    /// Smallest leading coefficient to sample.
    #[arg(long = "a-min", default_value_t = 1_000)]
    a_min: u64,
    /// Largest leading coefficient to sample.
    #[arg(long = "a-max", default_value_t = 100_000)]
    a_max: u64,
    /// RNG seed; candidate streams are functions of (seed, index).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Root isolation precision in bits.
    #[arg(long = "precision-bits", default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: u32,
    /// Candidate cap for the search.
    #[arg(long)]
    budget: Option<u64>,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_gen(args: GenArgs) -> i32 {
    let c = match parse_ratio(&args.c) {
        Ok(c) => c,
        Err(e) => return input_error(&e.to_string()),
    };
    if args.a_min < 2 || args.a_max < args.a_min {
        return input_error("need 2 <= a-min <= a-max");
    }
    let params = GenParams {
        c,
        a_min: args.a_min,
        a_max: args.a_max,
        rng_seed: args.seed,
        precision_bits: args.precision_bits,
        search_budget: resolve_budget(args.budget, DEFAULT_SEARCH_BUDGET),
        rho_budget: DEFAULT_RHO_BUDGET,
    };
    let outcome = match gen_search(&params) {
        Ok(o) => o,
        Err(e) => return failure(&e),
    };
    let out = json!({
        "seed": seed_value(&outcome.seed),
        "arithmetic": outcome.report,
        "lattice": outcome.conditions,
        "candidates_tried": outcome.candidates_tried,
    });
    let text = serde_json::to_string_pretty(&out).expect("gen report serializes");
    match emit(&text, args.out.as_deref()) {
        Ok(()) => EXIT_OK,
        Err(msg) => input_error(&msg),
    }
}
