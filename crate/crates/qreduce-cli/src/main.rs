//! Command-line surface for the reduction tester and the cubic census
//! tooling. Everything mathematical crosses this boundary as exact
//! integers or "num/den" rationals; reports are deterministic functions
//! of the flags, and timing chatter goes to stderr only.

use std::path::Path;

use clap::{Parser, Subcommand};

mod cubic;
mod quad;

/// Exit code for a clean run whose answer is "yes"/"done".
pub const EXIT_OK: i32 = 0;
/// The tested ideal is not reduced.
pub const EXIT_NOT_REDUCED: i32 = 1;
/// Malformed input: flags, files, or parameters out of range.
pub const EXIT_INPUT: i32 = 2;
/// The decision procedure could not certify a branch.
pub const EXIT_UNDETERMINED: i32 = 3;
/// A work cap stopped the computation before completion.
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser)]
#[command(
    name = "qreduce-cli",
    version,
    about = "Exact reduction testing for real quadratic ideals and short-vector censuses for totally real cubic lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a fractional ideal of a real quadratic field is C-reduced.
    Test(quad::TestArgs),
    /// Random cross-check campaign: decision procedure vs exhaustive oracle.
    Fuzz(quad::FuzzArgs),
    /// Totally real cubic lattices: discriminants, hypothesis checks,
    /// short-vector censuses, seed search.
    Cubic {
        #[command(subcommand)]
        command: cubic::CubicCommand,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Test(args) => quad::cmd_test(args),
        Command::Fuzz(args) => quad::cmd_fuzz(args),
        Command::Cubic { command } => cubic::dispatch(command),
    };
    std::process::exit(code);
}

/// Work caps resolve as flag, then `QREDUCE_BUDGET`, then the default.
/// Only budgets may come from the environment; mathematical parameters
/// must be explicit flags.
pub(crate) fn resolve_budget(flag: Option<u64>, default: u64) -> u64 {
    flag.or_else(|| {
        std::env::var("QREDUCE_BUDGET")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(default)
}

/// Prints to stdout or writes to `--out`, with a trailing newline.
pub(crate) fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Uniform input-error reporting: diagnostic on stderr, exit code 2.
pub(crate) fn input_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_INPUT
}
