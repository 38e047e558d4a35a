//! Command-line front end: exact norms, witnesses, cross-checks, and the
//! sequence experiments, emitted as CSV or JSON lines. Every run stamps its
//! resolved configuration into the report header; reruns with identical
//! flags produce byte-identical output. Values are exact rationals
//! throughout; the only decimal ever printed is the opt-in approximation
//! column, which is annotation, not data.
//!
//! Exit codes: 0 success, 1 failed check or exhausted selection, 2 bad
//! input, 3 resource-guard abort.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use normset::report::Format;
use normset::Rat;

fn parse_rat(s: &str) -> Result<Rat, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Parser)]
#[command(
    name = "normset",
    version,
    about = "Exact norms, certifying witnesses, and block-sequence experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,

    /// Space parameters as TOML; the standard space when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    pub space: Option<PathBuf>,

    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, default_value = "csv")]
    pub format: Format,

    /// Worker threads; 0 takes every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Abort any engine call that expands more than this many nodes.
    #[arg(long, global = true, value_name = "N")]
    pub node_budget: Option<u64>,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Exact norms of the vectors in a file, one `i:p/q ...` line each.
    Norm(NormArgs),
    /// Norms with the full witness audit: validation, re-evaluation, shape.
    Witness(NormArgs),
    /// Engine vs independent enumeration on an exhaustive coefficient box.
    OracleCheck(OracleArgs),
    /// Constrained-value profile of one row over the standard grid.
    Alpha(AlphaArgs),
    /// Exhaustive averaging-bound check over one row.
    Lemma(LemmaArgs),
    /// Block a row along an index family and report the member norms.
    Block(BlockArgs),
    /// Spread coefficients along a row and test the two-sided estimate.
    Spreading(SpreadingArgs),
    /// Select one member per row and test the sandwich estimate.
    Sandwich(SandwichArgs),
    /// Sandwich norm vs a row permutation, bracketed by the factor 4.
    Symmetry(SymmetryArgs),
    /// Per-row weights plus the weighted estimate on a coefficient set.
    Asmodel(AsmodelArgs),
}

#[derive(Args)]
pub struct NormArgs {
    /// Vector file: one vector per line.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Declared-size cap on enumerated functionals.
    #[arg(long, value_name = "N")]
    pub size_cap: Option<u32>,

    /// Nesting-depth cap on enumerated functionals.
    #[arg(long, value_name = "N")]
    pub depth_cap: Option<u32>,

    /// Add a decimal approximation column (annotation only).
    #[arg(long)]
    pub approx: bool,
}

#[derive(Args)]
pub struct OracleArgs {
    /// Exhaust every vector on support 1..=K with coefficients
    /// {0, 1, -1, 1/2, -1/2}; K is capped at 7 (5^K cases).
    #[arg(long, value_name = "K", default_value_t = 5)]
    pub max_support: u32,

    /// Extra random signed vectors on the same support window.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub random: usize,

    /// Seed for the random extras.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Shared depth cap for both sides.
    #[arg(long, default_value_t = 6)]
    pub depth_cap: u32,

    /// Shared size cap for both sides.
    #[arg(long, default_value_t = 8)]
    pub size_cap: u32,
}

#[derive(Args)]
pub struct AlphaArgs {
    /// Row spec: basis:L | tail:S:L | flat:K | mix:W:L | file:PATH.
    #[arg(long, value_name = "ROW")]
    pub rows: String,

    /// Threshold under which the trend reads as vanishing.
    #[arg(long, default_value = "1/10", value_parser = parse_rat)]
    pub eps: Rat,

    #[arg(long, value_name = "N")]
    pub size_cap: Option<u32>,

    #[arg(long, value_name = "N")]
    pub depth_cap: Option<u32>,
}

#[derive(Args)]
pub struct LemmaArgs {
    /// Row spec: basis:L | tail:S:L | flat:K | mix:W:L | file:PATH.
    #[arg(long, value_name = "ROW")]
    pub rows: String,

    /// Largest declared average size enumerated.
    #[arg(long, default_value_t = 8)]
    pub max_size: u32,

    /// Deepest nesting enumerated.
    #[arg(long, default_value_t = 3)]
    pub max_depth: u32,

    /// Scale the bound by the largest member norm instead of requiring
    /// normalized members.
    #[arg(long)]
    pub unnormalized: bool,
}

#[derive(Args)]
pub struct BlockArgs {
    /// Row spec: basis:L | tail:S:L | flat:K | mix:W:L | file:PATH.
    #[arg(long, value_name = "ROW")]
    pub rows: String,

    /// Index family: dyadic:K, or explicit ranges like 1-1,2-3,4-7.
    #[arg(long, value_name = "FAMILY")]
    pub family: String,

    /// sum adds the indexed members; average divides by the set size.
    #[arg(long, default_value = "sum")]
    pub mode: String,
}

#[derive(Args)]
pub struct SpreadingArgs {
    /// Row spec: basis:L | tail:S:L | flat:K | mix:W:L | file:PATH.
    #[arg(long, value_name = "ROW")]
    pub rows: String,

    /// Comma-separated rational coefficients.
    #[arg(long, default_value = "1,1,1,1")]
    pub coeffs: String,

    /// 1-based member the picks start from.
    #[arg(long, default_value_t = 1)]
    pub start: usize,

    /// Index gap between consecutive picks.
    #[arg(long, default_value_t = 2)]
    pub spacing: usize,

    /// Surrogates under this classify as vanishing.
    #[arg(long, default_value = "1/10", value_parser = parse_rat)]
    pub trend_eps: Rat,

    #[command(flatten)]
    pub sel: SelectionFlags,
}

#[derive(Args)]
pub struct SandwichArgs {
    /// Comma-separated row specs.
    #[arg(long, value_name = "ROWS")]
    pub rows: String,

    /// Anchor vector as an inline `i:p/q ...` line.
    #[arg(long, value_name = "VEC")]
    pub anchor: Option<String>,

    #[command(flatten)]
    pub sel: SelectionFlags,
}

#[derive(Args)]
pub struct SymmetryArgs {
    /// Comma-separated row specs.
    #[arg(long, value_name = "ROWS")]
    pub rows: String,

    /// Anchor vector as an inline `i:p/q ...` line.
    #[arg(long, value_name = "VEC")]
    pub anchor: Option<String>,

    /// 1-based row permutation, e.g. 2,1.
    #[arg(long, value_name = "PERM")]
    pub perm: String,

    #[command(flatten)]
    pub sel: SelectionFlags,
}

#[derive(Args)]
pub struct AsmodelArgs {
    /// Comma-separated row specs.
    #[arg(long, value_name = "ROWS")]
    pub rows: String,

    /// Anchor vector as an inline `i:p/q ...` line.
    #[arg(long, value_name = "VEC")]
    pub anchor: Option<String>,

    /// Semicolon-separated coefficient vectors, e.g. "1,1;1,-1/2".
    /// Defaults to ones, one-hots, alternating signs, and halves.
    #[arg(long, value_name = "SETS")]
    pub lambdas: Option<String>,

    #[command(flatten)]
    pub sel: SelectionFlags,
}

/// Selection and estimate knobs shared by the array experiments.
#[derive(Args)]
pub struct SelectionFlags {
    /// Two-sided slack of the estimate.
    #[arg(long, default_value = "1/4", value_parser = parse_rat)]
    pub eps: Rat,

    /// Consecutive members that must sit under the threshold.
    #[arg(long, default_value_t = 2)]
    pub streak: usize,

    /// Members scanned per row before the search gives up.
    #[arg(long, default_value_t = 24)]
    pub scan_cap: usize,

    /// Size schedule for the threshold search.
    #[arg(long, default_value = "2,4,8,16")]
    pub schedule: String,

    /// Size floor of the frozen surrogate values.
    #[arg(long, default_value_t = 2)]
    pub surrogate_s: u32,

    /// Length budget of the frozen surrogate values.
    #[arg(long, default_value_t = 1)]
    pub surrogate_len: u32,

    #[arg(long, value_name = "N")]
    pub size_cap: Option<u32>,

    #[arg(long, value_name = "N")]
    pub depth_cap: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = pool.install(|| commands::run(&cli));
    let run = match outcome {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(path) = &cli.out {
        if let Err(e) = run.report.write_atomic(path, cli.format) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    } else {
        print!("{}", run.report.render(cli.format));
    }
    eprintln!("{}: {}", run.label, if run.pass { "PASS" } else { "FAIL" });
    if run.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
