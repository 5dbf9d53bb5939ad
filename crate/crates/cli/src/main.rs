//! `randpivot`: run randomized-pivot factorizations on MatrixMarket input,
//! multi-trial studies, and the lemma check suites.

mod commands;
mod error;
mod mtx;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use randpivot::lab::StudyKind;
use randpivot::{Mode, PivotRuleSpec, TransformSpec};

#[derive(Debug, Parser)]
#[command(name = "randpivot", version, about = "Randomized-pivot Jacobi-type factorizations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factor one matrix and write the factors, trace and summary.
    Factor(FactorArgs),
    /// Run a seeded multi-trial study and write its table.
    Study(StudyArgs),
    /// Run the randomized lemma check suites.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// one-sided (columns of A) or two-sided (symmetric B).
    #[arg(long)]
    mode: Option<Mode>,
    /// evd|svd, cholesky|qr, ldl, ql, orth, optionally ",rule=gs2|nsvd2|nsvd2x2".
    #[arg(long, default_value = "evd")]
    kind: TransformSpec,
    /// random:k=K, greedy-offdiag, greedy-gamma, row-cyclic, column-cyclic.
    #[arg(long, default_value = "random:k=2")]
    pivot: PivotRuleSpec,
    /// Pivot size for the random rule (overrides the size in --pivot).
    #[arg(long)]
    k: Option<usize>,
    /// Target normalized off-diagonal RMS.
    #[arg(long, default_value_t = randpivot::driver::DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct FactorArgs {
    /// MatrixMarket input file.
    input: PathBuf,
    #[command(flatten)]
    run: RunArgs,
    /// Iteration budget; defaults to the bound computed from the input.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Iterations between sampled observables; defaults to one expected sweep.
    #[arg(long)]
    cadence: Option<usize>,
    /// CSV trace output (`-` for stdout).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Q (one-sided) or D (two-sided) as MatrixMarket.
    #[arg(long)]
    out_q: Option<PathBuf>,
    /// T_acc as MatrixMarket.
    #[arg(long)]
    out_t: Option<PathBuf>,
    /// JSON summary output (`-` for stdout).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyName {
    Haar,
    SpdKappahat,
    Graded,
    File,
}

#[derive(Debug, Args)]
struct StudyArgs {
    /// convergence, martingale, stability or orthogonalization.
    #[arg(long, default_value = "convergence")]
    study: StudyKind,
    #[arg(long, value_enum, default_value = "haar")]
    family: FamilyName,
    /// Rows of the Haar family (defaults to n).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Target κ̂ of the spd-kappahat and graded families.
    #[arg(long, default_value_t = 100.0)]
    kappa: f64,
    /// Ratio of the largest to the smallest scale of the graded family.
    #[arg(long, default_value_t = 1e3)]
    spread: f64,
    /// MatrixMarket input for the file family.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[command(flatten)]
    run: RunArgs,
    /// Iterations per trial; each study has its own default.
    #[arg(long)]
    horizon: Option<usize>,
    /// Iterations between samples; each study has its own default.
    #[arg(long)]
    sample_every: Option<usize>,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
    /// CSV table output.
    #[arg(long, default_value = "-")]
    out: PathBuf,
    /// JSON summary output.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Lemmas,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "lemmas")]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random cases per randomized sweep.
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    /// JSON summary output.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Factor(args) => commands::factor(args),
        Command::Study(args) => commands::study(args),
        Command::Check(args) => commands::check(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
