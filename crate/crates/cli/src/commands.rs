use std::path::Path;

use randpivot::lab::suites::{lemma_suites, SuiteOutcome};
use randpivot::lab::{
    convergence_study, martingale_study, orthogonalization_acceptance, stability_study, Exec, MatrixFamily,
    Problem, StudyConfig, StudyKind,
};
use randpivot::{run_one_sided, run_two_sided, Mode, PivotRuleSpec, RunConfig, SymmetricMatrix};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::mtx::{read_matrix_market, write_matrix_market, MmMatrix};
use crate::output::{write_json, write_rows, write_trace};
use crate::{CheckArgs, FactorArgs, FamilyName, RunArgs, StudyArgs};

const EXIT_CONVERGED: u8 = 0;
const EXIT_BUDGET: u8 = 2;
const EXIT_FAILED: u8 = 1;

/// Applies `--k` to the pivot rule. Only the random rule has a free size.
fn pivot_rule(run: &RunArgs) -> CliResult<PivotRuleSpec> {
    match (run.pivot, run.k) {
        (p, None) => Ok(p),
        (PivotRuleSpec::Random { .. }, Some(k)) => Ok(PivotRuleSpec::Random { k }),
        (p, Some(2)) => Ok(p),
        (p, Some(k)) => Err(CliError::Usage(format!("pivot rule {p} uses k = 2, got --k {k}"))),
    }
}

#[derive(Serialize)]
struct FactorSummary {
    mode: Mode,
    kind: String,
    pivot: String,
    seed: u64,
    n: usize,
    iters_used: usize,
    converged: bool,
    off_hat: f64,
    gamma: Option<f64>,
    residual: Option<f64>,
    sup_kappa_hat: Option<f64>,
    diagonal_residual: Option<f64>,
    skipped: usize,
}

pub fn factor(args: FactorArgs) -> CliResult<u8> {
    let input = read_matrix_market(&args.input)?;
    let mode = args.run.mode.unwrap_or(Mode::TwoSided);
    let mut cfg = RunConfig::new(mode, args.run.kind, pivot_rule(&args.run)?);
    cfg.delta = args.run.delta;
    cfg.seed = args.run.seed;
    cfg.max_iters = args.max_iters;
    cfg.trace_cadence = args.cadence;

    let (n, result) = match mode {
        Mode::OneSided => {
            let a = input.into_general();
            (a.cols(), run_one_sided(&a, &cfg)?)
        }
        Mode::TwoSided => {
            let b = match input {
                MmMatrix::Symmetric(b) => b,
                MmMatrix::General(m) => SymmetricMatrix::from_matrix(m)?,
            };
            (b.n(), run_two_sided(&b, &cfg)?)
        }
    };

    if let Some(path) = &args.trace {
        write_trace(path, &result.trace)?;
    }
    if let Some(path) = &args.out_q {
        write_matrix_market(path, &result.factor)?;
    }
    if let Some(path) = &args.out_t {
        write_matrix_market(path, &result.t_acc)?;
    }
    let s = &result.summary;
    let summary = FactorSummary {
        mode,
        kind: cfg.transform.to_string(),
        pivot: cfg.pivot.to_string(),
        seed: cfg.seed,
        n,
        iters_used: s.iters_used,
        converged: s.converged,
        off_hat: s.off_hat,
        gamma: s.gamma,
        residual: s.residual,
        sup_kappa_hat: s.sup_kappa_hat,
        diagonal_residual: s.diagonal_residual,
        skipped: s.skipped,
    };
    if let Some(path) = &args.summary {
        write_json(path, &summary)?;
    }
    Ok(if result.converged { EXIT_CONVERGED } else { EXIT_BUDGET })
}

fn family(args: &StudyArgs) -> CliResult<MatrixFamily> {
    Ok(match args.family {
        FamilyName::Haar => MatrixFamily::HaarColumns {
            d: args.d.unwrap_or(args.n),
            n: args.n,
        },
        FamilyName::SpdKappahat => MatrixFamily::SpdKappaHat {
            n: args.n,
            kappa: args.kappa,
        },
        FamilyName::Graded => MatrixFamily::Graded {
            n: args.n,
            spread: args.spread,
            kappa_hat: args.kappa,
        },
        FamilyName::File => {
            let path = args
                .input
                .as_ref()
                .ok_or_else(|| CliError::Usage("--family file needs --input".into()))?;
            MatrixFamily::Fixed(match read_matrix_market(path)? {
                MmMatrix::General(a) => Problem::Columns(a),
                MmMatrix::Symmetric(b) => Problem::Symmetric(b),
            })
        }
    })
}

fn default_mode(family: &MatrixFamily) -> Mode {
    match family {
        MatrixFamily::HaarColumns { .. } | MatrixFamily::Fixed(Problem::Columns(_)) => Mode::OneSided,
        _ => Mode::TwoSided,
    }
}

pub fn study(args: StudyArgs) -> CliResult<u8> {
    let family = family(&args)?;
    let mode = args.run.mode.unwrap_or_else(|| default_mode(&family));
    let label = family.to_string();
    let mut cfg = StudyConfig::new(family, args.trials, mode, args.run.kind, pivot_rule(&args.run)?);
    cfg.seed_base = args.run.seed;
    cfg.exec = if args.sequential { Exec::Sequential } else { Exec::Parallel };
    cfg.horizon = args.horizon;
    cfg.sample_every = args.sample_every;
    cfg.delta = args.run.delta;

    let header = json!({
        "study": args.study,
        "family": label,
        "mode": mode,
        "kind": cfg.transform.to_string(),
        "pivot": cfg.pivot.to_string(),
        "trials": cfg.trials,
        "seed_base": cfg.seed_base,
    });
    let metrics = match args.study {
        StudyKind::Convergence => {
            let table = convergence_study(&cfg)?;
            write_rows(&args.out, &table.rows)?;
            json!({ "n": table.n, "k": table.k, "worst_factor": table.worst_factor() })
        }
        StudyKind::Martingale => {
            let report = martingale_study(&cfg)?;
            write_rows(&args.out, &report.rows)?;
            json!({ "n": report.n, "k": report.k, "max_abs_z": report.max_abs_z() })
        }
        StudyKind::Stability => {
            let report = stability_study(&cfg)?;
            write_rows(&args.out, &report.rows)?;
            json!({
                "n": report.n,
                "violations": report.violations,
                "violation_fraction": report.violation_fraction(),
                "dist2_pass_fraction": report.dist2_pass_fraction(cfg.delta.sqrt()),
            })
        }
        StudyKind::Orthogonalization => {
            let report = orthogonalization_acceptance(&cfg, cfg.delta)?;
            write_rows(&args.out, &report.rows)?;
            json!({
                "delta": report.delta,
                "failures": report.failures,
                "failure_fraction": report.failure_fraction(),
            })
        }
    };
    if let Some(path) = &args.summary {
        write_json(path, &json!({ "config": header, "result": metrics }))?;
    }
    Ok(0)
}

fn report_line(o: &SuiteOutcome) -> String {
    format!(
        "{} {} cases={} violations={} worst={:.3e}",
        if o.passed() { "PASS" } else { "FAIL" },
        o.name,
        o.cases,
        o.violations,
        o.worst
    )
}

pub fn check(args: CheckArgs) -> CliResult<u8> {
    let outcomes = lemma_suites(args.seed, args.cases)?;
    for o in &outcomes {
        println!("{}", report_line(o));
    }
    if let Some(path) = &args.summary {
        write_json(path as &Path, &outcomes)?;
    }
    Ok(if outcomes.iter().all(SuiteOutcome::passed) { 0 } else { EXIT_FAILED })
}
