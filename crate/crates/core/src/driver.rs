//! Outer loops of the randomized-pivot factorization, one-sided on columns
//! and two-sided on a symmetric matrix, with cadenced observables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localfactor::{LocalTransform, TransformSpec};
use crate::matcore::dense::{cholesky_lower, householder_qr};
use crate::matcore::{
    accumulate_transform, apply_one_sided_update, apply_two_sided_update, diagonal_normalize,
    extract_columns, extract_principal_submatrix, Matrix, PivotSet, SymmetricMatrix,
};
use crate::metrics::{dist_two, gamma, kappa_hat, off_frobenius, off_hat};
use crate::pivoting::{PivotRule, PivotRuleSpec};

/// Default target tolerance on the normalized off-diagonal RMS.
pub const DEFAULT_DELTA: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Column operations on `A`: `A = Q·T_acc`.
    OneSided,
    /// Congruences on `B`: `B = T_accᵀ·D·T_acc`.
    TwoSided,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-sided" => Ok(Mode::OneSided),
            "two-sided" => Ok(Mode::TwoSided),
            _ => Err(Error::Config(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::OneSided => "one-sided",
            Mode::TwoSided => "two-sided",
        })
    }
}

/// Which expensive observables to evaluate at cadence points. `off̂` is
/// always evaluated since it drives the stopping test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observables {
    pub gamma: bool,
    pub kappa_hat: bool,
    pub reconstruction: bool,
}

impl Default for Observables {
    fn default() -> Self {
        Observables {
            gamma: true,
            kappa_hat: true,
            reconstruction: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub transform: TransformSpec,
    /// Pivot rule; the pivot size `k` lives here.
    pub pivot: PivotRuleSpec,
    pub delta: f64,
    /// `None` uses [`iteration_budget`] with κ̂ of the input.
    pub max_iters: Option<usize>,
    pub seed: u64,
    /// `None` uses one expected sweep, `⌈n(n−1)/(k(k−1))⌉`.
    pub trace_cadence: Option<usize>,
    pub observe: Observables,
}

impl RunConfig {
    pub fn new(mode: Mode, transform: TransformSpec, pivot: PivotRuleSpec) -> Self {
        RunConfig {
            mode,
            transform,
            pivot,
            delta: DEFAULT_DELTA,
            max_iters: None,
            seed: 0,
            trace_cadence: None,
            observe: Observables::default(),
        }
    }

    pub fn k(&self) -> usize {
        self.pivot.k()
    }

    /// Checks the configuration against an order-`n` problem.
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        let k = self.k();
        if k < 2 {
            return Err(Error::Config(format!("pivot size must be at least 2, got {k}")));
        }
        if n < 2 {
            return Err(Error::Dimension(format!("order must be at least 2, got {n}")));
        }
        if k > n {
            return Err(Error::Config(format!("pivot size {k} exceeds the order {n}")));
        }
        if self.max_iters == Some(0) {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.trace_cadence == Some(0) {
            return Err(Error::Config("trace cadence must be at least 1".into()));
        }
        if self.transform.pair_rule.is_some() && k != 2 {
            return Err(Error::Config(format!("pair rules need k = 2, got k = {k}")));
        }
        Ok(())
    }

    pub fn cadence(&self, n: usize) -> usize {
        self.trace_cadence.unwrap_or_else(|| sweep_length(n, self.k()))
    }
}

/// `⌈n(n−1)/(k(k−1))⌉`, the number of iterations in one expected sweep.
pub fn sweep_length(n: usize, k: usize) -> usize {
    let num = n * (n - 1);
    let den = k * (k - 1);
    num.div_ceil(den).max(1)
}

/// `⌈n(n−1)/(k(k−1)) · ln(4n·κ̂/δ²)⌉`.
pub fn iteration_budget(n: usize, k: usize, kappa_hat: f64, delta: f64) -> Result<usize> {
    if !(k >= 2 && n >= k) {
        return Err(Error::Config(format!("need n >= k >= 2, got n = {n}, k = {k}")));
    }
    if !(delta > 0.0 && delta < 1.0) || !(kappa_hat >= 1.0) || !kappa_hat.is_finite() {
        return Err(Error::Config(format!(
            "need delta in (0, 1) and kappa_hat >= 1, got {delta}, {kappa_hat}"
        )));
    }
    let ratio = (n * (n - 1)) as f64 / (k * (k - 1)) as f64;
    let log = (4.0 * n as f64 * kappa_hat / (delta * delta)).ln();
    Ok((ratio * log).ceil() as usize)
}

/// `off(B̂) ≤ δ²`. A matrix that cannot be normalized never passes.
pub fn stopping_check(b: &SymmetricMatrix, delta: f64) -> bool {
    off_hat(b).is_ok_and(|off| off <= delta * delta)
}

/// One row of the trace. The optional fields are filled only at cadence
/// points (including `t = 0` and the final iteration).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: usize,
    /// Pivot used to reach this state; `None` at `t = 0`.
    pub pivot: Option<PivotSet>,
    /// The local factorization broke down and the iteration was skipped.
    pub skipped: bool,
    pub gamma: Option<f64>,
    pub off_hat: Option<f64>,
    pub kappa_hat: Option<f64>,
    /// `dist₂` between the reconstructed and the original Gram matrix.
    pub dist2_drift: Option<f64>,
    pub reconstruction_residual: Option<f64>,
}

impl TraceRecord {
    fn bare(t: usize, pivot: Option<PivotSet>, skipped: bool) -> Self {
        TraceRecord {
            t,
            pivot,
            skipped,
            gamma: None,
            off_hat: None,
            kappa_hat: None,
            dist2_drift: None,
            reconstruction_residual: None,
        }
    }

    pub fn is_sampled(&self) -> bool {
        self.off_hat.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub iters_used: usize,
    pub converged: bool,
    pub off_hat: f64,
    pub gamma: Option<f64>,
    pub residual: Option<f64>,
    /// Supremum of κ̂ over the sampled states.
    pub sup_kappa_hat: Option<f64>,
    /// `‖B − T_accᵀ·D′·T_acc‖_F / ‖B‖_F` with `D′ = diag(D)`; two-sided only.
    pub diagonal_residual: Option<f64>,
    pub skipped: usize,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub mode: Mode,
    /// `Q = A⁽ᵗ⁾` (one-sided) or `D = B⁽ᵗ⁾` (two-sided).
    pub factor: Matrix,
    pub t_acc: Matrix,
    /// `diag(D)`, two-sided only.
    pub d_prime: Option<Vec<f64>>,
    pub iters_used: usize,
    pub converged: bool,
    pub trace: Vec<TraceRecord>,
    pub summary: Summary,
}

/// Outcome of a single iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub pivot: PivotSet,
    /// `None` if the update was applied, else the breakdown reason.
    pub skipped: Option<String>,
}

/// A state that can be advanced one pivot at a time.
pub trait Engine {
    fn n(&self) -> usize;
    fn step(&mut self) -> Result<StepOutcome>;
    /// Current `B⁽ᵗ⁾`, or `A⁽ᵗ⁾ᵀA⁽ᵗ⁾` computed fresh.
    fn gram(&self) -> SymmetricMatrix;
    fn t_acc(&self) -> &Matrix;
    /// Relative reconstruction residual and `dist₂` drift of the reconstructed Gram.
    fn reconstruction(&self) -> Result<(f64, f64)>;
}

/// Builds the local transform; a breakdown becomes `Err(reason)` in the inner result.
fn build_local(spec: &TransformSpec, block: &SymmetricMatrix) -> Result<std::result::Result<LocalTransform, String>> {
    match spec.build(block) {
        Ok(t) => Ok(Ok(t)),
        Err(Error::LocalBreakdown { reason, .. }) => Ok(Err(reason)),
        Err(e) => Err(e),
    }
}

/// Column-operation engine: `A_J ← A_J·S`.
#[derive(Clone, Debug)]
pub struct OneSidedEngine {
    original: Matrix,
    a: Matrix,
    t_acc: Matrix,
    rule: PivotRule,
    transform: TransformSpec,
}

impl OneSidedEngine {
    /// Validates `A` (`d ≥ n ≥ 2`, nonzero columns, numerically full rank).
    pub fn new(a: &Matrix, cfg: &RunConfig) -> Result<Self> {
        let (d, n) = a.shape();
        cfg.validate(n)?;
        if d < n {
            return Err(Error::Dimension(format!("one-sided mode needs d >= n, got {d}x{n}")));
        }
        if !a.all_finite() {
            return Err(Error::Config("input has non-finite entries".into()));
        }
        householder_qr(&a.normalize_columns()?)?;
        Ok(OneSidedEngine {
            original: a.clone(),
            a: a.clone(),
            t_acc: Matrix::identity(n),
            rule: cfg.pivot.build(cfg.seed),
            transform: cfg.transform,
        })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn into_parts(self) -> (Matrix, Matrix) {
        (self.a, self.t_acc)
    }
}

impl Engine for OneSidedEngine {
    fn n(&self) -> usize {
        self.a.cols()
    }

    fn step(&mut self) -> Result<StepOutcome> {
        let n = self.n();
        let pivot = if self.rule.needs_gram() {
            let g = self.a.gram();
            self.rule.next_pivot(Some(&g), n)?
        } else {
            self.rule.next_pivot(None, n)?
        };
        let block = extract_columns(&self.a, &pivot)?.gram();
        let local = match build_local(&self.transform, &block)? {
            Ok(local) => local,
            Err(reason) => {
                return Ok(StepOutcome {
                    pivot,
                    skipped: Some(reason),
                })
            }
        };
        apply_one_sided_update(&mut self.a, &pivot, &local.s)?;
        accumulate_transform(&mut self.t_acc, &pivot, &local.s, local.structure())?;
        Ok(StepOutcome { pivot, skipped: None })
    }

    fn gram(&self) -> SymmetricMatrix {
        self.a.gram()
    }

    fn t_acc(&self) -> &Matrix {
        &self.t_acc
    }

    fn reconstruction(&self) -> Result<(f64, f64)> {
        let rebuilt = self.a.matmul(&self.t_acc)?;
        let residual = self.original.sub(&rebuilt)?.frobenius_norm() / self.original.frobenius_norm();
        let drift = dist_two(&self.original.gram(), &rebuilt.gram())?;
        Ok((residual, drift))
    }
}

/// Congruence engine: `B ← Eᵀ·B·E`.
#[derive(Clone, Debug)]
pub struct TwoSidedEngine {
    original: SymmetricMatrix,
    b: SymmetricMatrix,
    t_acc: Matrix,
    rule: PivotRule,
    transform: TransformSpec,
}

impl TwoSidedEngine {
    /// Validates that `B` is symmetric positive definite.
    pub fn new(b: &SymmetricMatrix, cfg: &RunConfig) -> Result<Self> {
        let n = b.n();
        cfg.validate(n)?;
        if !b.as_matrix().all_finite() {
            return Err(Error::Config("input has non-finite entries".into()));
        }
        let hat = diagonal_normalize(b)?;
        cholesky_lower(&hat)?;
        Ok(TwoSidedEngine {
            original: b.clone(),
            b: b.clone(),
            t_acc: Matrix::identity(n),
            rule: cfg.pivot.build(cfg.seed),
            transform: cfg.transform,
        })
    }

    pub fn b(&self) -> &SymmetricMatrix {
        &self.b
    }

    pub fn into_parts(self) -> (SymmetricMatrix, Matrix) {
        (self.b, self.t_acc)
    }
}

impl Engine for TwoSidedEngine {
    fn n(&self) -> usize {
        self.b.n()
    }

    fn step(&mut self) -> Result<StepOutcome> {
        let n = self.n();
        let pivot = self.rule.next_pivot(Some(&self.b), n)?;
        let block = extract_principal_submatrix(&self.b, &pivot)?;
        let local = match build_local(&self.transform, &block)? {
            Ok(local) => local,
            Err(reason) => {
                return Ok(StepOutcome {
                    pivot,
                    skipped: Some(reason),
                })
            }
        };
        apply_two_sided_update(&mut self.b, &pivot, &local.s)?;
        accumulate_transform(&mut self.t_acc, &pivot, &local.s, local.structure())?;
        Ok(StepOutcome { pivot, skipped: None })
    }

    fn gram(&self) -> SymmetricMatrix {
        self.b.clone()
    }

    fn t_acc(&self) -> &Matrix {
        &self.t_acc
    }

    fn reconstruction(&self) -> Result<(f64, f64)> {
        let rebuilt = self.b.congruence(&self.t_acc)?;
        let residual = self.original.as_matrix().sub(rebuilt.as_matrix())?.frobenius_norm()
            / self.original.frobenius_norm();
        let drift = dist_two(&self.original, &rebuilt)?;
        Ok((residual, drift))
    }
}

/// Fills the cadenced fields of `rec`; returns off̂.
fn sample<E: Engine>(engine: &E, observe: &Observables, rec: &mut TraceRecord) -> Result<f64> {
    let g = engine.gram();
    let hat = diagonal_normalize(&g)?;
    let off = off_frobenius(&hat);
    rec.off_hat = Some(off);
    if observe.gamma {
        rec.gamma = gamma(&g).ok();
    }
    if observe.kappa_hat {
        rec.kappa_hat = kappa_hat(&g).ok().map(|(k, _)| k);
    }
    if observe.reconstruction {
        let (residual, drift) = engine.reconstruction()?;
        rec.reconstruction_residual = Some(residual);
        rec.dist2_drift = Some(drift);
    }
    Ok(off)
}

struct Progress {
    trace: Vec<TraceRecord>,
    iters_used: usize,
    converged: bool,
    skipped: usize,
}

fn drive<E: Engine>(engine: &mut E, cfg: &RunConfig) -> Result<Progress> {
    let n = engine.n();
    let threshold = cfg.delta * cfg.delta;
    let max_iters = match cfg.max_iters {
        Some(m) => m,
        None => {
            let (kh, _) = kappa_hat(&engine.gram())?;
            iteration_budget(n, cfg.k(), kh.max(1.0), cfg.delta)?
        }
    };
    let cadence = cfg.cadence(n);

    let mut trace = Vec::new();
    let mut first = TraceRecord::bare(0, None, false);
    let converged_at_start = sample(engine, &cfg.observe, &mut first)? <= threshold;
    trace.push(first);
    if converged_at_start {
        return Ok(Progress {
            trace,
            iters_used: 0,
            converged: true,
            skipped: 0,
        });
    }

    let mut converged = false;
    let mut skipped = 0;
    let mut consecutive = 0;
    let mut t = 0;
    while t < max_iters {
        let outcome = engine.step()?;
        t += 1;
        let was_skipped = outcome.skipped.is_some();
        if let Some(reason) = outcome.skipped {
            skipped += 1;
            consecutive += 1;
            if consecutive >= n {
                return Err(Error::LocalBreakdown {
                    pivot: outcome.pivot.indices().to_vec(),
                    reason: format!("{reason} ({consecutive} consecutive skipped iterations)"),
                });
            }
        } else {
            consecutive = 0;
        }
        let mut rec = TraceRecord::bare(t, Some(outcome.pivot), was_skipped);
        if t % cadence == 0 || t == max_iters {
            converged = sample(engine, &cfg.observe, &mut rec)? <= threshold;
        }
        trace.push(rec);
        if converged {
            break;
        }
    }
    Ok(Progress {
        trace,
        iters_used: t,
        converged,
        skipped,
    })
}

fn summarize(progress: &Progress, diagonal_residual: Option<f64>) -> Summary {
    let last = progress
        .trace
        .iter()
        .rev()
        .find(|r| r.is_sampled())
        .expect("the initial state is always sampled");
    let sup_kappa_hat = progress
        .trace
        .iter()
        .filter_map(|r| r.kappa_hat)
        .reduce(f64::max);
    Summary {
        iters_used: progress.iters_used,
        converged: progress.converged,
        off_hat: last.off_hat.unwrap_or(f64::NAN),
        gamma: last.gamma,
        residual: last.reconstruction_residual,
        sup_kappa_hat,
        diagonal_residual,
        skipped: progress.skipped,
    }
}

/// Orthogonalizes the columns of `A` (`d ≥ n`), returning `Q` and `T_acc` with `A = Q·T_acc`.
pub fn run_one_sided(a: &Matrix, cfg: &RunConfig) -> Result<RunResult> {
    let mut engine = OneSidedEngine::new(a, cfg)?;
    let progress = drive(&mut engine, cfg)?;
    let summary = summarize(&progress, None);
    let (q, t_acc) = engine.into_parts();
    Ok(RunResult {
        mode: Mode::OneSided,
        factor: q,
        t_acc,
        d_prime: None,
        iters_used: progress.iters_used,
        converged: progress.converged,
        trace: progress.trace,
        summary,
    })
}

/// Diagonalizes SPD `B` by congruence, returning `D` and `T_acc` with `B = T_accᵀ·D·T_acc`.
pub fn run_two_sided(b: &SymmetricMatrix, cfg: &RunConfig) -> Result<RunResult> {
    let mut engine = TwoSidedEngine::new(b, cfg)?;
    let progress = drive(&mut engine, cfg)?;
    let (d, t_acc) = engine.into_parts();
    let d_prime = d.diagonal();
    let approx = SymmetricMatrix::from_diagonal(&d_prime).congruence(&t_acc)?;
    let diagonal_residual = b.as_matrix().sub(approx.as_matrix())?.frobenius_norm() / b.frobenius_norm();
    let summary = summarize(&progress, Some(diagonal_residual));
    Ok(RunResult {
        mode: Mode::TwoSided,
        factor: d.into_matrix(),
        t_acc,
        d_prime: Some(d_prime),
        iters_used: progress.iters_used,
        converged: progress.converged,
        trace: progress.trace,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfactor::{FactorizationKind, PairRule};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn cfg(mode: Mode, kind: FactorizationKind, pivot: PivotRuleSpec) -> RunConfig {
        RunConfig::new(mode, TransformSpec::kind(kind), pivot)
    }

    fn spd4() -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&[
            &[4.0, 1.0, 0.5, 0.2],
            &[1.0, 3.0, 0.9, 0.1],
            &[0.5, 0.9, 2.0, 0.7],
            &[0.2, 0.1, 0.7, 5.0],
        ])
    }

    #[test]
    fn orthogonal_columns_converge_immediately() {
        let a = Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 3.0], &[0.0, 0.0]]);
        let c = cfg(Mode::OneSided, FactorizationKind::UpperTriangular, PivotRuleSpec::Random { k: 2 });
        let r = run_one_sided(&a, &c).unwrap();
        assert!(r.converged);
        assert_eq!(r.iters_used, 0);
        assert_eq!(r.factor, a);
        assert_eq!(r.t_acc, Matrix::identity(2));
    }

    #[test]
    fn two_column_qr() {
        let h = FRAC_1_SQRT_2;
        let a = Matrix::from_rows(&[&[1.0, h], &[0.0, h]]);
        let c = cfg(Mode::OneSided, FactorizationKind::UpperTriangular, PivotRuleSpec::Random { k: 2 });
        let r = run_one_sided(&a, &c).unwrap();
        assert!(r.converged);
        assert_eq!(r.iters_used, 1);
        assert!(r.factor.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-15);
        let expect_r = Matrix::from_rows(&[&[1.0, h], &[0.0, h]]);
        assert!(r.t_acc.sub(&expect_r).unwrap().max_abs() < 1e-15);
        assert_eq!(r.t_acc[(1, 0)], 0.0);
    }

    #[test]
    fn diagonal_input_converges_immediately() {
        let b = SymmetricMatrix::from_diagonal(&[1.0, 4.0, 9.0]);
        let c = cfg(Mode::TwoSided, FactorizationKind::Unitary, PivotRuleSpec::Random { k: 2 });
        let r = run_two_sided(&b, &c).unwrap();
        assert!(r.converged);
        assert_eq!(r.iters_used, 0);
        assert_eq!(r.factor, b.as_matrix().clone());
        assert_eq!(r.t_acc, Matrix::identity(3));
        assert_eq!(r.summary.diagonal_residual, Some(0.0));
    }

    #[test]
    fn two_by_two_eigenproblem() {
        let b = SymmetricMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let c = cfg(Mode::TwoSided, FactorizationKind::Unitary, PivotRuleSpec::Random { k: 2 });
        let r = run_two_sided(&b, &c).unwrap();
        assert!(r.converged);
        let d = r.d_prime.unwrap();
        assert!((d[0] - 3.0).abs() < 1e-14 && (d[1] - 1.0).abs() < 1e-14);
        let ortho = r.t_acc.t_matmul(&r.t_acc).unwrap().sub(&Matrix::identity(2)).unwrap();
        assert!(ortho.max_abs() < 1e-15);
    }

    #[test]
    fn every_kind_reconstructs_and_converges() {
        let b = spd4();
        for kind in FactorizationKind::ALL {
            let mut c = cfg(Mode::TwoSided, kind, PivotRuleSpec::Random { k: 2 });
            c.seed = 3;
            let r = run_two_sided(&b, &c).unwrap();
            assert!(r.converged, "{kind:?}");
            assert!(r.summary.off_hat <= 1e-16);
            assert!(r.summary.residual.unwrap() <= 100.0 * 4.0 * f64::EPSILON, "{kind:?}");
            assert!(r.summary.diagonal_residual.unwrap() <= 1e-7, "{kind:?}");
            match kind {
                FactorizationKind::UpperTriangular | FactorizationKind::UnitUpper => {
                    assert_eq!(r.t_acc.max_abs_below_diagonal(), 0.0)
                }
                FactorizationKind::LowerTriangular => assert_eq!(r.t_acc.max_abs_above_diagonal(), 0.0),
                _ => {}
            }
            if kind == FactorizationKind::UnitUpper {
                assert!(r.t_acc.diagonal().iter().all(|&d| d == 1.0));
            }
        }
    }

    #[test]
    fn trace_cadence_layout() {
        let b = spd4();
        let mut c = cfg(Mode::TwoSided, FactorizationKind::Unitary, PivotRuleSpec::Random { k: 2 });
        c.trace_cadence = Some(4);
        c.max_iters = Some(10);
        c.delta = 1e-15;
        let r = run_two_sided(&b, &c).unwrap();
        let sampled: Vec<usize> = r.trace.iter().filter(|t| t.is_sampled()).map(|t| t.t).collect();
        if r.converged {
            assert_eq!(*sampled.last().unwrap(), r.iters_used);
        } else {
            assert_eq!(sampled, vec![0, 4, 8, 10]);
        }
        for (i, rec) in r.trace.iter().enumerate() {
            assert_eq!(rec.t, i);
        }
    }

    #[test]
    fn budget_exhaustion_is_not_an_error() {
        let c = RunConfig {
            max_iters: Some(1),
            ..cfg(Mode::TwoSided, FactorizationKind::Unitary, PivotRuleSpec::Random { k: 2 })
        };
        let r = run_two_sided(&spd4(), &c).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iters_used, 1);
        assert_eq!(r.trace.len(), 2);
        assert!(r.trace[1].is_sampled());
    }

    #[test]
    fn same_config_same_trace() {
        let mut c = cfg(Mode::TwoSided, FactorizationKind::General, PivotRuleSpec::Random { k: 3 });
        c.seed = 11;
        let a = run_two_sided(&spd4(), &c).unwrap();
        let b = run_two_sided(&spd4(), &c).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.t_acc, b.t_acc);
    }

    #[test]
    fn invalid_inputs() {
        let c = cfg(Mode::TwoSided, FactorizationKind::Unitary, PivotRuleSpec::Random { k: 2 });
        let indef = SymmetricMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(run_two_sided(&indef, &c), Err(Error::NotPositiveDefinite { .. })));
        let c1 = cfg(Mode::OneSided, FactorizationKind::Unitary, PivotRuleSpec::Random { k: 2 });
        let dep = Matrix::from_rows(&[&[1.0, 2.0], &[1.0, 2.0], &[0.0, 0.0]]);
        assert_eq!(run_one_sided(&dep, &c1).unwrap_err(), Error::RankDeficient);
        let wide = Matrix::from_rows(&[&[1.0, 0.0, 1.0], &[0.0, 1.0, 1.0]]);
        assert!(matches!(run_one_sided(&wide, &c1), Err(Error::Dimension(_))));
        let zero = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(run_one_sided(&zero, &c1).unwrap_err(), Error::ZeroColumn(1));

        let bad_delta = RunConfig { delta: 1.0, ..c.clone() };
        assert!(bad_delta.validate(4).is_err());
        let big_k = cfg(Mode::TwoSided, FactorizationKind::Unitary, PivotRuleSpec::Random { k: 5 });
        assert!(big_k.validate(4).is_err());
        let mut rule_k3 = RunConfig::new(
            Mode::TwoSided,
            TransformSpec::rule(PairRule::Nsvd2),
            PivotRuleSpec::Random { k: 3 },
        );
        assert!(rule_k3.validate(4).is_err());
        rule_k3.pivot = PivotRuleSpec::Random { k: 2 };
        assert!(rule_k3.validate(4).is_ok());
    }

    #[test]
    fn stopping_check_examples() {
        assert!(stopping_check(&SymmetricMatrix::from_diagonal(&[3.0, 0.1]), 1e-300));
        let delta = 0.25;
        let b = SymmetricMatrix::from_rows(&[&[1.0, delta], &[delta, 1.0]]);
        assert!(!stopping_check(&b, delta));
        assert!(stopping_check(&b, 2f64.sqrt() * delta));
    }

    #[test]
    fn budget_examples() {
        let n = 6;
        let expect = (4.0 * 6.0 * 3.0 / 0.01f64).ln().ceil() as usize;
        assert_eq!(iteration_budget(n, n, 3.0, 0.1).unwrap(), expect);
        // 190 · ln(4·20·10/0.01) = 190 · ln(80000)
        let direct = (190.0 * 80_000f64.ln()).ceil() as usize;
        assert_eq!(direct, 2146);
        assert_eq!(iteration_budget(20, 2, 10.0, 0.1).unwrap(), 2146);
        for n in [4usize, 9, 30] {
            for kh in [1.0, 10.0, 1e4] {
                let per_k: Vec<usize> = (2..=4).map(|k| iteration_budget(n, k, kh, 1e-3).unwrap()).collect();
                assert!(per_k.windows(2).all(|w| w[0] >= w[1]));
            }
            let per_kh: Vec<usize> = [1.0, 10.0, 1e4]
                .iter()
                .map(|&kh| iteration_budget(n, 2, kh, 1e-3).unwrap())
                .collect();
            assert!(per_kh.windows(2).all(|w| w[0] <= w[1]));
        }
        assert!(iteration_budget(3, 4, 1.0, 0.1).is_err());
        assert!(iteration_budget(3, 2, 0.5, 0.1).is_err());
    }

    #[test]
    fn sweep_length_values() {
        assert_eq!(sweep_length(50, 2), 1225);
        assert_eq!(sweep_length(4, 3), 2);
        assert_eq!(sweep_length(3, 3), 1);
    }

    #[test]
    fn mode_round_trip() {
        for m in [Mode::OneSided, Mode::TwoSided] {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
        assert!("both".parse::<Mode>().is_err());
    }
}
