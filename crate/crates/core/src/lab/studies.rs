//! Multi-trial studies. Each trial draws its matrix and pivots from its own
//! seed, so results are identical under either executor.

use serde::Serialize;

use super::exec::map_trials;
use super::oracles::contraction;
use super::{Problem, StudyConfig};
use crate::driver::{iteration_budget, Engine, Mode};
use crate::error::{Error, Result};
use crate::localfactor::FactorizationKind;
use crate::matcore::dense::{spectral_norm, sym_eigen_jacobi};
use crate::matcore::{Matrix, SymmetricMatrix};
use crate::metrics::{dist_two, gamma, kappa_hat, subspace_distance};

/// `0, every, 2·every, …` up to and including `horizon`.
fn sample_points(horizon: usize, every: usize) -> Vec<usize> {
    let mut pts: Vec<usize> = (0..=horizon).step_by(every).collect();
    if pts.last() != Some(&horizon) {
        pts.push(horizon);
    }
    pts
}

/// Runs `engine` forward, calling `observe(t, engine)` at each sample point.
fn walk<E: Engine, F: FnMut(usize, &E) -> Result<()>>(engine: &mut E, points: &[usize], mut observe: F) -> Result<()> {
    let mut t = 0;
    for &p in points {
        while t < p {
            engine.step()?;
            t += 1;
        }
        observe(t, engine)?;
    }
    Ok(())
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub t: usize,
    /// Mean over trials of Γ⁽ᵗ⁾/Γ⁽⁰⁾.
    pub mean_ratio: f64,
    pub std_err: f64,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
    /// `(1 − k(k−1)/(n(n−1)))ᵗ`.
    pub predicted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Per-trial ratios, indexed `[trial][sample]`, aligned with `rows`.
    #[serde(skip)]
    pub per_trial: Vec<Vec<f64>>,
}

impl ConvergenceTable {
    /// Largest `max(mean/predicted, predicted/mean)` over the rows.
    pub fn worst_factor(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.mean_ratio / r.predicted).max(r.predicted / r.mean_ratio))
            .fold(1.0, f64::max)
    }
}

/// Mean decay of Γ⁽ᵗ⁾/Γ⁽⁰⁾ against the expected rate. Defaults: horizon
/// `3n²`, about 300 samples.
pub fn convergence_study(cfg: &StudyConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let n = cfg.family.n();
    let k = cfg.pivot.k();
    let horizon = cfg.horizon.unwrap_or(3 * n * n);
    let every = cfg.sample_every.unwrap_or((horizon / 300).max(1));
    let points = sample_points(horizon, every);

    let per_trial = map_trials(cfg.exec, cfg.trials, |trial| {
        let problem = cfg.family.sample(cfg.trial_seed(trial))?;
        let mut engine = problem.engine(&cfg.run_config(trial))?;
        let g0 = gamma(&engine.gram())?;
        let mut ratios = Vec::with_capacity(points.len());
        walk(&mut engine, &points, |_, e| {
            let g = gamma(&e.gram())?;
            ratios.push(if g0 > 0.0 { g / g0 } else { 0.0 });
            Ok(())
        })?;
        Ok(ratios)
    })?;

    let c = contraction(n, k);
    let rows = points
        .iter()
        .enumerate()
        .map(|(s, &t)| {
            let mut col: Vec<f64> = per_trial.iter().map(|r| r[s]).collect();
            let (mean, se) = mean_and_stderr(&col);
            col.sort_by(f64::total_cmp);
            ConvergenceRow {
                t,
                mean_ratio: mean,
                std_err: se,
                q10: quantile(&col, 0.1),
                median: quantile(&col, 0.5),
                q90: quantile(&col, 0.9),
                predicted: c.powi(t as i32),
            }
        })
        .collect();
    Ok(ConvergenceTable {
        n,
        k,
        trials: cfg.trials,
        rows,
        per_trial,
    })
}

/// Martingale bookkeeping of one trial at its sample points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MartingaleTrace {
    pub t: Vec<usize>,
    /// `X = Γ(after)/Γ(before)` between consecutive sample points.
    pub ratios: Vec<f64>,
    /// `Y_{0,t} = Π X = Γ⁽ᵗ⁾/Γ⁽⁰⁾`.
    pub cumulative: Vec<f64>,
    /// `C_{n,k}^{−t}·Y_{0,t}`.
    pub scaled: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MartingaleRow {
    pub t: usize,
    /// Mean of the scaled process over trials.
    pub mean: f64,
    pub std_err: f64,
    /// `(mean − 1)/std_err`, zero when the standard error vanishes.
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MartingaleReport {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub rows: Vec<MartingaleRow>,
    #[serde(skip)]
    pub traces: Vec<MartingaleTrace>,
}

impl MartingaleReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }
}

/// Empirical mean of `C_{n,k}^{−t}·Γ⁽ᵗ⁾/Γ⁽⁰⁾`. Defaults: horizon 200, every iteration.
pub fn martingale_study(cfg: &StudyConfig) -> Result<MartingaleReport> {
    cfg.validate()?;
    let n = cfg.family.n();
    let k = cfg.pivot.k();
    let horizon = cfg.horizon.unwrap_or(200);
    let every = cfg.sample_every.unwrap_or(1);
    let points = sample_points(horizon, every);
    let c = contraction(n, k);

    let traces = map_trials(cfg.exec, cfg.trials, |trial| {
        let problem = cfg.family.sample(cfg.trial_seed(trial))?;
        let mut engine = problem.engine(&cfg.run_config(trial))?;
        let g0 = gamma(&engine.gram())?;
        let mut trace = MartingaleTrace {
            t: Vec::with_capacity(points.len()),
            ratios: Vec::with_capacity(points.len()),
            cumulative: Vec::with_capacity(points.len()),
            scaled: Vec::with_capacity(points.len()),
        };
        let mut prev = g0;
        walk(&mut engine, &points, |t, e| {
            let g = if t == 0 { g0 } else { gamma(&e.gram())? };
            let x = if prev > 0.0 { g / prev } else { 0.0 };
            let y = if g0 > 0.0 { g / g0 } else { 0.0 };
            trace.t.push(t);
            trace.ratios.push(x);
            trace.cumulative.push(y);
            trace.scaled.push(y / c.powi(t as i32));
            prev = g;
            Ok(())
        })?;
        Ok(trace)
    })?;

    let rows = points
        .iter()
        .enumerate()
        .map(|(s, &t)| {
            let col: Vec<f64> = traces.iter().map(|tr| tr.scaled[s]).collect();
            let (mean, se) = mean_and_stderr(&col);
            let z = if se > 0.0 { (mean - 1.0) / se } else { 0.0 };
            MartingaleRow { t, mean, std_err: se, z }
        })
        .collect();
    Ok(MartingaleReport {
        n,
        k,
        trials: cfg.trials,
        rows,
        traces,
    })
}

/// `⌈n²·ln(n·κ̂/δ)⌉`: the iteration count after which κ̂ stays bounded and
/// `B̂` is `δ`-close to the identity, with the unspecified constant set to one.
pub fn stability_horizon(n: usize, kappa_hat: f64, delta: f64) -> usize {
    let n_f = n as f64;
    (n_f * n_f * (n_f * kappa_hat / delta).ln()).ceil().max(1.0) as usize
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityRow {
    pub trial: usize,
    pub seed: u64,
    pub iters: usize,
    /// κ̂ of the input.
    pub kappa_hat: f64,
    /// Largest κ̂ over the sampled iterates.
    pub sup_kappa_hat: f64,
    /// `n³·κ̂(B) + 3n`.
    pub bound: f64,
    pub violated: bool,
    /// `dist₂(B̂⁽ᵗ⁾, I)` at the last iteration.
    pub final_dist2: f64,
    /// `max_j |λ_j − λ̃_j|/λ_j` against the reference eigensolver, for the
    /// unitary two-sided kind only.
    pub eig_rel_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub n: usize,
    pub rows: Vec<StabilityRow>,
    pub violations: usize,
}

impl StabilityReport {
    pub fn violation_fraction(&self) -> f64 {
        self.violations as f64 / self.rows.len() as f64
    }

    /// Fraction of trials with final `dist₂(B̂, I) ≤ threshold`.
    pub fn dist2_pass_fraction(&self, threshold: f64) -> f64 {
        let ok = self.rows.iter().filter(|r| r.final_dist2 <= threshold).count();
        ok as f64 / self.rows.len() as f64
    }
}

/// Eigenvalues of SPD `B`, descending, from the cyclic Jacobi method run to
/// full relative accuracy.
pub fn reference_eigenvalues(b: &SymmetricMatrix) -> Vec<f64> {
    sym_eigen_jacobi(b, f64::EPSILON).sorted_values_desc()
}

/// Sup of κ̂ along the run, final distance to the identity, and eigenvalue
/// accuracy. Defaults: horizon from [`stability_horizon`], κ̂ sampled every
/// `n` iterations.
pub fn stability_study(cfg: &StudyConfig) -> Result<StabilityReport> {
    cfg.validate()?;
    let n = cfg.family.n();
    let every = cfg.sample_every.unwrap_or(n);
    let rows = map_trials(cfg.exec, cfg.trials, |trial| {
        let seed = cfg.trial_seed(trial);
        let problem = cfg.family.sample(seed)?;
        let b0 = problem.gram();
        let (kh0, _) = kappa_hat(&b0)?;
        let horizon = cfg.horizon.unwrap_or_else(|| stability_horizon(n, kh0, cfg.delta));
        let points = sample_points(horizon, every);
        let mut engine = problem.engine(&cfg.run_config(trial))?;
        let mut sup = kh0;
        walk(&mut engine, &points, |_, e| {
            if let Ok((k, _)) = kappa_hat(&e.gram()) {
                sup = sup.max(k);
            } else {
                sup = f64::INFINITY;
            }
            Ok(())
        })?;
        let last = engine.gram();
        let final_dist2 = dist_two(&last, &SymmetricMatrix::identity(n))?;
        let eig_rel_error = if cfg.mode == Mode::TwoSided
            && cfg.transform.kind == FactorizationKind::Unitary
            && cfg.transform.pair_rule.is_none()
        {
            let exact = reference_eigenvalues(&b0);
            let mut approx = last.diagonal();
            approx.sort_by(|a, b| b.total_cmp(a));
            Some(
                exact
                    .iter()
                    .zip(&approx)
                    .map(|(l, a)| ((l - a) / l).abs())
                    .fold(0.0, f64::max),
            )
        } else {
            None
        };
        let n_f = n as f64;
        let bound = n_f.powi(3) * kh0 + 3.0 * n_f;
        Ok(StabilityRow {
            trial,
            seed,
            iters: horizon,
            kappa_hat: kh0,
            sup_kappa_hat: sup,
            bound,
            violated: !(sup <= bound),
            final_dist2,
            eig_rel_error,
        })
    })?;
    let violations = rows.iter().filter(|r| r.violated).count();
    Ok(StabilityReport { n, rows, violations })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthoRow {
    pub trial: usize,
    pub seed: u64,
    pub iters: usize,
    /// `‖QᵀQ − I‖₂`.
    pub orthogonality: f64,
    /// `dist(col(Q), col(A))`.
    pub subspace: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthoReport {
    pub delta: f64,
    pub rows: Vec<OrthoRow>,
    pub failures: usize,
}

impl OrthoReport {
    pub fn failure_fraction(&self) -> f64 {
        self.failures as f64 / self.rows.len() as f64
    }
}

/// Runs each trial for `iteration_budget(n, k, κ̂(AᵀA), δ)` iterations (or
/// the configured horizon) and checks `‖QᵀQ − I‖₂ ≤ 3√δ` and
/// `dist(col(Q), col(A)) ≤ δ`. Kinds that only orthogonalize have their
/// columns normalized before the check.
pub fn orthogonalization_acceptance(cfg: &StudyConfig, delta: f64) -> Result<OrthoReport> {
    if cfg.mode != Mode::OneSided {
        return Err(Error::Config("the orthogonalization study runs in one-sided mode".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta must lie in (0, 1), got {delta}")));
    }
    cfg.validate()?;
    let n = cfg.family.n();
    let k = cfg.pivot.k();
    let rows = map_trials(cfg.exec, cfg.trials, |trial| {
        let seed = cfg.trial_seed(trial);
        let a = cfg.family.sample(seed)?.columns()?;
        let (kh, _) = kappa_hat(&a.gram())?;
        let iters = match cfg.horizon {
            Some(h) => h,
            None => iteration_budget(n, k, kh.max(1.0), delta)?,
        };
        let mut engine = Problem::Columns(a.clone()).engine(&cfg.run_config(trial))?;
        walk(&mut engine, &[iters], |_, _| Ok(()))?;
        let crate::lab::AnyEngine::OneSided(engine) = engine else {
            unreachable!("mode checked above")
        };
        let mut q = engine.a().clone();
        if !cfg.transform.kind.normalizes() {
            q = q.normalize_columns()?;
        }
        let orthogonality = spectral_norm(&q.t_matmul(&q)?.sub(&Matrix::identity(n))?);
        let subspace = subspace_distance(&a, &q)?;
        Ok(OrthoRow {
            trial,
            seed,
            iters,
            orthogonality,
            subspace,
            passed: orthogonality <= 3.0 * delta.sqrt() && subspace <= delta,
        })
    })?;
    let failures = rows.iter().filter(|r| !r.passed).count();
    Ok(OrthoReport { delta, rows, failures })
}
