//! Verification experiments: matrix generators, brute-force oracles for the
//! one-step identities, and seeded multi-trial studies.

pub mod exec;
pub mod gen;
pub mod oracles;
pub mod studies;
pub mod suites;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::driver::{Engine, Mode, Observables, OneSidedEngine, RunConfig, StepOutcome, TwoSidedEngine};
use crate::error::{Error, Result};
use crate::localfactor::TransformSpec;
use crate::matcore::dense::cholesky_lower;
use crate::matcore::{Matrix, SymmetricMatrix};
use crate::pivoting::PivotRuleSpec;

pub use exec::{map_trials, Exec};
pub use gen::{gen_graded, gen_haar_columns, gen_orthogonal, gen_spd_kappahat, hilbert};
pub use oracles::{contraction, deterministic_update_check, expected_update_oracle, ExpectedUpdate};
pub use studies::{
    convergence_study, martingale_study, orthogonalization_acceptance, stability_horizon, stability_study,
    ConvergenceRow, ConvergenceTable, MartingaleReport, MartingaleRow, MartingaleTrace, OrthoReport, OrthoRow,
    StabilityReport, StabilityRow,
};

/// Input of a single run: columns for the one-sided engine or a symmetric
/// matrix for the two-sided one. Either converts to the other.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    Columns(Matrix),
    Symmetric(SymmetricMatrix),
}

impl Problem {
    pub fn n(&self) -> usize {
        match self {
            Problem::Columns(a) => a.cols(),
            Problem::Symmetric(b) => b.n(),
        }
    }

    /// `AᵀA`, or `B` itself.
    pub fn gram(&self) -> SymmetricMatrix {
        match self {
            Problem::Columns(a) => a.gram(),
            Problem::Symmetric(b) => b.clone(),
        }
    }

    /// `A`, or `Lᵀ` from `B = L·Lᵀ` so that the columns have Gram matrix `B`.
    pub fn columns(&self) -> Result<Matrix> {
        match self {
            Problem::Columns(a) => Ok(a.clone()),
            Problem::Symmetric(b) => Ok(cholesky_lower(b)?.transpose()),
        }
    }

    pub fn engine(&self, cfg: &RunConfig) -> Result<AnyEngine> {
        Ok(match cfg.mode {
            Mode::OneSided => AnyEngine::OneSided(OneSidedEngine::new(&self.columns()?, cfg)?),
            Mode::TwoSided => AnyEngine::TwoSided(TwoSidedEngine::new(&self.gram(), cfg)?),
        })
    }
}

/// Either engine behind one type.
#[derive(Clone, Debug)]
pub enum AnyEngine {
    OneSided(OneSidedEngine),
    TwoSided(TwoSidedEngine),
}

impl Engine for AnyEngine {
    fn n(&self) -> usize {
        match self {
            AnyEngine::OneSided(e) => e.n(),
            AnyEngine::TwoSided(e) => e.n(),
        }
    }

    fn step(&mut self) -> Result<StepOutcome> {
        match self {
            AnyEngine::OneSided(e) => e.step(),
            AnyEngine::TwoSided(e) => e.step(),
        }
    }

    fn gram(&self) -> SymmetricMatrix {
        match self {
            AnyEngine::OneSided(e) => e.gram(),
            AnyEngine::TwoSided(e) => e.gram(),
        }
    }

    fn t_acc(&self) -> &Matrix {
        match self {
            AnyEngine::OneSided(e) => e.t_acc(),
            AnyEngine::TwoSided(e) => e.t_acc(),
        }
    }

    fn reconstruction(&self) -> Result<(f64, f64)> {
        match self {
            AnyEngine::OneSided(e) => e.reconstruction(),
            AnyEngine::TwoSided(e) => e.reconstruction(),
        }
    }
}

/// Where the trial matrices come from.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixFamily {
    /// `d×n`, columns uniform on the unit sphere.
    HaarColumns { d: usize, n: usize },
    /// Unit-diagonal SPD with κ̂ ≈ `kappa`.
    SpdKappaHat { n: usize, kappa: f64 },
    /// `D·C·D`, `C` unit-diagonal with κ̂ ≈ `kappa_hat`, `D` geometric up to `spread`.
    Graded { n: usize, spread: f64, kappa_hat: f64 },
    /// The same matrix in every trial (e.g. read from a file).
    Fixed(Problem),
}

impl MatrixFamily {
    pub fn n(&self) -> usize {
        match self {
            MatrixFamily::HaarColumns { n, .. }
            | MatrixFamily::SpdKappaHat { n, .. }
            | MatrixFamily::Graded { n, .. } => *n,
            MatrixFamily::Fixed(p) => p.n(),
        }
    }

    /// Draws the matrix of the trial with seed `seed`, from a generator
    /// stream separate from the pivot stream.
    pub fn sample(&self, seed: u64) -> Result<Problem> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        Ok(match self {
            MatrixFamily::HaarColumns { d, n } => Problem::Columns(gen_haar_columns(*d, *n, &mut rng)?),
            MatrixFamily::SpdKappaHat { n, kappa } => Problem::Symmetric(gen_spd_kappahat(*n, *kappa, &mut rng)?),
            MatrixFamily::Graded { n, spread, kappa_hat } => {
                Problem::Symmetric(gen_graded(*n, *spread, *kappa_hat, &mut rng)?)
            }
            MatrixFamily::Fixed(p) => p.clone(),
        })
    }
}

impl fmt::Display for MatrixFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixFamily::HaarColumns { d, n } => write!(f, "haar({d}x{n})"),
            MatrixFamily::SpdKappaHat { n, kappa } => write!(f, "spd-kappahat(n={n}, kappa={kappa})"),
            MatrixFamily::Graded { n, spread, kappa_hat } => {
                write!(f, "graded(n={n}, spread={spread}, kappa_hat={kappa_hat})")
            }
            MatrixFamily::Fixed(p) => write!(f, "fixed(n={})", p.n()),
        }
    }
}

/// Which study to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    Convergence,
    Martingale,
    Stability,
    Orthogonalization,
}

impl FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convergence" => Ok(StudyKind::Convergence),
            "martingale" => Ok(StudyKind::Martingale),
            "stability" => Ok(StudyKind::Stability),
            "orthogonalization" | "ortho" => Ok(StudyKind::Orthogonalization),
            _ => Err(Error::Config(format!("unknown study {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub family: MatrixFamily,
    pub trials: usize,
    pub mode: Mode,
    pub transform: TransformSpec,
    pub pivot: PivotRuleSpec,
    /// Trial `i` uses seed `seed_base + i` for both the matrix and the pivots.
    pub seed_base: u64,
    pub exec: Exec,
    /// Iterations per trial; each study has its own default.
    pub horizon: Option<usize>,
    /// Iterations between sampled observables; each study has its own default.
    pub sample_every: Option<usize>,
    /// Target tolerance where a study needs one.
    pub delta: f64,
}

impl StudyConfig {
    pub fn new(family: MatrixFamily, trials: usize, mode: Mode, transform: TransformSpec, pivot: PivotRuleSpec) -> Self {
        StudyConfig {
            family,
            trials,
            mode,
            transform,
            pivot,
            seed_base: 0,
            exec: Exec::default(),
            horizon: None,
            sample_every: None,
            delta: crate::driver::DEFAULT_DELTA,
        }
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed_base.wrapping_add(trial as u64)
    }

    /// The run configuration of one trial. Observables are off; studies
    /// sample what they need themselves.
    pub fn run_config(&self, trial: usize) -> RunConfig {
        let mut cfg = RunConfig::new(self.mode, self.transform, self.pivot);
        cfg.seed = self.trial_seed(trial);
        cfg.delta = self.delta;
        cfg.observe = Observables {
            gamma: false,
            kappa_hat: false,
            reconstruction: false,
        };
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("a study needs at least one trial".into()));
        }
        if self.sample_every == Some(0) {
            return Err(Error::Config("sampling interval must be at least 1".into()));
        }
        let mut probe = RunConfig::new(self.mode, self.transform, self.pivot);
        probe.delta = self.delta;
        probe.validate(self.family.n())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfactor::FactorizationKind;

    #[test]
    fn family_sampling_is_seeded() {
        let fam = MatrixFamily::HaarColumns { d: 6, n: 4 };
        assert_eq!(fam.sample(3).unwrap(), fam.sample(3).unwrap());
        assert_ne!(fam.sample(3).unwrap(), fam.sample(4).unwrap());
        let spd = MatrixFamily::SpdKappaHat { n: 5, kappa: 10.0 };
        assert_eq!(spd.sample(1).unwrap().n(), 5);
    }

    #[test]
    fn problem_conversions_share_the_gram() {
        let b = SymmetricMatrix::from_rows(&[&[4.0, 1.0], &[1.0, 3.0]]);
        let p = Problem::Symmetric(b.clone());
        let a = p.columns().unwrap();
        assert!(a.gram().as_matrix().sub(b.as_matrix()).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let mut cfg = StudyConfig::new(
            MatrixFamily::SpdKappaHat { n: 4, kappa: 2.0 },
            0,
            Mode::TwoSided,
            TransformSpec::kind(FactorizationKind::Unitary),
            PivotRuleSpec::Random { k: 2 },
        );
        assert!(cfg.validate().is_err());
        cfg.trials = 3;
        assert!(cfg.validate().is_ok());
        cfg.pivot = PivotRuleSpec::Random { k: 5 };
        assert!(cfg.validate().is_err());
        assert_eq!(cfg.trial_seed(2), 2);
        assert_eq!("ortho".parse::<StudyKind>().unwrap(), StudyKind::Orthogonalization);
    }
}
