//! Randomized sweeps over the one-step identities and the bound lemmas,
//! used by the `check` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::gen::{gen_haar_columns, gen_spd_kappahat};
use super::oracles::{
    deterministic_update_check, expected_update_oracle, gamma_perturbation_check, k_subsets,
    subspace_perturbation_check, updated,
};
use crate::error::Result;
use crate::localfactor::FactorizationKind;
use crate::matcore::dense::sym_eigen_jacobi;
use crate::matcore::{diagonal_normalize, Matrix, PivotSet, SymmetricMatrix};
use crate::metrics::{bound_kappa_from_gamma, bound_norm_from_gamma, bound_off_from_gamma, gamma, off_frobenius};
use crate::pivoting::{sample_uniform_subset, RngState};

/// Outcome of one sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub violations: usize,
    /// Largest observed value of the normalized error (pass means ≤ 1).
    pub worst: f64,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> Self {
        SuiteOutcome {
            name,
            cases: 0,
            violations: 0,
            worst: 0.0,
        }
    }

    /// Records `err / tol`; values above one are violations.
    fn record(&mut self, ratio: f64) {
        self.cases += 1;
        if !(ratio <= 1.0) {
            self.violations += 1;
        }
        if ratio.is_nan() {
            self.worst = f64::NAN;
        } else if !self.worst.is_nan() {
            self.worst = self.worst.max(ratio);
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Random SPD test matrix: unit-diagonal with κ̂ log-uniform in `[1, 10³]`,
/// then diagonally scaled by factors in `[0.1, 10]`.
pub fn random_spd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SymmetricMatrix> {
    let kappa = 10f64.powf(rng.random_range(0.0..3.0));
    let c = gen_spd_kappahat(n, kappa, rng)?;
    let d: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-1.0..1.0))).collect();
    Ok(SymmetricMatrix::from_fn(n, |i, j| d[i] * c.get(i, j) * d[j]))
}

/// Enumerated expectation against the closed form, `n ∈ 3..=max_n`,
/// `k ∈ {2, 3, 4}`, every kind; tolerance `1e-10·Γ(B)`.
pub fn expected_update_suite(seed: u64, max_n: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SuiteOutcome::new("expected-update");
    for n in 3..=max_n {
        let b = random_spd(n, &mut rng)?;
        for k in 2..=4.min(n) {
            for kind in FactorizationKind::ALL {
                let e = expected_update_oracle(&b, k, kind)?;
                out.record(e.relative_error() / 1e-10);
            }
        }
    }
    Ok(out)
}

/// One-step identity on random `(B, J, kind)`, `n ≤ 10`; tolerance `1e-9·(1 + Γ)`.
pub fn deterministic_update_suite(seed: u64, cases: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pivots = RngState::with_stream(seed, 2);
    let mut out = SuiteOutcome::new("deterministic-update");
    for case in 0..cases {
        let n = rng.random_range(2..=10);
        let b = random_spd(n, &mut rng)?;
        let k = rng.random_range(2..=n);
        let j = sample_uniform_subset(&mut pivots, n, k)?;
        let kind = FactorizationKind::ALL[case % 5];
        let g = gamma(&b)?;
        out.record(deterministic_update_check(&b, &j, kind)? / (1e-9 * (1.0 + g)));
    }
    Ok(out)
}

/// The three Γ-bounds on random SPD matrices, `n ≤ 16`, slack `1e-9`.
pub fn bound_suite(seed: u64, cases: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SuiteOutcome::new("gamma-bounds");
    for _ in 0..cases {
        let n = rng.random_range(2..=16);
        let b = random_spd(n, &mut rng)?;
        let hat = diagonal_normalize(&b)?;
        let g = gamma(&b)?;
        let eig = sym_eigen_jacobi(&hat, 1e-15);
        let (lo, hi) = (eig.min_value(), eig.max_value());
        let kappa = hi / lo;
        let slack = |bound: f64| 1e-9 * (1.0 + bound.abs());
        let off_bound = bound_off_from_gamma(g);
        let (k_lo, k_hi) = bound_kappa_from_gamma(g, n);
        let norm_bound = bound_norm_from_gamma(g);
        // Each check is scaled so that 1 is the edge of the allowed slack.
        out.record(1.0 + (off_frobenius(&hat) - off_bound) / slack(off_bound));
        out.record(1.0 + (k_lo - kappa) / slack(k_lo));
        out.record(1.0 + (kappa - k_hi) / slack(k_hi));
        out.record(1.0 + (hi.max(1.0 / lo) - norm_bound) / slack(norm_bound));
    }
    Ok(out)
}

/// Γ after an update is the same for every kind, to `1e-10·(1 + Γ)`.
pub fn kind_independence_suite(seed: u64, cases: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pivots = RngState::with_stream(seed, 3);
    let mut out = SuiteOutcome::new("kind-independence");
    for _ in 0..cases {
        let n = rng.random_range(3..=10);
        let b = random_spd(n, &mut rng)?;
        let k = rng.random_range(2..=n.min(5));
        let j = sample_uniform_subset(&mut pivots, n, k)?;
        let values: Vec<f64> = FactorizationKind::ALL
            .iter()
            .map(|&kind| gamma(&updated(&b, &j, kind)?))
            .collect::<Result<_>>()?;
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        out.record((hi - lo) / (1e-10 * (1.0 + lo.abs())));
    }
    Ok(out)
}

/// `off(B⁺) = off(B) − 2b_ij²` for a unitary 2×2 update, to `1e-12·‖B‖_F²`.
pub fn off_identity_suite(seed: u64, cases: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SuiteOutcome::new("unitary-off-identity");
    for _ in 0..cases {
        let n = rng.random_range(2..=12);
        let b = random_spd(n, &mut rng)?;
        let pairs = k_subsets(n, 2);
        let j: &PivotSet = &pairs[rng.random_range(0..pairs.len())];
        let (p, q) = (j.indices()[0], j.indices()[1]);
        let after = updated(&b, j, FactorizationKind::Unitary)?;
        let predicted = off_frobenius(&b) - 2.0 * b.get(p, q).powi(2);
        let scale = b.frobenius_norm().powi(2);
        out.record((off_frobenius(&after) - predicted).abs() / (1e-12 * scale));
    }
    Ok(out)
}

/// Γ-perturbation bound under random symmetric perturbations of size
/// `10⁻¹²…10⁻⁴`, where the bound applies.
pub fn gamma_perturbation_suite(seed: u64, cases: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SuiteOutcome::new("gamma-perturbation");
    for _ in 0..cases {
        let n = rng.random_range(2..=10);
        let b = random_spd(n, &mut rng)?;
        let size = 10f64.powf(rng.random_range(-12.0..-4.0));
        let p = SymmetricMatrix::from_fn(n, |i, j| {
            let scale = (b.get(i, i) * b.get(j, j)).sqrt();
            b.get(i, j) + size * scale * rng.random_range(-1.0..1.0)
        });
        if let (diff, Some(bound)) = gamma_perturbation_check(&b, &p)? {
            // Γ itself carries O(n·eps·κ̂) rounding, added to the bound.
            let floor = 1e3 * n as f64 * f64::EPSILON * (1.0 + gamma(&b)?);
            out.record(diff / (bound + floor));
        }
    }
    Ok(out)
}

/// Subspace perturbation bound under random column perturbations.
pub fn subspace_perturbation_suite(seed: u64, cases: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SuiteOutcome::new("subspace-perturbation");
    for _ in 0..cases {
        let n = rng.random_range(1..=6);
        let d = n + rng.random_range(1..=6);
        let a = gen_haar_columns(d, n, &mut rng)?;
        let size = 10f64.powf(rng.random_range(-10.0..-3.0));
        let e = gen_haar_columns(d, n, &mut rng)?;
        let a2 = Matrix::from_fn(d, n, |i, j| a[(i, j)] + size * e[(i, j)]);
        let (lhs, rhs) = subspace_perturbation_check(&a, &a2)?;
        let floor = 1e2 * d as f64 * f64::EPSILON;
        out.record(lhs / (rhs + floor));
    }
    Ok(out)
}

/// Every sweep at the given scale (`cases` for the randomized ones).
pub fn lemma_suites(seed: u64, cases: usize) -> Result<Vec<SuiteOutcome>> {
    Ok(vec![
        expected_update_suite(seed, 8)?,
        deterministic_update_suite(seed.wrapping_add(1), cases)?,
        bound_suite(seed.wrapping_add(2), cases)?,
        kind_independence_suite(seed.wrapping_add(3), cases)?,
        off_identity_suite(seed.wrapping_add(4), cases)?,
        gamma_perturbation_suite(seed.wrapping_add(5), cases)?,
        subspace_perturbation_suite(seed.wrapping_add(6), cases)?,
    ])
}
