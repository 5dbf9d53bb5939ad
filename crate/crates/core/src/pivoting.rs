//! Pivot rules: the uniform size-`k` random rule and the deterministic
//! baselines (greedy off-diagonal, greedy Γ, row- and column-cyclic sweeps).

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::dense::{cholesky_lower, invert_lower};
use crate::matcore::{PivotSet, SymmetricMatrix};

/// Deterministic random stream behind every randomized pivot choice.
///
/// ChaCha8 is a counter-based generator with a fixed, platform-independent
/// output for a given seed and stream.
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState::with_stream(seed, 0)
    }

    /// Independent stream `stream` of the same seed.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngState { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform index in `0..bound` from exactly one 64-bit word (multiply-shift;
    /// bias below `bound / 2⁶⁴`).
    #[inline]
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        let x = self.rng.next_u64();
        ((x as u128 * bound as u128) >> 64) as usize
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Uniform random `k`-subset of `0..n`, sorted.
///
/// Partial Fisher–Yates over `0..n`. Consumes exactly `k` words when `k < n`
/// and none when `k == n`.
pub fn sample_uniform_subset(rng: &mut RngState, n: usize, k: usize) -> Result<PivotSet> {
    if k < 2 || k > n {
        return Err(Error::InvalidPivot(format!(
            "cannot sample a subset of size {k} from {n} indices"
        )));
    }
    if k == n {
        return PivotSet::full(n);
    }
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.below(n - i);
        pool.swap(i, j);
    }
    let mut chosen = pool[..k].to_vec();
    chosen.sort_unstable();
    PivotSet::new(chosen)
}

/// Parseable description of a pivot rule, without runtime state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum PivotRuleSpec {
    Random { k: usize },
    GreedyOffdiag,
    GreedyGamma,
    RowCyclic,
    ColumnCyclic,
}

impl PivotRuleSpec {
    /// Pivot size this rule produces.
    pub fn k(&self) -> usize {
        match self {
            PivotRuleSpec::Random { k } => *k,
            _ => 2,
        }
    }

    pub fn is_greedy(&self) -> bool {
        matches!(self, PivotRuleSpec::GreedyOffdiag | PivotRuleSpec::GreedyGamma)
    }

    pub fn build(&self, seed: u64) -> PivotRule {
        match *self {
            PivotRuleSpec::Random { k } => PivotRule::RandomK {
                k,
                rng: RngState::new(seed),
            },
            PivotRuleSpec::GreedyOffdiag => PivotRule::GreedyOffdiag,
            PivotRuleSpec::GreedyGamma => PivotRule::GreedyGamma,
            PivotRuleSpec::RowCyclic => PivotRule::RowCyclic { cursor: (0, 1) },
            PivotRuleSpec::ColumnCyclic => PivotRule::ColumnCyclic { cursor: (0, 1) },
        }
    }
}

impl FromStr for PivotRuleSpec {
    type Err = Error;

    /// Grammar: `random:k=K`, `random` (k = 2), `greedy-offdiag`,
    /// `greedy-gamma`, `row-cyclic`, `column-cyclic`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "random" => return Ok(PivotRuleSpec::Random { k: 2 }),
            "greedy-offdiag" => return Ok(PivotRuleSpec::GreedyOffdiag),
            "greedy-gamma" => return Ok(PivotRuleSpec::GreedyGamma),
            "row-cyclic" => return Ok(PivotRuleSpec::RowCyclic),
            "column-cyclic" => return Ok(PivotRuleSpec::ColumnCyclic),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("random:k=") {
            let k: usize = rest
                .parse()
                .map_err(|_| Error::Config(format!("bad pivot size in {s:?}")))?;
            if k < 2 {
                return Err(Error::Config(format!("pivot size must be >= 2, got {k}")));
            }
            return Ok(PivotRuleSpec::Random { k });
        }
        Err(Error::Config(format!(
            "unknown pivot rule {s:?} (expected random:k=K, greedy-offdiag, greedy-gamma, row-cyclic or column-cyclic)"
        )))
    }
}

impl fmt::Display for PivotRuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PivotRuleSpec::Random { k } => write!(f, "random:k={k}"),
            PivotRuleSpec::GreedyOffdiag => f.write_str("greedy-offdiag"),
            PivotRuleSpec::GreedyGamma => f.write_str("greedy-gamma"),
            PivotRuleSpec::RowCyclic => f.write_str("row-cyclic"),
            PivotRuleSpec::ColumnCyclic => f.write_str("column-cyclic"),
        }
    }
}

/// A pivot rule with its runtime state. Single owner; no shared RNG.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum PivotRule {
    RandomK { k: usize, rng: RngState },
    GreedyOffdiag,
    GreedyGamma,
    RowCyclic { cursor: (usize, usize) },
    ColumnCyclic { cursor: (usize, usize) },
}

impl PivotRule {
    pub fn k(&self) -> usize {
        match self {
            PivotRule::RandomK { k, .. } => *k,
            _ => 2,
        }
    }

    pub fn needs_gram(&self) -> bool {
        matches!(self, PivotRule::GreedyOffdiag | PivotRule::GreedyGamma)
    }

    /// Next pivot for an order-`n` problem. Greedy rules read `gram`, the
    /// current `B` (or `AᵀA`); the other rules ignore it.
    pub fn next_pivot(&mut self, gram: Option<&SymmetricMatrix>, n: usize) -> Result<PivotSet> {
        let k = self.k();
        if k > n || n < 2 {
            return Err(Error::InvalidPivot(format!(
                "pivot size {k} exceeds the order {n}"
            )));
        }
        match self {
            PivotRule::RandomK { k, rng } => sample_uniform_subset(rng, n, *k),
            PivotRule::GreedyOffdiag => {
                let b = require_gram(gram, n)?;
                greedy_offdiag(b)
            }
            PivotRule::GreedyGamma => {
                let b = require_gram(gram, n)?;
                greedy_gamma(b)
            }
            PivotRule::RowCyclic { cursor } => {
                let (i, j) = *cursor;
                let (i, j) = if i + 1 >= n || j >= n { (0, 1) } else { (i, j) };
                *cursor = if j + 1 < n {
                    (i, j + 1)
                } else if i + 2 < n {
                    (i + 1, i + 2)
                } else {
                    (0, 1)
                };
                PivotSet::pair(i, j)
            }
            PivotRule::ColumnCyclic { cursor } => {
                let (i, j) = *cursor;
                let (i, j) = if j >= n || i >= j { (0, 1) } else { (i, j) };
                *cursor = if i + 1 < j {
                    (i + 1, j)
                } else if j + 1 < n {
                    (0, j + 1)
                } else {
                    (0, 1)
                };
                PivotSet::pair(i, j)
            }
        }
    }
}

fn require_gram(gram: Option<&SymmetricMatrix>, n: usize) -> Result<&SymmetricMatrix> {
    match gram {
        Some(b) if b.n() == n => Ok(b),
        Some(b) => Err(Error::Dimension(format!(
            "greedy rule got an order-{} matrix for an order-{n} problem",
            b.n()
        ))),
        None => Err(Error::Config("greedy pivot rules need the current matrix".into())),
    }
}

/// Pair maximizing `|b_ij|`, ties to the lexicographically smallest pair.
pub fn greedy_offdiag(b: &SymmetricMatrix) -> Result<PivotSet> {
    let n = b.n();
    let mut best = (0, 1);
    let mut best_val = -1.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = b.get(i, j).abs();
            if v > best_val {
                best_val = v;
                best = (i, j);
            }
        }
    }
    PivotSet::pair(best.0, best.1)
}

/// Pair minimizing `b_ij·(B⁻¹)_ji`, i.e. the pair whose update lowers Γ
/// the most. `B⁻¹` is recomputed from a Cholesky factorization on every call.
pub fn greedy_gamma(b: &SymmetricMatrix) -> Result<PivotSet> {
    let n = b.n();
    let l = cholesky_lower(b)?;
    let linv = invert_lower(&l)?;
    // (B⁻¹)_ij = Σ_p (L⁻¹)_pi (L⁻¹)_pj
    let inv_entry = |i: usize, j: usize| -> f64 { (0..n).map(|p| linv[(p, i)] * linv[(p, j)]).sum() };
    let mut best = (0, 1);
    let mut best_val = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = b.get(i, j) * inv_entry(j, i);
            if v < best_val {
                best_val = v;
                best = (i, j);
            }
        }
    }
    PivotSet::pair(best.0, best.1)
}
