//! Randomized-pivot Jacobi-type factorizations.
//!
//! Each iteration picks a pivot set `J`, builds a small transform `S` that
//! diagonalizes the local Gram block `B_JJ` under a structural constraint,
//! and applies it to the columns of `A` (one-sided) or by congruence to `B`
//! (two-sided). The structure of `S` decides which factorization
//! accumulates: orthogonal for eigendecomposition/SVD, triangular for
//! Cholesky/QR, LDLᵀ and QL, unconstrained for orthogonalization.

// `!(x > 0.0)` guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod driver;
pub mod error;
pub mod lab;
pub mod localfactor;
pub mod matcore;
pub mod metrics;
pub mod pivoting;

pub use driver::{
    iteration_budget, run_one_sided, run_two_sided, stopping_check, Engine, Mode, OneSidedEngine, RunConfig,
    RunResult, Summary, TraceRecord, TwoSidedEngine,
};
pub use error::{Error, Result};
pub use localfactor::{FactorizationKind, LocalTransform, PairRule, TransformSpec};
pub use matcore::{Matrix, PivotSet, SymmetricMatrix};
pub use pivoting::{PivotRule, PivotRuleSpec};
