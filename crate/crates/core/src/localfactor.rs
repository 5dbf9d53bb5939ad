//! Construction of the local `k×k` transform `S` with `Sᵀ·B_JJ·S` diagonal,
//! under each structural constraint, plus the three closed-form rules for
//! orthogonalizing a pair of unit vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::dense::{self, sym_eigen_jacobi};
use crate::matcore::{Matrix, Structure, SymmetricMatrix};
use crate::metrics::off_frobenius;

/// Structural constraint on `S`, one per classical factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorizationKind {
    /// Orthogonal `S`: eigendecomposition / SVD.
    Unitary,
    /// Upper triangular `S`, `SᵀBS = I`: Cholesky / QR.
    UpperTriangular,
    /// Unit upper triangular `S`, `SᵀBS` diagonal: LDLᵀ.
    UnitUpper,
    /// Lower triangular `S`, `SᵀBS = I`: QL.
    LowerTriangular,
    /// Any nonsingular `S` with `SᵀBS = I`: orthogonalization.
    General,
}

impl FactorizationKind {
    pub const ALL: [FactorizationKind; 5] = [
        FactorizationKind::Unitary,
        FactorizationKind::UpperTriangular,
        FactorizationKind::UnitUpper,
        FactorizationKind::LowerTriangular,
        FactorizationKind::General,
    ];

    pub fn structure(self) -> Structure {
        match self {
            FactorizationKind::Unitary => Structure::Orthogonal,
            FactorizationKind::UpperTriangular => Structure::Upper,
            FactorizationKind::UnitUpper => Structure::UnitUpper,
            FactorizationKind::LowerTriangular => Structure::Lower,
            FactorizationKind::General => Structure::General,
        }
    }

    /// Whether the local Gram becomes the identity (rather than just diagonal).
    pub fn normalizes(self) -> bool {
        matches!(
            self,
            FactorizationKind::UpperTriangular
                | FactorizationKind::LowerTriangular
                | FactorizationKind::General
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            FactorizationKind::Unitary => "evd",
            FactorizationKind::UpperTriangular => "qr",
            FactorizationKind::UnitUpper => "ldl",
            FactorizationKind::LowerTriangular => "ql",
            FactorizationKind::General => "orth",
        }
    }
}

/// Closed-form rules for a pair of unit columns with inner product `α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRule {
    /// Gram-Schmidt: keep `a₁`, orthogonalize `a₂` against it.
    Gs2,
    /// Normalized SVD: the bisector frame of `a₁`, `a₂`.
    Nsvd2,
    /// Symmetric rule, equal to applying `Nsvd2` twice.
    Nsvd2x2,
}

impl PairRule {
    pub fn name(self) -> &'static str {
        match self {
            PairRule::Gs2 => "gs2",
            PairRule::Nsvd2 => "nsvd2",
            PairRule::Nsvd2x2 => "nsvd2x2",
        }
    }

    /// The kind whose structural contract the rule satisfies.
    pub fn kind(self) -> FactorizationKind {
        match self {
            PairRule::Gs2 => FactorizationKind::UpperTriangular,
            PairRule::Nsvd2 | PairRule::Nsvd2x2 => FactorizationKind::General,
        }
    }

    pub fn matrix(self, alpha: f64) -> Result<Matrix> {
        match self {
            PairRule::Gs2 => gs2_matrix(alpha),
            PairRule::Nsvd2 => nsvd2_matrix(alpha),
            PairRule::Nsvd2x2 => nsvd2x2_matrix(alpha),
        }
    }
}

/// Which local transform the engine builds: a kind, optionally specialized
/// to one of the pair rules (which then requires `k = 2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: FactorizationKind,
    pub pair_rule: Option<PairRule>,
}

impl TransformSpec {
    pub fn kind(kind: FactorizationKind) -> Self {
        TransformSpec {
            kind,
            pair_rule: None,
        }
    }

    pub fn rule(rule: PairRule) -> Self {
        TransformSpec {
            kind: rule.kind(),
            pair_rule: Some(rule),
        }
    }

    pub fn build(&self, b_jj: &SymmetricMatrix) -> Result<LocalTransform> {
        match self.pair_rule {
            None => make_local_transform(self.kind, b_jj),
            Some(rule) => pair_rule_transform(rule, b_jj),
        }
    }
}

impl FromStr for TransformSpec {
    type Err = Error;

    /// Grammar: `evd|svd`, `cholesky|qr`, `ldl`, `ql`, `orth`, optionally
    /// followed by `,rule=gs2|nsvd2|nsvd2x2`, or the bare `rule=…` form.
    fn from_str(s: &str) -> Result<Self> {
        let mut kind = None;
        let mut rule = None;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some(r) = part.strip_prefix("rule=") {
                rule = Some(match r {
                    "gs2" => PairRule::Gs2,
                    "nsvd2" => PairRule::Nsvd2,
                    "nsvd2x2" => PairRule::Nsvd2x2,
                    _ => return Err(Error::Config(format!("unknown pair rule {r:?}"))),
                });
            } else {
                kind = Some(match part {
                    "evd" | "svd" => FactorizationKind::Unitary,
                    "cholesky" | "qr" => FactorizationKind::UpperTriangular,
                    "ldl" => FactorizationKind::UnitUpper,
                    "ql" => FactorizationKind::LowerTriangular,
                    "orth" => FactorizationKind::General,
                    _ => return Err(Error::Config(format!("unknown factorization kind {part:?}"))),
                });
            }
        }
        match (kind, rule) {
            (None, None) => Err(Error::Config("empty factorization kind".into())),
            (Some(k), None) => Ok(TransformSpec::kind(k)),
            (None, Some(r)) => Ok(TransformSpec::rule(r)),
            (Some(k), Some(r)) if k == r.kind() => Ok(TransformSpec::rule(r)),
            (Some(k), Some(r)) => Err(Error::Config(format!(
                "rule {} produces a {} transform, not {}",
                r.name(),
                r.kind().name(),
                k.name()
            ))),
        }
    }
}

impl fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pair_rule {
            None => f.write_str(self.kind.name()),
            Some(r) => write!(f, "{},rule={}", self.kind.name(), r.name()),
        }
    }
}

/// A local transform and the diagonal it produces.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTransform {
    pub s: Matrix,
    pub kind: FactorizationKind,
    pub rule: Option<PairRule>,
    /// Diagonal of `Sᵀ·B_JJ·S`.
    pub diag_out: Vec<f64>,
}

impl LocalTransform {
    pub fn structure(&self) -> Structure {
        self.kind.structure()
    }
}

fn breakdown(reason: impl Into<String>) -> Error {
    Error::LocalBreakdown {
        pivot: Vec::new(),
        reason: reason.into(),
    }
}

/// Builds `S` for `kind` so that `Sᵀ·B_JJ·S` is diagonal.
///
/// * unitary: Jacobi rotation for `k = 2`, cyclic-Jacobi eigenvectors otherwise
/// * upper: `R⁻¹` from `B_JJ = RᵀR`
/// * unit upper: `L⁻ᵀ` from `B_JJ = L·D·Lᵀ`
/// * lower: inverse of the lower factor `M` with `B_JJ = MᵀM`
/// * general: `B_JJ^{-1/2}`
///
/// The returned breakdown error carries an empty pivot; the engine fills it in.
pub fn make_local_transform(kind: FactorizationKind, b_jj: &SymmetricMatrix) -> Result<LocalTransform> {
    let k = b_jj.n();
    let not_spd = |e: Error| match e {
        Error::NotPositiveDefinite { step } => breakdown(format!("local block not positive definite at step {step}")),
        other => other,
    };
    let (s, diag_out) = match kind {
        FactorizationKind::Unitary if k == 2 => {
            let (a, b, d) = (b_jj.get(0, 0), b_jj.get(0, 1), b_jj.get(1, 1));
            if !(a > 0.0 && d > 0.0 && a * d > b * b) {
                return Err(breakdown("local block not positive definite"));
            }
            let (c, sn) = dense::jacobi_rotation(a, b, d);
            let s = Matrix::from_rows(&[&[c, -sn], &[sn, c]]);
            let diag = b_jj.congruence(&s)?.diagonal();
            (s, diag)
        }
        FactorizationKind::Unitary => {
            let eig = sym_eigen_jacobi(b_jj, 1e-15);
            if !(eig.min_value() > 0.0) {
                return Err(breakdown("local block not positive definite"));
            }
            let diag = b_jj.congruence(&eig.vectors)?.diagonal();
            (eig.vectors, diag)
        }
        FactorizationKind::UpperTriangular => {
            let l = dense::cholesky_lower(b_jj).map_err(not_spd)?;
            // R = Lᵀ, S = R⁻¹
            let s = dense::invert_upper(&l.transpose(), false)?;
            (s, vec![1.0; k])
        }
        FactorizationKind::UnitUpper => {
            let (l, d) = dense::ldlt(b_jj).map_err(not_spd)?;
            let s = dense::invert_upper(&l.transpose(), true)?;
            (s, d)
        }
        FactorizationKind::LowerTriangular => {
            // Reverse the order, take the Cholesky factor there, and reverse back:
            // P·B·P = R'ᵀR' gives B = MᵀM with M = P·R'·P lower triangular.
            let rev: Vec<usize> = (0..k).rev().collect();
            let flipped = b_jj.permute(&rev);
            let l = dense::cholesky_lower(&flipped).map_err(not_spd)?;
            let r = l.transpose();
            let m = Matrix::from_fn(k, k, |i, j| r[(k - 1 - i, k - 1 - j)]);
            let s = dense::invert_lower(&m)?;
            (s, vec![1.0; k])
        }
        FactorizationKind::General => {
            let eig = sym_eigen_jacobi(b_jj, 1e-15);
            if !(eig.min_value() > 0.0) {
                return Err(breakdown("local block not positive definite"));
            }
            let v = &eig.vectors;
            let scaled = Matrix::from_fn(k, k, |i, j| v[(i, j)] / eig.values[j].sqrt());
            let s = scaled.matmul(&v.transpose())?;
            // exactly symmetric
            let s = SymmetricMatrix::from_fn(k, |i, j| 0.5 * (s[(i, j)] + s[(j, i)])).into_matrix();
            (s, vec![1.0; k])
        }
    };
    Ok(LocalTransform {
        s,
        kind,
        rule: None,
        diag_out,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.abs() < 1.0 - 1e-15) {
        return Err(Error::DegeneratePair(alpha.abs()));
    }
    Ok(())
}

fn gs2_matrix(alpha: f64) -> Result<Matrix> {
    check_alpha(alpha)?;
    let r = (1.0 - alpha * alpha).sqrt();
    Ok(Matrix::from_rows(&[&[1.0, -alpha / r], &[0.0, 1.0 / r]]))
}

fn nsvd2_matrix(alpha: f64) -> Result<Matrix> {
    check_alpha(alpha)?;
    let plus = (2.0 + 2.0 * alpha).sqrt();
    let minus = (2.0 - 2.0 * alpha).sqrt();
    Ok(Matrix::from_rows(&[&[1.0 / plus, 1.0 / minus], &[1.0 / plus, -1.0 / minus]]))
}

fn nsvd2x2_matrix(alpha: f64) -> Result<Matrix> {
    check_alpha(alpha)?;
    let plus = (2.0 + 2.0 * alpha).sqrt();
    let minus = (2.0 - 2.0 * alpha).sqrt();
    // Both output columns have norm √(8(1 − α²)) before normalization.
    let norm = (8.0 * (1.0 - alpha * alpha)).sqrt();
    let d = (minus + plus) / norm;
    let o = (minus - plus) / norm;
    Ok(Matrix::from_rows(&[&[d, o], &[o, d]]))
}

fn unit_pair_transform(rule: PairRule, alpha: f64) -> Result<LocalTransform> {
    Ok(LocalTransform {
        s: rule.matrix(alpha)?,
        kind: rule.kind(),
        rule: Some(rule),
        diag_out: vec![1.0; 2],
    })
}

/// Gram-Schmidt on unit columns: `(a₁, a₂) ↦ (a₁, (a₂ − α·a₁)/√(1 − α²))`.
pub fn rule_gs2(alpha: f64) -> Result<LocalTransform> {
    unit_pair_transform(PairRule::Gs2, alpha)
}

/// `(a₁, a₂) ↦ ((a₁ + a₂)/√(2 + 2α), (a₁ − a₂)/√(2 − 2α))`.
pub fn rule_nsvd2(alpha: f64) -> Result<LocalTransform> {
    unit_pair_transform(PairRule::Nsvd2, alpha)
}

/// Symmetric rule: with `p = √(2 − 2α)`, `m = √(2 + 2α)`, outputs
/// `((p + m)a₁ + (p − m)a₂)/‖·‖` and `((p − m)a₁ + (p + m)a₂)/‖·‖`.
pub fn rule_nsvd2_twice(alpha: f64) -> Result<LocalTransform> {
    unit_pair_transform(PairRule::Nsvd2x2, alpha)
}

/// Applies a pair rule to columns that need not be unit length: the rule
/// acts on the normalized columns, so `S = D^{-1/2}·S_rule(α)` with
/// `α = b₁₂/√(b₁₁b₂₂)`.
pub fn pair_rule_transform(rule: PairRule, b_jj: &SymmetricMatrix) -> Result<LocalTransform> {
    if b_jj.n() != 2 {
        return Err(Error::Config(format!(
            "pair rule {} needs pivots of size 2, got {}",
            rule.name(),
            b_jj.n()
        )));
    }
    let (b11, b12, b22) = (b_jj.get(0, 0), b_jj.get(0, 1), b_jj.get(1, 1));
    if !(b11 > 0.0 && b22 > 0.0) {
        return Err(breakdown("local block has a nonpositive diagonal"));
    }
    let (r1, r2) = (b11.sqrt(), b22.sqrt());
    let alpha = b12 / (r1 * r2);
    let base = rule.matrix(alpha).map_err(|e| match e {
        Error::DegeneratePair(a) => breakdown(format!("degenerate pair, |alpha| = {a}")),
        other => other,
    })?;
    let s = Matrix::from_fn(2, 2, |i, j| base[(i, j)] / if i == 0 { r1 } else { r2 });
    Ok(LocalTransform {
        s,
        kind: rule.kind(),
        rule: Some(rule),
        diag_out: vec![1.0; 2],
    })
}

/// Residuals of a local transform against its contracts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalDiagnostics {
    /// Violation of the kind's structure: `‖SᵀS − I‖_F` for unitary, the
    /// largest forbidden triangular entry otherwise (plus the unit-diagonal
    /// deviation for unit upper). Zero for the general kind.
    pub structural: f64,
    /// off(Sᵀ·B_JJ·S).
    pub off: f64,
    /// off(Sᵀ·B_JJ·S) / ‖B_JJ‖_F².
    pub off_relative: f64,
    /// `max |diag(Sᵀ·B_JJ·S) − diag_out|`.
    pub diag_error: f64,
    /// `‖Sᵀ·B_JJ·S − I‖_F` for kinds with an identity contract, else zero.
    pub identity_error: f64,
}

/// Measures how well `t` meets its structural and diagonalization contracts.
pub fn verify_local(t: &LocalTransform, b_jj: &SymmetricMatrix) -> Result<LocalDiagnostics> {
    let s = &t.s;
    let k = s.rows();
    if b_jj.n() != k || !s.is_square() || t.diag_out.len() != k {
        return Err(Error::Dimension("local transform and block disagree".into()));
    }
    let structural = match t.kind {
        FactorizationKind::Unitary => s.t_matmul(s)?.sub(&Matrix::identity(k))?.frobenius_norm(),
        FactorizationKind::UpperTriangular => s.max_abs_below_diagonal(),
        FactorizationKind::UnitUpper => {
            let diag_dev = s.diagonal().iter().fold(0.0f64, |m, d| m.max((d - 1.0).abs()));
            s.max_abs_below_diagonal().max(diag_dev)
        }
        FactorizationKind::LowerTriangular => s.max_abs_above_diagonal(),
        FactorizationKind::General => 0.0,
    };
    let out = b_jj.congruence(s)?;
    let off = off_frobenius(&out);
    let scale = b_jj.frobenius_norm();
    let diag_error = out
        .diagonal()
        .iter()
        .zip(&t.diag_out)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let identity_error = if t.kind.normalizes() {
        out.as_matrix().sub(&Matrix::identity(k))?.frobenius_norm()
    } else {
        0.0
    };
    Ok(LocalDiagnostics {
        structural,
        off,
        off_relative: off / (scale * scale),
        diag_error,
        identity_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn apply_to_pair(s: &Matrix, a1: [f64; 2], a2: [f64; 2]) -> Matrix {
        let a = Matrix::from_rows(&[&[a1[0], a2[0]], &[a1[1], a2[1]]]);
        a.matmul(s).unwrap()
    }

    #[test]
    fn unit_upper_on_diagonal_block_is_identity() {
        let b = SymmetricMatrix::from_diagonal(&[2.0, 5.0, 0.5]);
        let t = make_local_transform(FactorizationKind::UnitUpper, &b).unwrap();
        assert_eq!(t.s, Matrix::identity(3));
        assert_eq!(t.diag_out, vec![2.0, 5.0, 0.5]);
    }

    #[test]
    fn upper_on_unit_pair_is_gram_schmidt() {
        let alpha: f64 = 0.3;
        let b = SymmetricMatrix::from_rows(&[&[1.0, alpha], &[alpha, 1.0]]);
        let t = make_local_transform(FactorizationKind::UpperTriangular, &b).unwrap();
        let r = (1.0 - alpha * alpha).sqrt();
        let expect = Matrix::from_rows(&[&[1.0, -alpha / r], &[0.0, 1.0 / r]]);
        assert!(t.s.sub(&expect).unwrap().max_abs() < 1e-15);
        assert!(t.s.sub(&rule_gs2(alpha).unwrap().s).unwrap().max_abs() < 1e-15);
        let d = verify_local(&t, &b).unwrap();
        assert!(d.identity_error < 1e-15);
    }

    #[test]
    fn unitary_two_by_two() {
        let b = SymmetricMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let t = make_local_transform(FactorizationKind::Unitary, &b).unwrap();
        let expect = Matrix::from_rows(&[&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2], &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]]);
        assert!(t.s.sub(&expect).unwrap().max_abs() < 1e-15);
        assert!((t.diag_out[0] - 3.0).abs() < 1e-15);
        assert!((t.diag_out[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn every_kind_diagonalizes_a_fixed_block() {
        let b = SymmetricMatrix::from_rows(&[
            &[4.0, 1.0, 0.5, 0.2],
            &[1.0, 3.0, 0.9, 0.1],
            &[0.5, 0.9, 2.0, 0.7],
            &[0.2, 0.1, 0.7, 5.0],
        ]);
        for kind in FactorizationKind::ALL {
            let t = make_local_transform(kind, &b).unwrap();
            let d = verify_local(&t, &b).unwrap();
            assert!(d.off_relative <= 1e-24, "{kind:?}: {d:?}");
            assert!(d.diag_error <= 1e-13, "{kind:?}: {d:?}");
            match kind {
                FactorizationKind::Unitary => assert!(d.structural <= 1e-12 * 4.0),
                _ => assert_eq!(d.structural, 0.0, "{kind:?}"),
            }
        }
    }

    #[test]
    fn non_spd_block_breaks_down() {
        let b = SymmetricMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        for kind in FactorizationKind::ALL {
            assert!(
                matches!(make_local_transform(kind, &b), Err(Error::LocalBreakdown { .. })),
                "{kind:?}"
            );
        }
    }

    #[test]
    fn gs2_examples() {
        assert_eq!(rule_gs2(0.0).unwrap().s, Matrix::identity(2));
        let (c, s) = (0.5, 3f64.sqrt() / 2.0);
        let out = apply_to_pair(&rule_gs2(0.5).unwrap().s, [1.0, 0.0], [c, s]);
        assert!((out[(0, 1)]).abs() < 1e-15 && (out[(1, 1)] - 1.0).abs() < 1e-15);
        assert_eq!(out.col(0), &[1.0, 0.0]);
    }

    #[test]
    fn nsvd2_examples() {
        let t = rule_nsvd2(0.0).unwrap();
        let out = apply_to_pair(&t.s, [1.0, 0.0], [0.0, 1.0]);
        assert!(out.t_matmul(&out).unwrap().sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-15);

        let (c, s) = (0.5, 3f64.sqrt() / 2.0);
        let out = apply_to_pair(&rule_nsvd2(0.5).unwrap().s, [1.0, 0.0], [c, s]);
        assert!((out[(0, 0)] - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((out[(1, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nsvd2x2_is_identity_at_zero() {
        let s = rule_nsvd2_twice(0.0).unwrap().s;
        assert!(s.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn degenerate_pairs_are_rejected() {
        for rule in [rule_gs2, rule_nsvd2, rule_nsvd2_twice] {
            assert!(matches!(rule(1.0), Err(Error::DegeneratePair(_))));
            assert!(matches!(rule(-1.0 + 1e-17), Err(Error::DegeneratePair(_))));
            assert!(rule(f64::NAN).is_err());
        }
    }

    #[test]
    fn pair_rule_on_unnormalized_columns() {
        let b = SymmetricMatrix::from_rows(&[&[4.0, 1.2], &[1.2, 9.0]]);
        for rule in [PairRule::Gs2, PairRule::Nsvd2, PairRule::Nsvd2x2] {
            let t = pair_rule_transform(rule, &b).unwrap();
            let d = verify_local(&t, &b).unwrap();
            assert!(d.identity_error < 1e-15, "{rule:?} {d:?}");
            assert_eq!(d.structural, 0.0);
        }
        let b3 = SymmetricMatrix::identity(3);
        assert!(pair_rule_transform(PairRule::Gs2, &b3).is_err());
    }

    #[test]
    fn verify_reports_injected_perturbation() {
        let b = SymmetricMatrix::from_rows(&[&[2.0, 0.4], &[0.4, 1.0]]);
        let mut t = make_local_transform(FactorizationKind::UpperTriangular, &b).unwrap();
        let eps = 1e-7;
        t.s[(1, 0)] = eps;
        let d = verify_local(&t, &b).unwrap();
        assert_eq!(d.structural, eps);

        let id = LocalTransform {
            s: Matrix::identity(2),
            kind: FactorizationKind::UnitUpper,
            rule: None,
            diag_out: vec![3.0, 2.0],
        };
        let d = verify_local(&id, &SymmetricMatrix::from_diagonal(&[3.0, 2.0])).unwrap();
        assert_eq!(
            d,
            LocalDiagnostics {
                structural: 0.0,
                off: 0.0,
                off_relative: 0.0,
                diag_error: 0.0,
                identity_error: 0.0
            }
        );
    }

    #[test]
    fn spec_grammar() {
        assert_eq!("evd".parse::<TransformSpec>().unwrap(), TransformSpec::kind(FactorizationKind::Unitary));
        assert_eq!("svd".parse::<TransformSpec>().unwrap().kind, FactorizationKind::Unitary);
        assert_eq!("cholesky".parse::<TransformSpec>().unwrap().kind, FactorizationKind::UpperTriangular);
        assert_eq!("ldl".parse::<TransformSpec>().unwrap().kind, FactorizationKind::UnitUpper);
        assert_eq!("ql".parse::<TransformSpec>().unwrap().kind, FactorizationKind::LowerTriangular);
        assert_eq!("rule=nsvd2".parse::<TransformSpec>().unwrap(), TransformSpec::rule(PairRule::Nsvd2));
        assert_eq!("qr,rule=gs2".parse::<TransformSpec>().unwrap(), TransformSpec::rule(PairRule::Gs2));
        assert!("qr,rule=nsvd2".parse::<TransformSpec>().is_err());
        assert!("lu".parse::<TransformSpec>().is_err());
        assert!("rule=gs3".parse::<TransformSpec>().is_err());
        for s in ["evd", "qr", "ldl", "ql", "orth", "qr,rule=gs2", "orth,rule=nsvd2x2"] {
            assert_eq!(s.parse::<TransformSpec>().unwrap().to_string(), s);
        }
    }
}
