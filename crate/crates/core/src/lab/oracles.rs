//! Brute-force checks of the one-step identities and perturbation bounds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::localfactor::{make_local_transform, FactorizationKind};
use crate::matcore::dense::{cholesky_lower, invert_lower, sym_eigen_jacobi};
use crate::matcore::{apply_two_sided_update, diagonal_normalize, Matrix, PivotSet, SymmetricMatrix};
use crate::metrics::{dist_one, dist_two, gamma, subspace_distance};

/// Largest order accepted by [`expected_update_oracle`].
pub const MAX_ENUMERATION_ORDER: usize = 14;

/// `1 − k(k−1)/(n(n−1))`, the expected one-step contraction of Γ.
pub fn contraction(n: usize, k: usize) -> f64 {
    1.0 - (k * (k - 1)) as f64 / (n * (n - 1)) as f64
}

/// `B⁻¹` for SPD `B`, through the Cholesky factor of `B̂` and rescaling.
pub fn spd_inverse(b: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let hat = diagonal_normalize(b)?;
    let linv = invert_lower(&cholesky_lower(&hat)?)?;
    let hat_inv = linv.t_matmul(&linv)?;
    let roots: Vec<f64> = b.diagonal().iter().map(|d| d.sqrt()).collect();
    Ok(SymmetricMatrix::from_fn(b.n(), |i, j| hat_inv[(i, j)] / (roots[i] * roots[j])))
}

/// `B` after one update on `J` with the local transform of `kind`.
pub fn updated(b: &SymmetricMatrix, j: &PivotSet, kind: FactorizationKind) -> Result<SymmetricMatrix> {
    let block = b.extract_principal(j)?;
    let local = make_local_transform(kind, &block)?;
    let mut out = b.clone();
    apply_two_sided_update(&mut out, j, &local.s)?;
    Ok(out)
}

/// `Σ_{i≠j ∈ J} b_ij·(B⁻¹)_ji`, the one-step change of Γ.
pub fn update_correction(b: &SymmetricMatrix, inv: &SymmetricMatrix, j: &PivotSet) -> f64 {
    let idx = j.indices();
    let mut sum = 0.0;
    for &r in idx {
        for &c in idx {
            if r != c {
                sum += b.get(r, c) * inv.get(c, r);
            }
        }
    }
    sum
}

/// `|Γ(updated B) − (Γ(B) + Σ_{i≠j∈J} b_ij (B⁻¹)_ji)|`.
pub fn deterministic_update_check(b: &SymmetricMatrix, j: &PivotSet, kind: FactorizationKind) -> Result<f64> {
    let inv = spd_inverse(b).map_err(|_| Error::Singular)?;
    let before = gamma(b)?;
    let after = gamma(&updated(b, j, kind)?)?;
    Ok((after - (before + update_correction(b, &inv, j))).abs())
}

/// Lexicographic enumeration of all `k`-subsets of `0..n`.
pub fn k_subsets(n: usize, k: usize) -> Vec<PivotSet> {
    let mut out = Vec::new();
    if k < 2 || k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(PivotSet::new(idx.clone()).expect("strictly increasing"));
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return out;
        };
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpectedUpdate {
    /// Average of Γ after the update over all `C(n, k)` pivots.
    pub measured: f64,
    /// `(1 − k(k−1)/(n(n−1)))·Γ(B)`.
    pub predicted: f64,
    pub gamma_before: f64,
}

impl ExpectedUpdate {
    pub fn relative_error(&self) -> f64 {
        if self.gamma_before == 0.0 {
            (self.measured - self.predicted).abs()
        } else {
            (self.measured - self.predicted).abs() / self.gamma_before
        }
    }
}

/// Exact expectation of Γ after one uniformly random size-`k` pivot, by
/// enumeration, next to the closed form.
pub fn expected_update_oracle(b: &SymmetricMatrix, k: usize, kind: FactorizationKind) -> Result<ExpectedUpdate> {
    let n = b.n();
    if n > MAX_ENUMERATION_ORDER {
        return Err(Error::Config(format!(
            "enumeration limited to n <= {MAX_ENUMERATION_ORDER}, got {n}"
        )));
    }
    if k < 2 || k > n {
        return Err(Error::Config(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let before = gamma(b)?;
    let pivots = k_subsets(n, k);
    let mut total = 0.0;
    for j in &pivots {
        total += gamma(&updated(b, j, kind)?)?;
    }
    Ok(ExpectedUpdate {
        measured: total / pivots.len() as f64,
        predicted: contraction(n, k) * before,
        gamma_before: before,
    })
}

/// `(|Γ(B) − Γ(P)|, bound)` with the bound `nε(Γ + n)²/(1 − nε(Γ + n))`,
/// `ε = dist₂(B, P)`. The bound is `None` outside its range of validity.
pub fn gamma_perturbation_check(b: &SymmetricMatrix, p: &SymmetricMatrix) -> Result<(f64, Option<f64>)> {
    let n = b.n() as f64;
    let g = gamma(b)?;
    let eps = dist_two(b, p)?;
    let x = n * eps * (g + n);
    let diff = (g - gamma(p)?).abs();
    if x >= 1.0 {
        return Ok((diff, None));
    }
    Ok((diff, Some(x * (g + n) / (1.0 - x))))
}

/// `(dist(col(A), col(A′)), √n·dist₁(A, A′)/max(σ_min(Â), σ_min(Â′)))`.
pub fn subspace_perturbation_check(a: &Matrix, a2: &Matrix) -> Result<(f64, f64)> {
    let n = a.cols() as f64;
    let lhs = subspace_distance(a, a2)?;
    let sigma = |m: &Matrix| -> Result<f64> {
        let g = m.normalize_columns()?.gram();
        Ok(sym_eigen_jacobi(&g, 1e-15).min_value().max(0.0).sqrt())
    };
    let rhs = n.sqrt() * dist_one(a, a2)? / sigma(a)?.max(sigma(a2)?);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::gen::gen_spd_kappahat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn subsets_are_complete() {
        assert_eq!(k_subsets(5, 2).len(), 10);
        assert_eq!(k_subsets(12, 4).len(), 495);
        assert_eq!(k_subsets(3, 3), vec![PivotSet::full(3).unwrap()]);
        assert_eq!(k_subsets(4, 2)[..3], [
            PivotSet::pair(0, 1).unwrap(),
            PivotSet::pair(0, 2).unwrap(),
            PivotSet::pair(0, 3).unwrap()
        ]);
        assert!(k_subsets(2, 3).is_empty());
    }

    #[test]
    fn diagonal_block_changes_nothing() {
        let b = SymmetricMatrix::from_rows(&[&[2.0, 0.0, 0.3], &[0.0, 1.0, 0.2], &[0.3, 0.2, 3.0]]);
        let j = PivotSet::pair(0, 1).unwrap();
        let inv = spd_inverse(&b).unwrap();
        assert_eq!(update_correction(&b, &inv, &j), 0.0);
        for kind in FactorizationKind::ALL {
            assert!(deterministic_update_check(&b, &j, kind).unwrap() < 1e-15);
            assert!((gamma(&updated(&b, &j, kind).unwrap()).unwrap() - gamma(&b).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn full_pivot_zeroes_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = gen_spd_kappahat(5, 20.0, &mut rng).unwrap();
        let j = PivotSet::full(5).unwrap();
        let inv = spd_inverse(&b).unwrap();
        assert!((update_correction(&b, &inv, &j) + gamma(&b).unwrap()).abs() < 1e-10);
        for kind in FactorizationKind::ALL {
            assert!(deterministic_update_check(&b, &j, kind).unwrap() <= 1e-10);
            let e = expected_update_oracle(&b, 5, kind).unwrap();
            assert!(e.measured.abs() < 1e-12 && e.predicted == 0.0);
        }
    }

    #[test]
    fn coefficient_for_three_by_two() {
        assert!((contraction(3, 2) - 2.0 / 3.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let b = gen_spd_kappahat(3, 5.0, &mut rng).unwrap();
        let e = expected_update_oracle(&b, 2, FactorizationKind::Unitary).unwrap();
        assert!(e.relative_error() < 1e-12);
    }

    #[test]
    fn enumeration_limit() {
        let b = SymmetricMatrix::identity(15);
        assert!(expected_update_oracle(&b, 2, FactorizationKind::Unitary).is_err());
    }

    #[test]
    fn spd_inverse_is_inverse() {
        let b = SymmetricMatrix::from_rows(&[&[4.0, 1.0], &[1.0, 9.0]]);
        let inv = spd_inverse(&b).unwrap();
        let prod = b.as_matrix().matmul(inv.as_matrix()).unwrap();
        assert!(prod.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn perturbation_checks_hold_on_examples() {
        let b = SymmetricMatrix::from_rows(&[&[1.0, 0.2], &[0.2, 1.0]]);
        let p = SymmetricMatrix::from_rows(&[&[1.0, 0.2001], &[0.2001, 1.0]]);
        let (diff, bound) = gamma_perturbation_check(&b, &p).unwrap();
        assert!(diff <= bound.unwrap());
        let a = Matrix::from_rows(&[&[1.0, 0.3], &[0.0, 1.0], &[0.1, 0.0]]);
        let a2 = Matrix::from_rows(&[&[1.0, 0.3], &[0.001, 1.0], &[0.1, 0.002]]);
        let (lhs, rhs) = subspace_perturbation_check(&a, &a2).unwrap();
        assert!(lhs <= rhs);
    }
}
