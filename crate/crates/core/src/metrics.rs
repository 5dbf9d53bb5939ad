//! Potential Γ, the classical off-diagonal mass, the diagonal-normalized
//! condition number, the closed-form bounds tying them together, and the
//! drift pseudo-metrics used by the stability diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::dense::{self, householder_qr, sym_eigen_jacobi, Lu};
use crate::matcore::{diagonal_normalize, norm2, Matrix, SymmetricMatrix};

/// Tolerance handed to the Jacobi eigensolver for spectral quantities.
const EIG_TOL: f64 = 1e-15;

/// Snapshot of the scale-free observables of a positive diagonal matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PotentialReport {
    pub gamma: f64,
    pub off_hat: f64,
    pub kappa_hat: f64,
    /// Smallest eigenvalue of `B̂`.
    pub sigma_min_hat: f64,
    /// Whether `B̂` admitted a Cholesky factorization. The nonnegativity of Γ
    /// and the bound lemmas are only guaranteed when this is set.
    pub spd: bool,
}

/// Γ(B) = tr(B̂⁻¹) − n.
///
/// Evaluated as `−Σ_{i≠j} (B̂⁻¹)_ij·b̂_ij`, which equals the trace form since
/// `B̂` has a unit diagonal but keeps relative accuracy when Γ is tiny. The
/// inverse comes from the Cholesky factor of `B̂`; if `B̂` is not positive
/// definite but still invertible, LU is used and the result carries no
/// sign guarantee.
pub fn gamma(b: &SymmetricMatrix) -> Result<f64> {
    gamma_with_flag(b).map(|(g, _)| g)
}

/// Γ together with whether the positive definite route was taken.
pub fn gamma_with_flag(b: &SymmetricMatrix) -> Result<(f64, bool)> {
    let hat = diagonal_normalize(b)?;
    let (inv, spd) = match dense::cholesky_lower(&hat) {
        Ok(l) => {
            let linv = dense::invert_lower(&l)?;
            (linv.t_matmul(&linv)?, true)
        }
        Err(Error::NotPositiveDefinite { .. }) => (Lu::factor(hat.as_matrix())?.inverse()?, false),
        Err(e) => return Err(e),
    };
    let n = hat.n();
    let mut sum = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                sum += inv[(i, j)] * hat.get(i, j);
            }
        }
    }
    // `0 − sum` rather than `−sum` so an exactly diagonal input gives +0.
    Ok((0.0 - sum, spd))
}

/// Sum of squared off-diagonal entries.
pub fn off_frobenius(b: &SymmetricMatrix) -> f64 {
    let n = b.n();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..j {
            let x = b.get(i, j);
            s += x * x;
        }
    }
    2.0 * s
}

/// off(B̂).
pub fn off_hat(b: &SymmetricMatrix) -> Result<f64> {
    Ok(off_frobenius(&diagonal_normalize(b)?))
}

/// κ(B̂) and the smallest eigenvalue of `B̂`.
pub fn kappa_hat(b: &SymmetricMatrix) -> Result<(f64, f64)> {
    let hat = diagonal_normalize(b)?;
    let eig = sym_eigen_jacobi(&hat, EIG_TOL);
    let lo = eig.min_value();
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite { step: 0 });
    }
    Ok((eig.max_value() / lo, lo))
}

/// All observables at once.
pub fn potential_report(b: &SymmetricMatrix) -> Result<PotentialReport> {
    let (gamma, spd) = gamma_with_flag(b)?;
    let off_hat = off_hat(b)?;
    let (kappa_hat, sigma_min_hat) = if spd {
        kappa_hat(b)?
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(PotentialReport {
        gamma,
        off_hat,
        kappa_hat,
        sigma_min_hat,
        spd,
    })
}

/// Upper bound on off(B̂) in terms of `g = Γ(B)`:
/// `g·(√(1 + g/4) + √(g/4))²`.
pub fn bound_off_from_gamma(g: f64) -> f64 {
    let s = (1.0 + g / 4.0).sqrt() + (g / 4.0).sqrt();
    g * s * s
}

/// Lower and upper bounds on κ(B̂): `1 + g/n ≤ κ̂ ≤ (1 + √(g/2) + g/2)²`.
pub fn bound_kappa_from_gamma(g: f64, n: usize) -> (f64, f64) {
    let upper = 1.0 + (g / 2.0).sqrt() + g / 2.0;
    (1.0 + g / n as f64, upper * upper)
}

/// Bound on `max(‖B̂‖, ‖B̂⁻¹‖)`: `1 + g/2 + √((1 + g/2)² − 1)`, with the
/// radicand expanded to `g + g²/4` to avoid cancellation at small `g`.
pub fn bound_norm_from_gamma(g: f64) -> f64 {
    1.0 + g / 2.0 + (g + g * g / 4.0).sqrt()
}

/// `max_j ‖a_j/‖a_j‖ − a'_j/‖a'_j‖‖₂`.
pub fn dist_one(a: &Matrix, a2: &Matrix) -> Result<f64> {
    if a.shape() != a2.shape() {
        return Err(Error::Dimension("dist_one needs equal shapes".into()));
    }
    let u = a.normalize_columns()?;
    let v = a2.normalize_columns()?;
    let mut worst: f64 = 0.0;
    let mut diff = vec![0.0; a.rows()];
    for j in 0..a.cols() {
        for (d, (x, y)) in diff.iter_mut().zip(u.col(j).iter().zip(v.col(j))) {
            *d = x - y;
        }
        worst = worst.max(norm2(&diff));
    }
    Ok(worst)
}

/// `sup_ij |b̂_ij − b̂'_ij|` over the diagonal normalizations.
pub fn dist_two(b: &SymmetricMatrix, b2: &SymmetricMatrix) -> Result<f64> {
    if b.n() != b2.n() {
        return Err(Error::Dimension("dist_two needs equal orders".into()));
    }
    let x = diagonal_normalize(b)?;
    let y = diagonal_normalize(b2)?;
    Ok(x.as_matrix().sub(y.as_matrix())?.max_abs())
}

/// Gap metric between `col(A)` and `col(A2)`: the sine of the largest
/// principal angle, evaluated as `‖(I − Q_V·Q_Vᵀ)·Q_W‖₂` so small angles
/// keep full relative accuracy.
pub fn subspace_distance(a: &Matrix, a2: &Matrix) -> Result<f64> {
    if a.shape() != a2.shape() {
        return Err(Error::Dimension("subspace_distance needs equal shapes".into()));
    }
    let (qv, _) = householder_qr(a)?;
    let (qw, _) = householder_qr(a2)?;
    let one_way = |p: &Matrix, q: &Matrix| -> Result<f64> {
        let proj = p.matmul(&p.t_matmul(q)?)?;
        Ok(dense::spectral_norm(&q.sub(&proj)?))
    };
    // Both directions agree mathematically; take the max so the result is symmetric.
    let d = one_way(&qv, &qw)?.max(one_way(&qw, &qv)?);
    Ok(d.min(1.0))
}
