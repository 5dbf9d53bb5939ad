//! Random test matrices.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matcore::dense::householder_qr;
use crate::matcore::{Matrix, SymmetricMatrix};
use crate::metrics::kappa_hat;

const RETRIES: usize = 16;

fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let mut data = Vec::with_capacity(rows * cols);
    data.extend((0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)));
    Matrix::from_col_major(rows, cols, data).expect("gaussian samples are finite")
}

/// `d×n` matrix with columns independently uniform on the unit sphere.
pub fn gen_haar_columns<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Matrix> {
    if d == 0 || n == 0 {
        return Err(Error::Dimension(format!("need d, n >= 1, got {d}x{n}")));
    }
    loop {
        // A zero Gaussian column has probability zero; redraw if it happens.
        if let Ok(m) = gaussian(d, n, rng).normalize_columns() {
            return Ok(m);
        }
    }
}

/// Haar-distributed orthogonal `n×n` matrix.
pub fn gen_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Matrix> {
    for _ in 0..RETRIES {
        let Ok((mut q, r)) = householder_qr(&gaussian(n, n, rng)) else {
            continue;
        };
        for j in 0..n {
            if r[(j, j)] < 0.0 {
                q.col_mut(j).iter_mut().for_each(|x| *x = -*x);
            }
        }
        return Ok(q);
    }
    Err(Error::RankDeficient)
}

/// Rotates the plane `(i, j)` so that `b_ii` becomes exactly one; the
/// trace and the spectrum are preserved. Needs `(b_ii − 1)(b_jj − 1) < 0`.
fn rotate_to_unit(b: &mut SymmetricMatrix, i: usize, j: usize) {
    let (bii, bij, bjj) = (b.get(i, i), b.get(i, j), b.get(j, j));
    // Roots of (b_jj − 1)t² − 2b_ij·t + (b_ii − 1) = 0, cancellation-free form.
    let disc = (bij * bij - (bii - 1.0) * (bjj - 1.0)).sqrt();
    let sign = if bij >= 0.0 { 1.0 } else { -1.0 };
    let t = (bii - 1.0) / (bij + sign * disc);
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // Basis change e_i ← c·e_i − s·e_j, e_j ← s·e_i + c·e_j.
    let n = b.n();
    for r in 0..n {
        if r == i || r == j {
            continue;
        }
        let (x, y) = (b.get(r, i), b.get(r, j));
        b.set(r, i, c * x - s * y);
        b.set(r, j, s * x + c * y);
    }
    let new_jj = s * s * bii + 2.0 * c * s * bij + c * c * bjj;
    let new_ij = c * s * (bii - bjj) + (c * c - s * s) * bij;
    b.set(i, i, 1.0);
    b.set(j, j, new_jj);
    b.set(i, j, new_ij);
}

/// Unit-diagonal SPD matrix of order `n` with κ(B̂) within 10% of `kappa`.
///
/// The spectrum is geometric from `λ_min` to `kappa·λ_min` with trace `n`;
/// a random orthogonal similarity is followed by plane rotations that move
/// each diagonal entry to one without touching the eigenvalues.
pub fn gen_spd_kappahat<R: Rng + ?Sized>(n: usize, kappa: f64, rng: &mut R) -> Result<SymmetricMatrix> {
    if n == 0 {
        return Err(Error::Dimension("order must be at least 1".into()));
    }
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::Config(format!("kappa must be a finite value >= 1, got {kappa}")));
    }
    if n == 1 || kappa == 1.0 {
        return Ok(SymmetricMatrix::identity(n));
    }
    let raw: Vec<f64> = (0..n).map(|i| kappa.powf(i as f64 / (n - 1) as f64)).collect();
    let total: f64 = raw.iter().sum();
    let spectrum: Vec<f64> = raw.iter().map(|l| l * n as f64 / total).collect();
    for _ in 0..RETRIES {
        let q = gen_orthogonal(n, rng)?;
        let mut b = SymmetricMatrix::from_diagonal(&spectrum).congruence(&q.transpose())?;
        unit_diagonal(&mut b);
        if let Ok((k, _)) = kappa_hat(&b) {
            if (k - kappa).abs() <= 0.1 * kappa {
                return Ok(b);
            }
        }
    }
    Err(Error::Config(format!("could not reach kappa_hat = {kappa} at order {n}")))
}

fn unit_diagonal(b: &mut SymmetricMatrix) {
    let n = b.n();
    let tol = 1e-14;
    loop {
        let below = (0..n).find(|&i| b.get(i, i) < 1.0 - tol);
        let above = (0..n).find(|&i| b.get(i, i) > 1.0 + tol);
        match (below, above) {
            (Some(i), Some(j)) => rotate_to_unit(b, i, j),
            // With trace n the remaining entries are within roundoff of one.
            (Some(i), None) | (None, Some(i)) => {
                let j = (0..n).find(|&j| j != i).unwrap_or(i);
                if (b.get(i, i) - 1.0) * (b.get(j, j) - 1.0) < 0.0 {
                    rotate_to_unit(b, i, j);
                }
                break;
            }
            (None, None) => break,
        }
    }
    for i in 0..n {
        b.set(i, i, 1.0);
    }
}

/// `D·C·D` with `C` from [`gen_spd_kappahat`] and `D` geometric from 1 to
/// `spread`. Since κ̂ ignores diagonal scaling, κ̂ of the result is that of `C`.
pub fn gen_graded<R: Rng + ?Sized>(n: usize, spread: f64, kappa_hat: f64, rng: &mut R) -> Result<SymmetricMatrix> {
    if !(spread >= 1.0) || !spread.is_finite() {
        return Err(Error::Config(format!("spread must be a finite value >= 1, got {spread}")));
    }
    let c = gen_spd_kappahat(n, kappa_hat, rng)?;
    let d: Vec<f64> = (0..n)
        .map(|i| if n == 1 { 1.0 } else { spread.powf(i as f64 / (n - 1) as f64) })
        .collect();
    Ok(SymmetricMatrix::from_fn(n, |i, j| d[i] * c.get(i, j) * d[j]))
}

/// Hilbert matrix `1/(i + j + 1)`: badly conditioned, modest κ̂.
pub fn hilbert(n: usize) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(n, |i, j| 1.0 / (i + j + 1) as f64)
}
