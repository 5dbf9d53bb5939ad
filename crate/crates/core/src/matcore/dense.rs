//! Small dense kernels shared by the local factorizations, the metrics and
//! the lab: Cholesky, LDLᵀ, LU with partial pivoting, triangular solves,
//! Householder QR and a cyclic Jacobi symmetric eigensolver.

use super::matrix::norm2;
use super::{Matrix, SymmetricMatrix};
use crate::error::{Error, Result};

/// Lower Cholesky factor `L` with `B = L·Lᵀ` and positive diagonal.
pub fn cholesky_lower(b: &SymmetricMatrix) -> Result<Matrix> {
    let n = b.n();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = b.get(j, j);
        for p in 0..j {
            d -= l[(j, p)] * l[(j, p)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { step: j });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = b.get(i, j);
            for p in 0..j {
                s -= l[(i, p)] * l[(j, p)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// `B = L·diag(d)·Lᵀ` with `L` unit lower triangular. Requires positive pivots.
pub fn ldlt(b: &SymmetricMatrix) -> Result<(Matrix, Vec<f64>)> {
    let n = b.n();
    let mut l = Matrix::identity(n);
    let mut d = vec![0.0; n];
    for j in 0..n {
        let mut dj = b.get(j, j);
        for p in 0..j {
            dj -= l[(j, p)] * l[(j, p)] * d[p];
        }
        if !(dj > 0.0) || !dj.is_finite() {
            return Err(Error::NotPositiveDefinite { step: j });
        }
        d[j] = dj;
        for i in (j + 1)..n {
            let mut s = b.get(i, j);
            for p in 0..j {
                s -= l[(i, p)] * l[(j, p)] * d[p];
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok((l, d))
}

/// Solves `U·X = Y` in place for upper triangular `U`. With `unit`, the
/// diagonal of `U` is taken to be exactly one and never read.
pub fn solve_upper_in_place(u: &Matrix, y: &mut Matrix, unit: bool) -> Result<()> {
    let k = u.rows();
    if !u.is_square() || y.rows() != k {
        return Err(Error::Dimension("triangular solve shape mismatch".into()));
    }
    for c in 0..y.cols() {
        let col = y.col_mut(c);
        for a in (0..k).rev() {
            let mut s = col[a];
            for l in (a + 1)..k {
                s -= u[(a, l)] * col[l];
            }
            col[a] = if unit {
                s
            } else {
                let d = u[(a, a)];
                if d == 0.0 {
                    return Err(Error::Singular);
                }
                s / d
            };
        }
    }
    Ok(())
}

/// Solves `L·X = Y` in place for lower triangular `L`.
pub fn solve_lower_in_place(l: &Matrix, y: &mut Matrix, unit: bool) -> Result<()> {
    let k = l.rows();
    if !l.is_square() || y.rows() != k {
        return Err(Error::Dimension("triangular solve shape mismatch".into()));
    }
    for c in 0..y.cols() {
        let col = y.col_mut(c);
        for a in 0..k {
            let mut s = col[a];
            for p in 0..a {
                s -= l[(a, p)] * col[p];
            }
            col[a] = if unit {
                s
            } else {
                let d = l[(a, a)];
                if d == 0.0 {
                    return Err(Error::Singular);
                }
                s / d
            };
        }
    }
    Ok(())
}

/// Inverse of a lower triangular matrix (itself lower triangular).
pub fn invert_lower(l: &Matrix) -> Result<Matrix> {
    let mut x = Matrix::identity(l.rows());
    solve_lower_in_place(l, &mut x, false)?;
    Ok(x)
}

/// Inverse of an upper triangular matrix; with `unit` the result has an exact unit diagonal.
pub fn invert_upper(u: &Matrix, unit: bool) -> Result<Matrix> {
    let mut x = Matrix::identity(u.rows());
    solve_upper_in_place(u, &mut x, unit)?;
    Ok(x)
}

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Lu> {
        if !a.is_square() {
            return Err(Error::Dimension("LU needs a square matrix".into()));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular);
        }
        for j in 0..n {
            let (p, pmax) = (j..n)
                .map(|i| (i, lu[(i, j)].abs()))
                .fold((j, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= f64::EPSILON * scale * 1e-3 {
                return Err(Error::Singular);
            }
            if p != j {
                perm.swap(p, j);
                for c in 0..n {
                    let tmp = lu[(p, c)];
                    lu[(p, c)] = lu[(j, c)];
                    lu[(j, c)] = tmp;
                }
            }
            let d = lu[(j, j)];
            for i in (j + 1)..n {
                lu[(i, j)] /= d;
            }
            for c in (j + 1)..n {
                let f = lu[(j, c)];
                if f == 0.0 {
                    continue;
                }
                for i in (j + 1)..n {
                    let lij = lu[(i, j)];
                    lu[(i, c)] -= lij * f;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    /// Solves `A·X = Y` for all columns of `Y`.
    pub fn solve(&self, y: &Matrix) -> Result<Matrix> {
        let n = self.lu.rows();
        if y.rows() != n {
            return Err(Error::Dimension("LU solve shape mismatch".into()));
        }
        let mut x = Matrix::from_fn(n, y.cols(), |i, c| y[(self.perm[i], c)]);
        solve_lower_in_place(&self.lu, &mut x, true)?;
        solve_upper_in_place(&self.lu, &mut x, false)?;
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.lu.rows()))
    }
}

/// Thin Householder QR of a `d×n` matrix with `d ≥ n`: returns `Q` (`d×n`,
/// orthonormal columns) and `R` (`n×n`, upper triangular). Fails with
/// [`Error::RankDeficient`] when a diagonal entry of `R` is negligible.
pub fn householder_qr(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let (d, n) = a.shape();
    if d < n {
        return Err(Error::Dimension(format!("QR needs rows >= cols, got {d}x{n}")));
    }
    let mut r = a.clone();
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let x: Vec<f64> = (j..d).map(|i| r[(i, j)]).collect();
        let alpha = norm2(&x);
        let mut v = x;
        if alpha != 0.0 {
            let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
            v[0] += sign * alpha;
            let vn = norm2(&v);
            v.iter_mut().for_each(|x| *x /= vn);
            for c in j..n {
                let s: f64 = v.iter().enumerate().map(|(p, vi)| vi * r[(j + p, c)]).sum();
                for (p, vi) in v.iter().enumerate() {
                    r[(j + p, c)] -= 2.0 * vi * s;
                }
            }
        }
        vs.push(v);
    }
    let scale = (0..n).fold(0.0f64, |m, j| m.max(r[(j, j)].abs()));
    let tol = scale * f64::EPSILON * (d as f64) * 10.0;
    if scale == 0.0 || (0..n).any(|j| r[(j, j)].abs() <= tol) {
        return Err(Error::RankDeficient);
    }
    let mut q = Matrix::from_fn(d, n, |i, j| if i == j { 1.0 } else { 0.0 });
    for j in (0..n).rev() {
        let v = &vs[j];
        for c in 0..n {
            let s: f64 = v.iter().enumerate().map(|(p, vi)| vi * q[(j + p, c)]).sum();
            for (p, vi) in v.iter().enumerate() {
                q[(j + p, c)] -= 2.0 * vi * s;
            }
        }
    }
    let r = Matrix::from_fn(n, n, |i, j| if i <= j { r[(i, j)] } else { 0.0 });
    Ok((q, r))
}

/// Cosine and sine of the classical Jacobi rotation annihilating the
/// off-diagonal of `[[a, b], [b, d]]`, smaller-angle branch (`|θ| ≤ π/4`).
///
/// With `S = [[c, -s], [s, c]]`, `Sᵀ·[[a, b], [b, d]]·S` is diagonal.
pub fn jacobi_rotation(a: f64, b: f64, d: f64) -> (f64, f64) {
    if b == 0.0 {
        return (1.0, 0.0);
    }
    let zeta = (d - a) / (2.0 * b);
    let sign = if zeta > 0.0 { 1.0 } else { -1.0 };
    let t = if zeta.is_finite() {
        -sign / (zeta.abs() + zeta.hypot(1.0))
    } else {
        0.0
    };
    let c = 1.0 / t.hypot(1.0);
    (c, t * c)
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Eigenvalues in the order the Jacobi iteration left them on the diagonal.
    pub values: Vec<f64>,
    /// Orthogonal matrix whose columns are the matching eigenvectors.
    pub vectors: Matrix,
}

impl SymEigen {
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sorted_values_desc(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

/// Cyclic (row-order) Jacobi eigensolver.
///
/// Sweeps until every off-diagonal entry satisfies
/// `|b_ij| ≤ tol·sqrt(|b_ii·b_jj|)` (the relative criterion that keeps
/// graded positive definite matrices accurate), falling back to an absolute
/// floor of `tol·‖B‖_F` for indefinite or zero diagonals. Eigenvector
/// columns are sign-fixed so their largest-magnitude entry is positive.
pub fn sym_eigen_jacobi(b: &SymmetricMatrix, tol: f64) -> SymEigen {
    const MAX_SWEEPS: usize = 100;
    let n = b.n();
    let mut a = b.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let floor = tol * b.frobenius_norm() * 1e-3;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let thresh = (tol * (a[(p, p)] * a[(q, q)]).abs().sqrt()).max(floor);
                if apq.abs() <= thresh {
                    continue;
                }
                rotated = true;
                let (c, s) = jacobi_rotation(a[(p, p)], apq, a[(q, q)]);
                rotate_sym(&mut a, p, q, c, s);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip + s * viq;
                    v[(i, q)] = -s * vip + c * viq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    fix_column_signs(&mut v);
    SymEigen {
        values: a.diagonal(),
        vectors: v,
    }
}

/// `A ← Gᵀ·A·G` for the plane rotation with columns `(c, s)` and `(-s, c)`
/// embedded at `p < q`; the pair block is set to its exact diagonal form.
fn rotate_sym(a: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    let apq = a[(p, q)];
    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        let np = c * aip + s * aiq;
        let nq = -s * aip + c * aiq;
        a[(i, p)] = np;
        a[(p, i)] = np;
        a[(i, q)] = nq;
        a[(q, i)] = nq;
    }
    a[(p, p)] = c * c * app + 2.0 * c * s * apq + s * s * aqq;
    a[(q, q)] = s * s * app - 2.0 * c * s * apq + c * c * aqq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
}

/// Flips each column so its largest-magnitude entry is positive (first one on ties).
pub fn fix_column_signs(v: &mut Matrix) {
    for j in 0..v.cols() {
        let col = v.col(j);
        let mut best = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            v.col_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Largest singular value via the eigenvalues of `Mᵀ·M`.
pub fn spectral_norm(m: &Matrix) -> f64 {
    let g = m.gram();
    sym_eigen_jacobi(&g, 1e-15).max_value().max(0.0).sqrt()
}
