use std::ops::Index;

use super::{Matrix, PivotSet};
use crate::error::{Error, Result};

/// Real symmetric matrix. Stores the full square; every write goes to both
/// mirrored positions so `b[(i, j)] == b[(j, i)]` holds bit-exactly.
#[derive(Clone, PartialEq, Debug)]
pub struct SymmetricMatrix {
    inner: Matrix,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            inner: Matrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix {
            inner: Matrix::identity(n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymmetricMatrix {
            inner: Matrix::from_diagonal(diag),
        }
    }

    /// Accepts a square matrix only if it is exactly symmetric.
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix is not square",
                m.rows(),
                m.cols()
            )));
        }
        for j in 0..m.cols() {
            for i in (j + 1)..m.rows() {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(SymmetricMatrix { inner: m })
    }

    /// Takes the lower triangle of a square matrix and mirrors it upward.
    pub fn from_lower(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("matrix is not square".into()));
        }
        let n = m.rows();
        let mut s = SymmetricMatrix::zeros(n);
        for j in 0..n {
            for i in j..n {
                s.set(i, j, m[(i, j)]);
            }
        }
        Ok(s)
    }

    /// Builds from a row-major literal; panics if it is not exactly symmetric.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        SymmetricMatrix::from_matrix(Matrix::from_rows(rows)).expect("literal is not symmetric")
    }

    /// Evaluates `f` on the upper triangle and mirrors.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut s = SymmetricMatrix::zeros(n);
        for j in 0..n {
            for i in 0..=j {
                s.set(i, j, f(i, j));
            }
        }
        s
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.inner[(i, j)] = v;
        self.inner[(j, i)] = v;
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.inner.diagonal()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|j| (0..n).all(|i| i == j || self.get(i, j) == 0.0))
    }

    /// Congruence `Mᵀ · self · M` computed densely, symmetrized by averaging.
    pub fn congruence(&self, m: &Matrix) -> Result<SymmetricMatrix> {
        let prod = m.t_matmul(&self.inner.matmul(m)?)?;
        let n = prod.rows();
        Ok(SymmetricMatrix::from_fn(n, |i, j| {
            0.5 * (prod[(i, j)] + prod[(j, i)])
        }))
    }

    /// Symmetric permutation `P·B·Pᵀ` where row/col `i` moves to `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> SymmetricMatrix {
        let n = self.n();
        let mut out = SymmetricMatrix::zeros(n);
        for j in 0..n {
            for i in 0..=j {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }

    /// Principal submatrix on rows/columns `J`.
    pub fn extract_principal(&self, j: &PivotSet) -> Result<SymmetricMatrix> {
        super::extract_principal_submatrix(self, j)
    }
}

impl Index<(usize, usize)> for SymmetricMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.inner[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirrored_writes() {
        let mut s = SymmetricMatrix::zeros(3);
        s.set(0, 2, 1.5);
        assert_eq!(s.get(2, 0), 1.5);
        assert_eq!(s[(0, 2)], s[(2, 0)]);
    }

    #[test]
    fn from_matrix_requires_exact_symmetry() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[2.0 + 1e-16 * 4.0, 1.0]]);
        assert_eq!(
            SymmetricMatrix::from_matrix(m).unwrap_err(),
            Error::NotSymmetric { row: 1, col: 0 }
        );
        assert!(SymmetricMatrix::from_matrix(Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn permute_moves_entries() {
        let b = SymmetricMatrix::from_rows(&[&[1.0, 2.0, 0.0], &[2.0, 3.0, 4.0], &[0.0, 4.0, 5.0]]);
        // 0 -> 2, 1 -> 0, 2 -> 1
        let p = b.permute(&[2, 0, 1]);
        assert_eq!(p.get(2, 2), 1.0);
        assert_eq!(p.get(2, 0), 2.0);
        assert_eq!(p.get(0, 1), 4.0);
    }
}
