//! Dense matrix values and the in-place pivot updates.
//!
//! A pivot update with local transform `S` (`k×k`) on pivot set `J` acts as
//!
//! * one-sided: `A_J ← A_J·S`,
//! * two-sided: `B ← Eᵀ·B·E` where `E` is the identity with `S` embedded at `J×J`,
//! * accumulation: rows `J` of `T_acc` ← `S⁻¹·(rows J)`,
//!
//! so `A = A⁽ᵗ⁾·T_acc` and `B = T_accᵀ·B⁽ᵗ⁾·T_acc` hold after every step.

pub mod dense;
mod matrix;
mod pivot_set;
mod symmetric;

pub use matrix::{dot, norm2, Matrix};
pub use pivot_set::PivotSet;
pub use symmetric::SymmetricMatrix;

use crate::error::{Error, Result};

/// Structure of a local transform, used to pick the solve in
/// [`accumulate_transform`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Orthogonal,
    Upper,
    UnitUpper,
    Lower,
    General,
}

/// Columns `J` of `A`, in order, as a `d×k` matrix.
pub fn extract_columns(a: &Matrix, j: &PivotSet) -> Result<Matrix> {
    j.check_order(a.cols())?;
    let d = a.rows();
    let mut data = Vec::with_capacity(d * j.k());
    for &c in j.indices() {
        data.extend_from_slice(a.col(c));
    }
    Matrix::from_col_major(d, j.k(), data)
}

/// Principal `k×k` submatrix of `B` on rows and columns `J`.
pub fn extract_principal_submatrix(b: &SymmetricMatrix, j: &PivotSet) -> Result<SymmetricMatrix> {
    j.check_order(b.n())?;
    let idx = j.indices();
    Ok(SymmetricMatrix::from_fn(j.k(), |r, c| b.get(idx[r], idx[c])))
}

/// `D^{-1/2}·B·D^{-1/2}` with `D = diag(B)`; the result has an exact unit diagonal.
pub fn diagonal_normalize(b: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let n = b.n();
    let diag = b.diagonal();
    if let Some(index) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::NonPositiveDiagonal {
            index,
            value: diag[index],
        });
    }
    let roots: Vec<f64> = diag.iter().map(|d| d.sqrt()).collect();
    Ok(SymmetricMatrix::from_fn(n, |i, j| {
        if i == j {
            1.0
        } else {
            b.get(i, j) / (roots[i] * roots[j])
        }
    }))
}

fn check_local(s: &Matrix, j: &PivotSet) -> Result<()> {
    if s.rows() != j.k() || s.cols() != j.k() {
        return Err(Error::Dimension(format!(
            "local transform is {}x{} but the pivot has {} indices",
            s.rows(),
            s.cols(),
            j.k()
        )));
    }
    Ok(())
}

/// Replaces columns `J` of `A` by `A_J·S`; other columns are untouched.
pub fn apply_one_sided_update(a: &mut Matrix, j: &PivotSet, s: &Matrix) -> Result<()> {
    check_local(s, j)?;
    let old = extract_columns(a, j)?;
    let new = old.matmul(s)?;
    for (pos, &c) in j.indices().iter().enumerate() {
        a.col_mut(c).copy_from_slice(new.col(pos));
    }
    Ok(())
}

/// Two-sided congruence on pivot `J`: rows and columns outside `J` see
/// `b_{r,J} ← b_{r,J}·S`, the block becomes `Sᵀ·B_JJ·S`. Symmetry is kept
/// bit-exactly by mirrored writes; the block is symmetrized by averaging.
pub fn apply_two_sided_update(b: &mut SymmetricMatrix, j: &PivotSet, s: &Matrix) -> Result<()> {
    check_local(s, j)?;
    j.check_order(b.n())?;
    let n = b.n();
    let k = j.k();
    let idx = j.indices();
    let mut row = vec![0.0; k];
    let mut out = vec![0.0; k];
    for r in 0..n {
        if j.contains(r) {
            continue;
        }
        for (pos, &c) in idx.iter().enumerate() {
            row[pos] = b.get(r, c);
        }
        for (c, o) in out.iter_mut().enumerate() {
            *o = dot(&row, s.col(c));
        }
        for (pos, &c) in idx.iter().enumerate() {
            b.set(r, c, out[pos]);
        }
    }
    let block = extract_principal_submatrix(b, j)?;
    let new_block = block.congruence(s)?;
    for a in 0..k {
        for c in a..k {
            b.set(idx[a], idx[c], new_block.get(a, c));
        }
    }
    Ok(())
}

/// Rows `J` of `T_acc` ← `S⁻¹·(rows J)`, by triangular solve for triangular
/// structure, `Sᵀ` for orthogonal `S`, and LU otherwise. `S⁻¹` is never formed.
pub fn accumulate_transform(
    t_acc: &mut Matrix,
    j: &PivotSet,
    s: &Matrix,
    structure: Structure,
) -> Result<()> {
    check_local(s, j)?;
    j.check_order(t_acc.rows())?;
    let n = t_acc.cols();
    let idx = j.indices();
    let mut rows = Matrix::from_fn(j.k(), n, |a, c| t_acc[(idx[a], c)]);
    let solved = match structure {
        Structure::Upper => {
            dense::solve_upper_in_place(s, &mut rows, false)?;
            rows
        }
        Structure::UnitUpper => {
            dense::solve_upper_in_place(s, &mut rows, true)?;
            rows
        }
        Structure::Lower => {
            dense::solve_lower_in_place(s, &mut rows, false)?;
            rows
        }
        Structure::Orthogonal => s.t_matmul(&rows)?,
        Structure::General => dense::Lu::factor(s)?.solve(&rows)?,
    };
    for (a, &r) in idx.iter().enumerate() {
        for c in 0..n {
            t_acc[(r, c)] = solved[(a, c)];
        }
    }
    Ok(())
}

/// Embeds `S` into an `n×n` identity at rows/columns `J`.
pub fn embed(n: usize, j: &PivotSet, s: &Matrix) -> Result<Matrix> {
    check_local(s, j)?;
    j.check_order(n)?;
    let mut e = Matrix::identity(n);
    let idx = j.indices();
    for (a, &r) in idx.iter().enumerate() {
        for (c, &col) in idx.iter().enumerate() {
            e[(r, col)] = s[(a, c)];
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(i: usize, j: usize) -> PivotSet {
        PivotSet::pair(i, j).unwrap()
    }

    #[test]
    fn extract_columns_examples() {
        let i3 = Matrix::identity(3);
        let e = extract_columns(&i3, &pair(0, 2)).unwrap();
        assert_eq!(e, Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0]]));

        let a = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let e = extract_columns(&a, &pair(1, 2)).unwrap();
        assert_eq!(e, Matrix::from_rows(&[&[2.0, 3.0], &[5.0, 6.0]]));
        assert_eq!(extract_columns(&a, &PivotSet::full(3).unwrap()).unwrap(), a);
        assert!(extract_columns(&a, &pair(1, 3)).is_err());
    }

    #[test]
    fn principal_submatrix_examples() {
        let b = SymmetricMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(
            extract_principal_submatrix(&b, &pair(0, 2)).unwrap(),
            SymmetricMatrix::from_diagonal(&[1.0, 3.0])
        );
        let b = SymmetricMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert_eq!(extract_principal_submatrix(&b, &pair(0, 1)).unwrap(), b);
        assert!(extract_principal_submatrix(&b, &pair(0, 2)).is_err());
    }

    #[test]
    fn diagonal_normalize_examples() {
        let b = SymmetricMatrix::from_diagonal(&[4.0, 9.0]);
        assert_eq!(diagonal_normalize(&b).unwrap(), SymmetricMatrix::identity(2));

        let b = SymmetricMatrix::from_rows(&[&[4.0, 2.0], &[2.0, 9.0]]);
        let h = diagonal_normalize(&b).unwrap();
        assert_eq!(h.get(0, 0), 1.0);
        assert_eq!(h.get(1, 1), 1.0);
        assert!((h.get(0, 1) - 1.0 / 3.0).abs() < 1e-16);

        // t = 2 member of the t²/t family
        let b = SymmetricMatrix::from_rows(&[&[4.0, 2.0], &[2.0, 4.0]]);
        let h = diagonal_normalize(&b).unwrap();
        assert_eq!(h, SymmetricMatrix::from_rows(&[&[1.0, 0.5], &[0.5, 1.0]]));
    }

    #[test]
    fn diagonal_normalize_reports_index() {
        let b = SymmetricMatrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, -2.0]]);
        assert_eq!(
            diagonal_normalize(&b).unwrap_err(),
            Error::NonPositiveDiagonal {
                index: 2,
                value: -2.0
            }
        );
    }

    #[test]
    fn one_sided_examples() {
        let mut a = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let before = a.clone();
        apply_one_sided_update(&mut a, &pair(0, 2), &Matrix::identity(2)).unwrap();
        assert_eq!(a, before);

        let mut a = Matrix::identity(2);
        let swap = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        apply_one_sided_update(&mut a, &pair(0, 1), &swap).unwrap();
        assert_eq!(a, swap);

        // Gram-Schmidt step on [e1, (e1+e2)/√2], α = 1/√2:
        // S = [[1, -α/√(1-α²)], [0, 1/√(1-α²)]] = [[1, -1], [0, √2]].
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = Matrix::from_rows(&[&[1.0, r], &[0.0, r]]);
        let s = Matrix::from_rows(&[&[1.0, -1.0], &[0.0, std::f64::consts::SQRT_2]]);
        apply_one_sided_update(&mut a, &pair(0, 1), &s).unwrap();
        assert!(a.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-15);

        assert!(apply_one_sided_update(&mut a, &pair(0, 1), &Matrix::identity(3)).is_err());
    }

    #[test]
    fn two_sided_identity_and_full() {
        let b0 = SymmetricMatrix::from_rows(&[&[4.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.5, 0.2, 2.0]]);
        let mut b = b0.clone();
        apply_two_sided_update(&mut b, &pair(0, 2), &Matrix::identity(2)).unwrap();
        assert_eq!(b, b0);

        let s = Matrix::from_rows(&[&[1.0, 0.3, -0.2], &[0.1, 2.0, 0.0], &[0.0, 0.4, 1.5]]);
        let mut b = b0.clone();
        apply_two_sided_update(&mut b, &PivotSet::full(3).unwrap(), &s).unwrap();
        let dense = s.t_matmul(&b0.as_matrix().matmul(&s).unwrap()).unwrap();
        assert!(b.as_matrix().sub(&dense).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn accumulate_examples() {
        let mut t = Matrix::identity(3);
        accumulate_transform(&mut t, &pair(0, 2), &Matrix::identity(2), Structure::General).unwrap();
        assert_eq!(t, Matrix::identity(3));

        let s = Matrix::from_rows(&[&[2.0, 1.0], &[0.0, 4.0]]);
        let mut t = Matrix::identity(3);
        accumulate_transform(&mut t, &pair(0, 1), &s, Structure::Upper).unwrap();
        let sinv = Matrix::from_rows(&[&[0.5, -0.125], &[0.0, 0.25]]);
        let expected = embed(3, &pair(0, 1), &sinv).unwrap();
        assert!(t.sub(&expected).unwrap().max_abs() < 1e-16);

        let mut t2 = Matrix::identity(3);
        accumulate_transform(&mut t2, &pair(0, 1), &s, Structure::General).unwrap();
        assert!(t2.sub(&expected).unwrap().max_abs() < 1e-16);

        let singular = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(
            accumulate_transform(&mut t2, &pair(0, 1), &singular, Structure::General).unwrap_err(),
            Error::Singular
        );
    }
}
