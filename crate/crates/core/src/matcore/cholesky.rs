use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Matrix, ScalarField, Tolerances};
use crate::error::{Error, Result};

/// Diagonally pivoted Cholesky factorization `P* A P = L L*`.
#[derive(Clone, Debug)]
pub struct PivotedCholesky {
    /// `n x rank` lower-trapezoidal factor. A zero input gives a single
    /// zero column.
    pub l: Matrix,
    /// `perm[i]` is the row/column of `A` placed at position `i`, so
    /// `(P* A P)[i][j] = A[perm[i]][perm[j]]`.
    pub perm: Vec<usize>,
    pub rank: usize,
}

/// Complete diagonal pivoting; stops once the largest remaining diagonal
/// drops to `psd_negativity * trace(A) / n`. A remaining diagonal below the
/// negative of that threshold means the input is indefinite.
pub fn pivoted_cholesky(a: &Matrix, tol: &Tolerances) -> Result<PivotedCholesky> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut work: DMatrix<Complex64> = a.hermitian_part()?.to_complex();
    let trace = work.trace().re;
    let threshold = tol.psd_negativity * trace.abs() / n as f64;

    let mut perm: Vec<usize> = (0..n).collect();
    let mut l: DMatrix<Complex64> = DMatrix::zeros(n, n);
    let mut rank = 0;

    for k in 0..n {
        let (pivot_idx, pivot) = (k..n)
            .map(|i| (i, work[(i, i)].re))
            .fold((k, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= threshold {
            if let Some(bad) = (k..n).map(|i| work[(i, i)].re).find(|&d| d < -threshold) {
                return Err(Error::CholeskyBreakdown { step: k, pivot: bad });
            }
            break;
        }
        if pivot_idx != k {
            work.swap_rows(k, pivot_idx);
            work.swap_columns(k, pivot_idx);
            l.swap_rows(k, pivot_idx);
            perm.swap(k, pivot_idx);
        }
        let d = pivot.sqrt();
        l[(k, k)] = Complex64::new(d, 0.0);
        for i in k + 1..n {
            l[(i, k)] = work[(i, k)] / d;
        }
        for j in k + 1..n {
            let ljk = l[(j, k)].conj();
            for i in k + 1..n {
                let lik = l[(i, k)];
                work[(i, j)] -= lik * ljk;
            }
        }
        rank += 1;
    }

    let cols = rank.max(1);
    let factor = l.columns(0, cols).into_owned();
    let l = match a.field() {
        ScalarField::Real => Matrix::real_unchecked(factor.map(|z| z.re)),
        ScalarField::Complex => Matrix::complex_unchecked(factor),
    };
    Ok(PivotedCholesky { l, perm, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{sample, SampleSpec};

    fn permuted(a: &Matrix, perm: &[usize]) -> Matrix {
        let n = perm.len();
        let entries: Vec<Complex64> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| a.get(perm[i], perm[j]))
            .collect();
        Matrix::from_row_major_complex(n, n, &entries).unwrap()
    }

    #[test]
    fn identity_factors_to_identity() {
        let f = pivoted_cholesky(&Matrix::identity(4), &Tolerances::default()).unwrap();
        assert_eq!(f.rank, 4);
        assert_eq!(f.l, Matrix::identity(4));
    }

    #[test]
    fn diagonal_factor_is_elementwise_root() {
        let alpha: f64 = 0.3;
        let a = Matrix::diag(&[1.0, alpha * alpha, alpha * alpha]).unwrap();
        let f = pivoted_cholesky(&a, &Tolerances::default()).unwrap();
        assert_eq!(f.perm, vec![0, 1, 2]);
        let expect = Matrix::diag(&[1.0, alpha, alpha]).unwrap();
        assert!(f.l.sub(&expect).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn pivots_largest_diagonal_first() {
        let a = Matrix::diag(&[1.0, 4.0, 2.0]).unwrap();
        let f = pivoted_cholesky(&a, &Tolerances::default()).unwrap();
        assert_eq!(f.perm, vec![1, 2, 0]);
    }

    #[test]
    fn reconstructs_rank_deficient_gram() {
        let tol = Tolerances::default();
        let a = sample(&SampleSpec::psd_gram(3, 7, 21).with_field(ScalarField::Complex)).unwrap();
        let f = pivoted_cholesky(&a, &tol).unwrap();
        assert_eq!(f.rank, 3);
        let lhs = permuted(&a, &f.perm);
        let err = f.l.outer_gram().sub(&lhs).unwrap().max_abs();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn indefinite_input_breaks_down() {
        let a = Matrix::diag(&[1.0, -1.0]).unwrap();
        assert!(matches!(
            pivoted_cholesky(&a, &Tolerances::default()),
            Err(Error::CholeskyBreakdown { .. })
        ));
    }

    #[test]
    fn zero_matrix() {
        let f = pivoted_cholesky(&Matrix::zeros(3, 3), &Tolerances::default()).unwrap();
        assert_eq!(f.rank, 0);
        assert_eq!(f.l.shape(), (3, 1));
        assert!(f.l.is_zero());
    }
}
