use nalgebra::{ComplexField, DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;

use super::{Matrix, Spectrum, SpectrumKind, Storage, Tolerances};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 100_000;

/// Thin singular value decomposition `A = U diag(s) V*` with `s` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    /// `m x k` with orthonormal columns, `k = min(m, n)`.
    pub u: Matrix,
    pub values: Vec<f64>,
    /// `n x k` with orthonormal columns.
    pub v: Matrix,
}

/// Eigendecomposition `A = V diag(values) V*` of a Hermitian matrix with
/// eigenvalues descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

fn sorted_desc_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

fn permute_columns<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>, order: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), order.len(), |i, j| m[(i, order[j])])
}

fn raw_singular_values<T>(m: &DMatrix<T>) -> Result<Vec<f64>>
where
    T: ComplexField<RealField = f64>,
{
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, MAX_ITERATIONS)
        .ok_or(Error::NoConvergence("singular value decomposition"))?;
    Ok(svd.singular_values.iter().copied().collect())
}

/// One factorization attempt, accepted only if it reproduces `m`.
fn checked_svd<T>(m: &DMatrix<T>) -> Option<(DMatrix<T>, Vec<f64>, DMatrix<T>)>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let svd = SVD::try_new(m.clone(), true, true, 5.0 * f64::EPSILON, MAX_ITERATIONS)?;
    let values: Vec<f64> = svd.singular_values.iter().map(|s| s.max(0.0)).collect();
    let u = svd.u?;
    let v = svd.v_t?.adjoint();
    let d = DMatrix::from_fn(values.len(), values.len(), |i, j| {
        if i == j {
            T::from_real(values[i])
        } else {
            T::zero()
        }
    });
    let residual = (&u * d * v.adjoint() - m)
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.modulus()));
    let top = values.iter().cloned().fold(0.0, f64::max);
    let scale = top * m.nrows().max(m.ncols()) as f64;
    (residual <= 1e-12 * scale.max(f64::MIN_POSITIVE)).then_some((u, values, v))
}

fn reverse_rows<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>) -> DMatrix<T> {
    let r = m.nrows();
    DMatrix::from_fn(r, m.ncols(), |i, j| m[(r - 1 - i, j)])
}

/// nalgebra occasionally returns inaccurate singular vectors for
/// rank-deficient input. Each failed attempt is retried on an exactly
/// equivalent matrix: `A*`, then `A P` and `(A P)*` with `P` reversing the
/// column order.
fn raw_svd<T>(m: &DMatrix<T>) -> Result<(DMatrix<T>, Vec<f64>, DMatrix<T>)>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let reversed = reverse_rows(&m.transpose()).transpose();
    let (u, values, v) = checked_svd(m)
        .or_else(|| checked_svd(&m.adjoint()).map(|(u, s, v)| (v, s, u)))
        .or_else(|| checked_svd(&reversed).map(|(u, s, v)| (u, s, reverse_rows(&v))))
        .or_else(|| checked_svd(&reversed.adjoint()).map(|(u, s, v)| (v, s, reverse_rows(&u))))
        .ok_or(Error::NoConvergence("singular value decomposition"))?;
    let order = sorted_desc_order(&values);
    Ok((
        permute_columns(&u, &order),
        order.iter().map(|&i| values[i]).collect(),
        permute_columns(&v, &order),
    ))
}

fn raw_eigen<T>(m: &DMatrix<T>) -> Result<(Vec<f64>, DMatrix<T>)>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_ITERATIONS)
        .ok_or(Error::NoConvergence("Hermitian eigendecomposition"))?;
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = sorted_desc_order(&values);
    Ok((
        order.iter().map(|&i| values[i]).collect(),
        permute_columns(&eig.eigenvectors, &order),
    ))
}

/// Descending singular values. Round-off negatives are clamped to zero.
pub fn singular_values(a: &Matrix) -> Result<Spectrum> {
    let values = match &a.storage {
        Storage::Real(m) => raw_singular_values(m)?,
        Storage::Complex(m) => raw_singular_values(m)?,
    };
    Spectrum::singular_from_unsorted(values, a.shape())
}

pub fn svd(a: &Matrix) -> Result<Svd> {
    Ok(match &a.storage {
        Storage::Real(m) => {
            let (u, values, v) = raw_svd(m)?;
            Svd {
                u: Matrix::real_unchecked(u),
                values,
                v: Matrix::real_unchecked(v),
            }
        }
        Storage::Complex(m) => {
            let (u, values, v) = raw_svd(m)?;
            Svd {
                u: Matrix::complex_unchecked(u),
                values,
                v: Matrix::complex_unchecked(v),
            }
        }
    })
}

/// `max |A - A*|` over all entries.
pub fn max_asymmetry(a: &Matrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a.get(i, j) - a.get(j, i).conj()).norm());
        }
    }
    Ok(worst)
}

pub fn is_hermitian(a: &Matrix, tol: &Tolerances) -> Result<bool> {
    let asym = max_asymmetry(a)?;
    Ok(asym <= tol.hermitian_asym * a.max_abs().max(1.0))
}

fn require_hermitian(a: &Matrix, tol: &Tolerances) -> Result<()> {
    let asym = max_asymmetry(a)?;
    if asym > tol.hermitian_asym * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { max_asymmetry: asym });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized
/// before factoring so round-off asymmetry below tolerance is ignored.
pub fn hermitian_eigen(a: &Matrix, tol: &Tolerances) -> Result<HermitianEigen> {
    require_hermitian(a, tol)?;
    let h = a.hermitian_part()?;
    Ok(match &h.storage {
        Storage::Real(m) => {
            let (values, vectors) = raw_eigen(m)?;
            HermitianEigen {
                values,
                vectors: Matrix::real_unchecked(vectors),
            }
        }
        Storage::Complex(m) => {
            let (values, vectors) = raw_eigen(m)?;
            HermitianEigen {
                values,
                vectors: Matrix::complex_unchecked(vectors),
            }
        }
    })
}

pub fn hermitian_eigenvalues(a: &Matrix, tol: &Tolerances) -> Result<Spectrum> {
    let eig = hermitian_eigen(a, tol)?;
    Spectrum::new(eig.values, SpectrumKind::HermitianEigen, a.shape())
}

/// Eigen-spectrum of `a` if it is Hermitian positive semi-definite within
/// tolerance; otherwise the precondition error carrying `lambda_min`.
pub fn psd_spectrum(a: &Matrix, tol: &Tolerances) -> Result<Spectrum> {
    let spec = hermitian_eigenvalues(a, tol)?;
    let lambda_max = spec.largest();
    let lambda_min = spec.smallest();
    if lambda_min < -tol.psd_negativity * lambda_max.max(1.0) {
        return Err(Error::NotPsd { lambda_min });
    }
    Ok(spec)
}

pub fn is_psd(a: &Matrix, tol: &Tolerances) -> Result<bool> {
    match psd_spectrum(a, tol) {
        Ok(_) => Ok(true),
        Err(Error::NotHermitian { .. }) | Err(Error::NotPsd { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Hermitian PSD square root built from the eigendecomposition. Negative
/// round-off eigenvalues are clamped to zero.
pub fn psd_sqrt(a: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    psd_spectrum(a, tol)?;
    let eig = hermitian_eigen(a, tol)?;
    let roots: Vec<f64> = eig.values.iter().map(|l| l.max(0.0).sqrt()).collect();
    let v = eig.vectors.to_complex();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        roots.len(),
        roots.iter().map(|&r| Complex64::new(r, 0.0)),
    ));
    let root = &v * d * v.adjoint();
    let out = Matrix::complex_unchecked(root);
    Ok(match a.field() {
        super::ScalarField::Real => Matrix::real_unchecked(out.to_complex().map(|z| z.re)),
        super::ScalarField::Complex => out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{sample, SampleSpec, ScalarField};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn singular_values_of_diagonal() {
        let s = singular_values(&Matrix::diag(&[3.0, 4.0]).unwrap()).unwrap();
        assert!(close(s.values(), &[4.0, 3.0], 1e-14));
        let s = singular_values(&Matrix::zeros(2, 3)).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0]);
        assert_eq!(s.kind(), SpectrumKind::Singular);
    }

    #[test]
    fn singular_values_of_shifted_identity() {
        // oracle: the moduli of the diagonal, sorted
        let diag = [1.0, 1.0, 1.0, 1.0, 2.0];
        let mut oracle: Vec<f64> = diag.iter().map(|x: &f64| x.abs()).collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let s = singular_values(&Matrix::diag(&diag).unwrap()).unwrap();
        assert!(close(s.values(), &oracle, 1e-14));
        assert!(close(s.values(), &[2.0, 1.0, 1.0, 1.0, 1.0], 1e-14));
    }

    #[test]
    fn eigenvalues_basic() {
        let tol = Tolerances::default();
        let s = hermitian_eigenvalues(&Matrix::diag(&[1.0, 2.0, 3.0]).unwrap(), &tol).unwrap();
        assert!(close(s.values(), &[3.0, 2.0, 1.0], 1e-14));
        let s = hermitian_eigenvalues(&Matrix::identity(4), &tol).unwrap();
        assert!(close(s.values(), &[1.0; 4], 1e-14));
    }

    #[test]
    fn rank_one_gram_eigenvalue_equals_trace() {
        let tol = Tolerances::default();
        let v = Matrix::from_row_major(4, 1, &[1.0, 2.0, 0.0, 0.0]).unwrap();
        let g = v.outer_gram();
        let trace = g.trace().unwrap().re;
        assert_eq!(trace, 5.0);
        let s = hermitian_eigenvalues(&g, &tol).unwrap();
        assert!(close(s.values(), &[trace, 0.0, 0.0, 0.0], 1e-13));
    }

    #[test]
    fn hermitian_classification() {
        let tol = Tolerances::default();
        assert!(is_hermitian(&Matrix::identity(3), &tol).unwrap());
        let nil = Matrix::from_row_major(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(!is_hermitian(&nil, &tol).unwrap());
        match hermitian_eigenvalues(&nil, &tol) {
            Err(Error::NotHermitian { max_asymmetry }) => assert_eq!(max_asymmetry, 1.0),
            other => panic!("unexpected {other:?}"),
        }
        let x = sample(&SampleSpec::gaussian(4, 4, 3).with_field(ScalarField::Complex)).unwrap();
        assert!(is_hermitian(&x.add(&x.conj_transpose()).unwrap(), &tol).unwrap());
        assert!(is_hermitian(&Matrix::zeros(2, 3), &tol).is_err());
    }

    #[test]
    fn psd_classification() {
        let tol = Tolerances::default();
        assert!(is_psd(&Matrix::identity(5), &tol).unwrap());
        assert!(!is_psd(&Matrix::diag(&[1.0, -1.0]).unwrap(), &tol).unwrap());
        match psd_spectrum(&Matrix::diag(&[1.0, -1.0]).unwrap(), &tol) {
            Err(Error::NotPsd { lambda_min }) => assert_eq!(lambda_min, -1.0),
            other => panic!("unexpected {other:?}"),
        }
        let x = sample(&SampleSpec::gaussian(3, 6, 11)).unwrap();
        assert!(is_psd(&x.gram(), &tol).unwrap());
    }

    #[test]
    fn svd_reconstructs() {
        let a = sample(&SampleSpec::gaussian(5, 3, 1).with_field(ScalarField::Complex)).unwrap();
        let f = svd(&a).unwrap();
        let s = Matrix::diag(&f.values).unwrap();
        let back = f.u.matmul(&s).unwrap().matmul(&f.v.conj_transpose()).unwrap();
        let err = back.sub(&a).unwrap().max_abs();
        assert!(err < 1e-13, "reconstruction error {err}");
        assert!(f.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_reconstructs_rank_deficient() {
        // a plain nalgebra SVD of this input returns inaccurate vectors
        for field in [ScalarField::Real, ScalarField::Complex] {
            for seed in 0..40 {
                let spec = SampleSpec::prescribed_spectrum(5, 5, vec![10.0, 10.0 / 1.7], seed);
                let a = sample(&spec.with_field(field)).unwrap();
                let f = svd(&a).unwrap();
                let s = Matrix::diag(&f.values).unwrap();
                let back = f.u.matmul(&s).unwrap().matmul(&f.v.conj_transpose()).unwrap();
                assert!(back.sub(&a).unwrap().max_abs() < 1e-12, "seed {seed}");
                assert!((f.values[1] - 10.0 / 1.7).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let tol = Tolerances::default();
        let a = sample(&SampleSpec::psd_gram(6, 4, 5).with_field(ScalarField::Complex)).unwrap();
        let r = psd_sqrt(&a, &tol).unwrap();
        let err = r.matmul(&r).unwrap().sub(&a).unwrap().max_abs();
        assert!(err < 1e-12, "{err}");
    }
}
