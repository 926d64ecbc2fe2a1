//! Dense matrices over the real or complex field, their spectra, and the
//! Hermitian / positive semi-definite classification every other module
//! relies on.

mod cholesky;
mod decomp;
mod sample;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cholesky::{pivoted_cholesky, PivotedCholesky};
pub use decomp::{
    hermitian_eigen, hermitian_eigenvalues, is_hermitian, is_psd, max_asymmetry, psd_spectrum,
    psd_sqrt, singular_values, svd, HermitianEigen, Svd,
};
pub use sample::{haar_unitary, sample, SampleKind, SampleSpec};

/// Scalar field a matrix lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarField {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// Dense rectangular matrix with finite entries.
///
/// Real matrices are stored without an imaginary part so that purely real
/// workloads never pay for complex arithmetic. Mixed operations promote to
/// complex.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    storage: Storage,
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix { rows, cols });
    }
    Ok(())
}

impl Matrix {
    pub fn from_real(m: DMatrix<f64>) -> Result<Self> {
        check_dims(m.nrows(), m.ncols())?;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if !m[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self {
            storage: Storage::Real(m),
        })
    }

    pub fn from_complex(m: DMatrix<Complex64>) -> Result<Self> {
        check_dims(m.nrows(), m.ncols())?;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self {
            storage: Storage::Complex(m),
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        check_dims(rows, cols)?;
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Self::from_real(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_row_major_complex(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        check_dims(rows, cols)?;
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Self::from_complex(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            storage: Storage::Real(DMatrix::zeros(rows, cols)),
        }
    }

    /// # Panics
    /// If `n` is zero.
    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "matrix dimensions must be positive");
        Self {
            storage: Storage::Real(DMatrix::identity(n, n)),
        }
    }

    /// Square real diagonal matrix.
    pub fn diag(values: &[f64]) -> Result<Self> {
        check_dims(values.len(), values.len())?;
        Self::from_real(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)))
    }

    /// Block-diagonal matrix `[a 0; 0 b]`.
    pub fn block_diagonal(a: &Matrix, b: &Matrix) -> Matrix {
        let (m1, n1) = a.shape();
        let (m2, n2) = b.shape();
        match (&a.storage, &b.storage) {
            (Storage::Real(x), Storage::Real(y)) => {
                let mut out = DMatrix::zeros(m1 + m2, n1 + n2);
                out.view_mut((0, 0), (m1, n1)).copy_from(x);
                out.view_mut((m1, n1), (m2, n2)).copy_from(y);
                Self::real_unchecked(out)
            }
            _ => {
                let mut out = DMatrix::zeros(m1 + m2, n1 + n2);
                out.view_mut((0, 0), (m1, n1)).copy_from(&a.to_complex());
                out.view_mut((m1, n1), (m2, n2)).copy_from(&b.to_complex());
                Self::complex_unchecked(out)
            }
        }
    }

    pub(crate) fn real_unchecked(m: DMatrix<f64>) -> Self {
        debug_assert!(m.nrows() > 0 && m.ncols() > 0);
        Self {
            storage: Storage::Real(m),
        }
    }

    pub(crate) fn complex_unchecked(m: DMatrix<Complex64>) -> Self {
        debug_assert!(m.nrows() > 0 && m.ncols() > 0);
        Self {
            storage: Storage::Complex(m),
        }
    }

    pub fn rows(&self) -> usize {
        match &self.storage {
            Storage::Real(m) => m.nrows(),
            Storage::Complex(m) => m.nrows(),
        }
    }

    pub fn cols(&self) -> usize {
        match &self.storage {
            Storage::Real(m) => m.ncols(),
            Storage::Complex(m) => m.ncols(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn field(&self) -> ScalarField {
        match self.storage {
            Storage::Real(_) => ScalarField::Real,
            Storage::Complex(_) => ScalarField::Complex,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match &self.storage {
            Storage::Real(m) => Complex64::new(m[(i, j)], 0.0),
            Storage::Complex(m) => m[(i, j)],
        }
    }

    /// Borrow the real storage, if this matrix is real.
    pub fn as_real(&self) -> Option<&DMatrix<f64>> {
        match &self.storage {
            Storage::Real(m) => Some(m),
            Storage::Complex(_) => None,
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match &self.storage {
            Storage::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
            Storage::Complex(m) => m.clone(),
        }
    }

    /// Same matrix carried over the complex field.
    pub fn into_complex(self) -> Matrix {
        match self.storage {
            Storage::Real(m) => Self::complex_unchecked(m.map(|x| Complex64::new(x, 0.0))),
            Storage::Complex(_) => self,
        }
    }

    pub fn to_row_major(&self) -> Vec<Complex64> {
        let (m, n) = self.shape();
        let mut out = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Real(m) => m.iter().fold(0.0, |acc, x| acc.max(x.abs())),
            Storage::Complex(m) => m.iter().fold(0.0, |acc, z| acc.max(z.norm())),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    pub fn conj_transpose(&self) -> Matrix {
        match &self.storage {
            Storage::Real(m) => Self::real_unchecked(m.transpose()),
            Storage::Complex(m) => Self::complex_unchecked(m.adjoint()),
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols() != other.rows() {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(match (&self.storage, &other.storage) {
            (Storage::Real(a), Storage::Real(b)) => Self::real_unchecked(a * b),
            _ => Self::complex_unchecked(self.to_complex() * other.to_complex()),
        })
    }

    fn zip_same_shape(
        &self,
        other: &Matrix,
        op: &'static str,
        real: impl Fn(&DMatrix<f64>, &DMatrix<f64>) -> DMatrix<f64>,
        complex: impl Fn(&DMatrix<Complex64>, &DMatrix<Complex64>) -> DMatrix<Complex64>,
    ) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(match (&self.storage, &other.storage) {
            (Storage::Real(a), Storage::Real(b)) => Self::real_unchecked(real(a, b)),
            _ => Self::complex_unchecked(complex(&self.to_complex(), &other.to_complex())),
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_same_shape(other, "add", |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_same_shape(other, "sub", |a, b| a - b, |a, b| a - b)
    }

    pub fn scale(&self, alpha: f64) -> Matrix {
        match &self.storage {
            Storage::Real(m) => Self::real_unchecked(m * alpha),
            Storage::Complex(m) => Self::complex_unchecked(m * Complex64::new(alpha, 0.0)),
        }
    }

    pub fn scale_complex(&self, alpha: Complex64) -> Matrix {
        Self::complex_unchecked(self.to_complex() * alpha)
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        Ok(match &self.storage {
            Storage::Real(m) => Complex64::new(m.trace(), 0.0),
            Storage::Complex(m) => m.trace(),
        })
    }

    /// Operator norm, i.e. the largest singular value.
    pub fn two_norm(&self) -> Result<f64> {
        Ok(singular_values(self)?.largest())
    }

    /// Contiguous block starting at `(row, col)` with the given shape.
    pub fn submatrix(&self, row: usize, col: usize, nrows: usize, ncols: usize) -> Result<Matrix> {
        check_dims(nrows, ncols)?;
        if row + nrows > self.rows() || col + ncols > self.cols() {
            return Err(Error::ShapeMismatch {
                op: "submatrix",
                left: self.shape(),
                right: (row + nrows, col + ncols),
            });
        }
        Ok(match &self.storage {
            Storage::Real(m) => Self::real_unchecked(m.view((row, col), (nrows, ncols)).into_owned()),
            Storage::Complex(m) => {
                Self::complex_unchecked(m.view((row, col), (nrows, ncols)).into_owned())
            }
        })
    }

    pub fn remove_column(&self, col: usize) -> Result<Matrix> {
        if self.cols() < 2 || col >= self.cols() {
            return Err(Error::InvalidParameter(format!(
                "cannot delete column {col} from a matrix with {} columns",
                self.cols()
            )));
        }
        Ok(match &self.storage {
            Storage::Real(m) => Self::real_unchecked(m.clone().remove_column(col)),
            Storage::Complex(m) => Self::complex_unchecked(m.clone().remove_column(col)),
        })
    }

    /// Principal submatrix with row and column `idx` removed.
    pub fn remove_row_and_column(&self, idx: usize) -> Result<Matrix> {
        if !self.is_square() || self.rows() < 2 || idx >= self.rows() {
            return Err(Error::InvalidParameter(format!(
                "cannot delete row/column {idx} from a {}x{} matrix",
                self.rows(),
                self.cols()
            )));
        }
        Ok(match &self.storage {
            Storage::Real(m) => Self::real_unchecked(m.clone().remove_column(idx).remove_row(idx)),
            Storage::Complex(m) => {
                Self::complex_unchecked(m.clone().remove_column(idx).remove_row(idx))
            }
        })
    }

    /// `(self + self*) / 2`.
    pub fn hermitian_part(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        Ok(match &self.storage {
            Storage::Real(m) => Self::real_unchecked((m + m.transpose()) * 0.5),
            Storage::Complex(m) => {
                Self::complex_unchecked((m + m.adjoint()) * Complex64::new(0.5, 0.0))
            }
        })
    }

    /// `self* self`.
    pub fn gram(&self) -> Matrix {
        self.conj_transpose()
            .matmul(self)
            .expect("conjugate transpose is always conformable")
    }

    /// `self self*`.
    pub fn outer_gram(&self) -> Matrix {
        self.matmul(&self.conj_transpose())
            .expect("conjugate transpose is always conformable")
    }
}

/// Kind of values held in a [`Spectrum`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Singular,
    HermitianEigen,
}

/// Descending singular values or Hermitian eigenvalues of a matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    kind: SpectrumKind,
    source_dims: (usize, usize),
}

impl Spectrum {
    pub fn new(values: Vec<f64>, kind: SpectrumKind, source_dims: (usize, usize)) -> Result<Self> {
        let (m, n) = source_dims;
        let expected = match kind {
            SpectrumKind::Singular => m.min(n),
            SpectrumKind::HermitianEigen => m,
        };
        if values.len() != expected || expected == 0 {
            return Err(Error::InvalidParameter(format!(
                "{kind:?} spectrum of a {m}x{n} matrix needs {expected} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("spectrum has non-finite values".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter("spectrum must be sorted descending".into()));
        }
        if kind == SpectrumKind::Singular && values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter("singular values must be non-negative".into()));
        }
        Ok(Self {
            values,
            kind,
            source_dims,
        })
    }

    /// Singular spectrum of an `m x n` matrix from arbitrary-order values.
    pub fn singular_from_unsorted(mut values: Vec<f64>, source_dims: (usize, usize)) -> Result<Self> {
        for v in &mut values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Self::new(values, SpectrumKind::Singular, source_dims)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn source_dims(&self) -> (usize, usize) {
        self.source_dims
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn smallest(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// True when every value is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Moduli of the values, re-sorted descending. For the eigenvalues of a
    /// Hermitian matrix these are its singular values.
    pub fn to_singular(&self) -> Spectrum {
        match self.kind {
            SpectrumKind::Singular => self.clone(),
            SpectrumKind::HermitianEigen => {
                let n = self.values.len();
                Spectrum::singular_from_unsorted(
                    self.values.iter().map(|v| v.abs()).collect(),
                    (n, n),
                )
                .expect("moduli of a valid spectrum form a valid spectrum")
            }
        }
    }
}

/// Numerical tolerances standing in for exact-arithmetic predicates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative cut-off on singular values, used by numerical rank.
    pub rel_spectral: f64,
    /// Relative bound on `max |A - A*|` for a matrix to count as Hermitian.
    pub hermitian_asym: f64,
    /// Relative allowance for negative eigenvalues of a PSD matrix.
    pub psd_negativity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel_spectral: 1e-10,
            hermitian_asym: 1e-12,
            psd_negativity: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn new(rel_spectral: f64, hermitian_asym: f64, psd_negativity: f64) -> Result<Self> {
        for (name, v) in [
            ("rel_spectral", rel_spectral),
            ("hermitian_asym", hermitian_asym),
            ("psd_negativity", psd_negativity),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(Self {
            rel_spectral,
            hermitian_asym,
            psd_negativity,
        })
    }

    /// Default tolerances with a different rank cut-off.
    pub fn with_rel_spectral(self, rel_spectral: f64) -> Result<Self> {
        Self::new(rel_spectral, self.hermitian_asym, self.psd_negativity)
    }
}
