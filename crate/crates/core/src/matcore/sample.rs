//! Seeded random matrix generators.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Matrix, ScalarField};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    /// i.i.d. standard normal entries.
    Gaussian,
    /// `X* X / n` for an `m x n` Gaussian `X`.
    PsdGram,
    /// `U diag(s) V*` with Haar-random `U`, `V`.
    PrescribedSpectrum,
    /// `v v*` for a Gaussian vector `v`.
    Rank1Psd,
    /// `Q Q*` for `Q` with `rank` orthonormal columns.
    OrthogonalProjector,
}

impl SampleKind {
    pub const ALL: [SampleKind; 5] = [
        SampleKind::Gaussian,
        SampleKind::PsdGram,
        SampleKind::PrescribedSpectrum,
        SampleKind::Rank1Psd,
        SampleKind::OrthogonalProjector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SampleKind::Gaussian => "gaussian",
            SampleKind::PsdGram => "psd_gram",
            SampleKind::PrescribedSpectrum => "prescribed_spectrum",
            SampleKind::Rank1Psd => "rank1_psd",
            SampleKind::OrthogonalProjector => "orthogonal_projector",
        }
    }
}

impl std::str::FromStr for SampleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SampleKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSample(format!("unknown distribution `{s}`")))
    }
}

/// Everything needed to regenerate a random matrix bit-for-bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub kind: SampleKind,
    pub dims: (usize, usize),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    pub seed: u64,
    #[serde(default = "default_field")]
    pub field: ScalarField,
}

fn default_field() -> ScalarField {
    ScalarField::Real
}

impl SampleSpec {
    fn plain(kind: SampleKind, dims: (usize, usize), seed: u64) -> Self {
        Self {
            kind,
            dims,
            spectrum: None,
            rank: None,
            seed,
            field: ScalarField::Real,
        }
    }

    pub fn gaussian(m: usize, n: usize, seed: u64) -> Self {
        Self::plain(SampleKind::Gaussian, (m, n), seed)
    }

    /// `n x n` Gram matrix of an `m x n` Gaussian factor.
    pub fn psd_gram(m: usize, n: usize, seed: u64) -> Self {
        Self::plain(SampleKind::PsdGram, (m, n), seed)
    }

    pub fn prescribed_spectrum(m: usize, n: usize, spectrum: Vec<f64>, seed: u64) -> Self {
        Self {
            spectrum: Some(spectrum),
            ..Self::plain(SampleKind::PrescribedSpectrum, (m, n), seed)
        }
    }

    pub fn rank1_psd(n: usize, seed: u64) -> Self {
        Self::plain(SampleKind::Rank1Psd, (n, n), seed)
    }

    pub fn orthogonal_projector(n: usize, rank: usize, seed: u64) -> Self {
        Self {
            rank: Some(rank),
            ..Self::plain(SampleKind::OrthogonalProjector, (n, n), seed)
        }
    }

    pub fn with_field(mut self, field: ScalarField) -> Self {
        self.field = field;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = self.dims;
        if m == 0 || n == 0 {
            return Err(Error::InvalidSample(format!("dimensions must be positive, got {m}x{n}")));
        }
        match self.kind {
            SampleKind::Gaussian | SampleKind::PsdGram => {}
            SampleKind::PrescribedSpectrum => {
                let s = self
                    .spectrum
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSample("prescribed_spectrum needs a spectrum".into()))?;
                if s.len() > m.min(n) {
                    return Err(Error::InvalidSample(format!(
                        "spectrum of length {} does not fit a {m}x{n} matrix",
                        s.len()
                    )));
                }
                if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidSample("spectrum must be finite and non-negative".into()));
                }
                if s.windows(2).any(|w| w[0] < w[1]) {
                    return Err(Error::InvalidSample("spectrum must be sorted descending".into()));
                }
            }
            SampleKind::Rank1Psd => {
                if m != n {
                    return Err(Error::InvalidSample("rank1_psd must be square".into()));
                }
            }
            SampleKind::OrthogonalProjector => {
                if m != n {
                    return Err(Error::InvalidSample("orthogonal_projector must be square".into()));
                }
                match self.rank {
                    Some(r) if (1..=n).contains(&r) => {}
                    other => {
                        return Err(Error::InvalidSample(format!(
                            "orthogonal_projector needs rank in 1..={n}, got {other:?}"
                        )))
                    }
                }
            }
        }
        Ok(())
    }
}

/// Draw the matrix described by `spec`. Identical specs give bit-identical
/// matrices.
pub fn sample(spec: &SampleSpec) -> Result<Matrix> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (m, n) = spec.dims;
    let field = spec.field;
    Ok(match spec.kind {
        SampleKind::Gaussian => gaussian(m, n, field, &mut rng),
        SampleKind::PsdGram => gaussian(m, n, field, &mut rng).gram().scale(1.0 / n as f64),
        SampleKind::PrescribedSpectrum => {
            let s = spec.spectrum.as_deref().unwrap_or_default();
            if s.is_empty() {
                return Ok(Matrix::zeros(m, n));
            }
            let k = s.len();
            let u = haar_with(m, field, &mut rng).submatrix(0, 0, m, k)?;
            let v = haar_with(n, field, &mut rng).submatrix(0, 0, n, k)?;
            u.matmul(&Matrix::diag(s)?)?.matmul(&v.conj_transpose())?
        }
        SampleKind::Rank1Psd => gaussian(n, 1, field, &mut rng).outer_gram(),
        SampleKind::OrthogonalProjector => {
            let r = spec.rank.expect("validated");
            haar_with(n, field, &mut rng).submatrix(0, 0, n, r)?.outer_gram()
        }
    })
}

fn gaussian(m: usize, n: usize, field: ScalarField, rng: &mut ChaCha8Rng) -> Matrix {
    match field {
        ScalarField::Real => {
            let entries: Vec<f64> = (0..m * n).map(|_| StandardNormal.sample(rng)).collect();
            Matrix::real_unchecked(DMatrix::from_row_slice(m, n, &entries))
        }
        ScalarField::Complex => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let entries: Vec<Complex64> = (0..m * n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    Complex64::new(h * re, h * im)
                })
                .collect();
            Matrix::complex_unchecked(DMatrix::from_row_slice(m, n, &entries))
        }
    }
}

/// Haar-distributed unitary (real orthogonal for the real field): QR of a
/// Gaussian matrix with the phases of `diag(R)` folded back into `Q`.
fn haar_with(n: usize, field: ScalarField, rng: &mut ChaCha8Rng) -> Matrix {
    let g = gaussian(n, n, field, rng);
    match g.as_real() {
        Some(x) => {
            let qr = x.clone().qr();
            let (mut q, r) = (qr.q(), qr.r());
            for j in 0..n {
                if r[(j, j)] < 0.0 {
                    q.column_mut(j).neg_mut();
                }
            }
            Matrix::real_unchecked(q)
        }
        None => {
            let qr = g.to_complex().qr();
            let (mut q, r) = (qr.q(), qr.r());
            for j in 0..n {
                let d = r[(j, j)];
                let norm = d.norm();
                if norm > 0.0 {
                    let phase = d / norm;
                    for i in 0..n {
                        q[(i, j)] *= phase;
                    }
                }
            }
            Matrix::complex_unchecked(q)
        }
    }
}

/// Seeded Haar-random `n x n` unitary.
pub fn haar_unitary(n: usize, field: ScalarField, seed: u64) -> Matrix {
    assert!(n > 0, "matrix dimensions must be positive");
    haar_with(n, field, &mut ChaCha8Rng::seed_from_u64(seed))
}
