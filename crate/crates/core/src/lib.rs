//! Stable rank, intrinsic dimension and the p-stable rank of dense real and
//! complex matrices.
//!
//! * [`matcore`]: matrices, spectra, PSD classification, seeded sampling.
//! * [`schatten`]: Schatten p-norms from singular values.
//! * [`ranks`]: `sr_p`, `sr`, `intdim`, numerical rank.
//! * [`theorems`]: one checker per inequality, returning a [`CheckReport`].
//! * [`gallery`]: parameterized example families with closed-form values.

pub mod error;
pub mod gallery;
pub mod matcore;
pub mod ranks;
pub mod schatten;
pub mod theorems;

pub use error::{Error, Result};
pub use matcore::{Matrix, ScalarField, Spectrum, SpectrumKind, Tolerances};
pub use ranks::{intrinsic_dimension, numerical_rank, p_stable_rank, stable_rank, RankResult};
pub use schatten::{schatten_norm, PExponent};
pub use theorems::{CheckReport, Outcome};
