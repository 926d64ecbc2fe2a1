//! Stable rank, intrinsic dimension, p-stable rank and numerical rank.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{psd_spectrum, singular_values, Matrix, Spectrum, Tolerances};
use crate::schatten::{normalized_norm, normalized_power_sum, PExponent};

/// Relative singular-value cut-off used when no tolerance is given.
pub const DEFAULT_RTOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankDefinition {
    PStable,
    Stable,
    IntrinsicDimension,
    NumericalRank,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    pub value: f64,
    pub p: PExponent,
    pub spectrum_used: Spectrum,
    pub definition: RankDefinition,
}

fn check_rtol(rtol: f64) -> Result<()> {
    if rtol > 0.0 && rtol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("rtol must lie in (0, 1), got {rtol}")))
    }
}

/// Count of singular values strictly above `rtol * s_1`.
pub fn numerical_rank_of_spectrum(s: &Spectrum, rtol: f64) -> usize {
    let top = s.largest();
    if top == 0.0 {
        return 0;
    }
    s.values().iter().filter(|&&v| v > rtol * top).count()
}

pub fn numerical_rank(a: &Matrix, rtol: f64) -> Result<usize> {
    check_rtol(rtol)?;
    Ok(numerical_rank_of_spectrum(&singular_values(a)?, rtol))
}

/// `sr_p` from a singular spectrum: `sum_j (s_j/s_1)^p`, 1 at infinity,
/// the numerical rank at `p = 0`, and 0 for the zero matrix.
pub fn p_stable_rank_of_spectrum(s: &Spectrum, p: PExponent, rtol: f64) -> f64 {
    match p {
        PExponent::Zero => numerical_rank_of_spectrum(s, rtol) as f64,
        _ => normalized_power_sum(s.values(), p),
    }
}

/// `sr_p(A)^(1/p) = ||A||_p / ||A||_2`. Only meaningful for `p > 0`.
pub fn p_stable_root_of_spectrum(s: &Spectrum, p: PExponent) -> Result<f64> {
    if p == PExponent::Zero {
        return Err(Error::ZeroExponent);
    }
    Ok(normalized_norm(s.values(), p))
}

pub fn p_stable_rank(a: &Matrix, p: PExponent) -> Result<RankResult> {
    p_stable_rank_with(a, p, DEFAULT_RTOL)
}

/// [`p_stable_rank`] with an explicit cut-off for the `p = 0` rank count.
pub fn p_stable_rank_with(a: &Matrix, p: PExponent, rtol: f64) -> Result<RankResult> {
    check_rtol(rtol)?;
    let s = singular_values(a)?;
    Ok(RankResult {
        value: p_stable_rank_of_spectrum(&s, p, rtol),
        p,
        spectrum_used: s,
        definition: RankDefinition::PStable,
    })
}

/// `||A||_F^2 / ||A||_2^2`.
pub fn stable_rank(a: &Matrix) -> Result<RankResult> {
    let mut r = p_stable_rank(a, PExponent::Finite(2.0))?;
    r.definition = RankDefinition::Stable;
    Ok(r)
}

/// `trace(A) / ||A||_2` for Hermitian positive semi-definite `A`.
///
/// The trace is summed from the entries; the two-norm is the largest
/// eigenvalue.
pub fn intrinsic_dimension(a: &Matrix, tol: &Tolerances) -> Result<RankResult> {
    let spec = psd_spectrum(a, tol)?;
    let norm = spec.largest().max(0.0);
    let value = if norm == 0.0 { 0.0 } else { a.trace()?.re / norm };
    Ok(RankResult {
        value,
        p: PExponent::Finite(1.0),
        spectrum_used: spec,
        definition: RankDefinition::IntrinsicDimension,
    })
}
