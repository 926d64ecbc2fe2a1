//! Schatten p-norms evaluated from singular values.
//!
//! Every evaluation is normalized by the largest singular value before
//! powering, so `(1e200, 1e-200)` at `p = 10` neither overflows nor
//! underflows.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matcore::{singular_values, Matrix, Spectrum, SpectrumKind};

/// Exponent of a Schatten norm or stable rank.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
    /// The rank-count limit; not a norm.
    Zero,
}

impl PExponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 {
            Ok(PExponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(format!("finite exponent must be positive, got {p}")))
        }
    }

    /// Numeric value, with `Infinity` mapped to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            PExponent::Finite(p) => p,
            PExponent::Infinity => f64::INFINITY,
            PExponent::Zero => 0.0,
        }
    }

    /// `0 < p < 1`: the Schatten functional is only a quasi-norm and the
    /// triangle inequality is unavailable.
    pub fn is_quasi(self) -> bool {
        matches!(self, PExponent::Finite(p) if p < 1.0)
    }

    /// `p >= 1` including infinity.
    pub fn is_norm(self) -> bool {
        match self {
            PExponent::Finite(p) => p >= 1.0,
            PExponent::Infinity => true,
            PExponent::Zero => false,
        }
    }

    /// `2p`, as used by the cross-product identities.
    pub fn doubled(self) -> Self {
        match self {
            PExponent::Finite(p) => PExponent::Finite(2.0 * p),
            other => other,
        }
    }

    /// Default grid used by property checks and the fuzz harness.
    pub fn default_grid() -> Vec<PExponent> {
        vec![
            PExponent::Finite(1.0),
            PExponent::Finite(1.5),
            PExponent::Finite(2.0),
            PExponent::Finite(3.0),
            PExponent::Finite(10.0),
            PExponent::Infinity,
        ]
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{p}"),
            PExponent::Infinity => f.write_str("inf"),
            PExponent::Zero => f.write_str("0"),
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(PExponent::Infinity),
            t => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidExponent(format!("cannot parse `{s}`")))?;
                if p == 0.0 {
                    Ok(PExponent::Zero)
                } else if p == f64::INFINITY {
                    Ok(PExponent::Infinity)
                } else {
                    PExponent::finite(p)
                }
            }
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PExponent::Finite(p) => s.serialize_f64(*p),
            PExponent::Infinity => s.serialize_str("inf"),
            PExponent::Zero => s.serialize_f64(0.0),
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct PVisitor;

        impl Visitor<'_> for PVisitor {
            type Value = PExponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<PExponent, E> {
                if v == 0.0 {
                    Ok(PExponent::Zero)
                } else {
                    PExponent::finite(v).map_err(E::custom)
                }
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<PExponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<PExponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<PExponent, E> {
                v.parse().map_err(E::custom)
            }
        }

        d.deserialize_any(PVisitor)
    }
}

/// `sum_j (s_j / s_1)^p` over the singular values; zero for the zero
/// matrix. For `Infinity` this is 1 (nonzero input), for `Zero` the count of
/// strictly positive values.
pub(crate) fn normalized_power_sum(values: &[f64], p: PExponent) -> f64 {
    let top = values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0.0;
    }
    match p {
        PExponent::Finite(p) => values.iter().map(|&s| (s / top).powf(p)).sum(),
        PExponent::Infinity => 1.0,
        PExponent::Zero => values.iter().filter(|&&s| s > 0.0).count() as f64,
    }
}

/// `||A||_p / ||A||_2`, the p-th root of the p-stable rank, from singular
/// values.
pub(crate) fn normalized_norm(values: &[f64], p: PExponent) -> f64 {
    let sum = normalized_power_sum(values, p);
    match p {
        PExponent::Finite(p) if sum > 0.0 => sum.powf(1.0 / p),
        PExponent::Finite(_) => 0.0,
        PExponent::Infinity => sum,
        PExponent::Zero => unreachable!("p = 0 has no p-th root"),
    }
}

/// Result of a Schatten evaluation, flagging quasi-norm exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    /// True for `0 < p < 1`.
    pub quasi_norm: bool,
}

pub fn schatten_norm_from_spectrum(s: &Spectrum, p: PExponent) -> Result<f64> {
    Ok(schatten_evaluate(s, p)?.value)
}

/// Same as [`schatten_norm_from_spectrum`] but reports whether the value is
/// only a quasi-norm.
pub fn schatten_evaluate(s: &Spectrum, p: PExponent) -> Result<NormValue> {
    if s.kind() != SpectrumKind::Singular {
        return Err(Error::InvalidParameter(
            "Schatten norms are defined on singular values".into(),
        ));
    }
    if p == PExponent::Zero {
        return Err(Error::ZeroExponent);
    }
    let top = s.largest();
    Ok(NormValue {
        value: top * normalized_norm(s.values(), p),
        quasi_norm: p.is_quasi(),
    })
}

pub fn schatten_norm(a: &Matrix, p: PExponent) -> Result<f64> {
    if p == PExponent::Zero {
        return Err(Error::ZeroExponent);
    }
    schatten_norm_from_spectrum(&singular_values(a)?, p)
}
