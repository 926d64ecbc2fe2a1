use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::schatten::PExponent;

/// Relative slack tolerance shared by every checker.
pub const SLACK_REL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    Violated,
    NotApplicable,
}

/// Outcome of one theorem instance.
///
/// `slack` is the smallest `larger - smaller` over every inequality the
/// checker verified; the per-inequality slacks are in `details` under
/// `slack_<label>`. The instance holds iff `slack >= -abs_tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<PExponent>,
    #[serde(with = "json_f64")]
    pub lhs: f64,
    #[serde(with = "json_f64")]
    pub rhs: f64,
    #[serde(with = "json_f64")]
    pub slack: f64,
    #[serde(with = "json_f64")]
    pub abs_tol: f64,
    pub outcome: Outcome,
    pub preconditions_met: bool,
    #[serde(with = "json_f64_map")]
    pub details: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl CheckReport {
    pub fn not_applicable(name: &str, p: Option<PExponent>, reason: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            p,
            lhs: 0.0,
            rhs: 0.0,
            slack: 0.0,
            abs_tol: SLACK_REL_TOL,
            outcome: Outcome::NotApplicable,
            preconditions_met: false,
            details: BTreeMap::new(),
            reason: Some(reason.into()),
        }
    }

    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn is_violation(&self) -> bool {
        self.outcome == Outcome::Violated
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.get(key).copied()
    }
}

/// Accumulates the inequalities of one instance.
pub(crate) struct ReportBuilder {
    name: &'static str,
    p: Option<PExponent>,
    lhs: f64,
    rhs: f64,
    magnitude: f64,
    slack: Option<f64>,
    details: BTreeMap<String, f64>,
}

impl ReportBuilder {
    pub(crate) fn new(name: &'static str, p: Option<PExponent>) -> Self {
        Self {
            name,
            p,
            lhs: 0.0,
            rhs: 0.0,
            magnitude: 1.0,
            slack: None,
            details: BTreeMap::new(),
        }
    }

    fn absorb(&mut self, v: f64) {
        if v.is_finite() {
            self.magnitude = self.magnitude.max(v.abs());
        }
    }

    /// The headline `lhs <= rhs` shown in the report.
    pub(crate) fn primary(mut self, lhs: f64, rhs: f64) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.absorb(lhs);
        self.absorb(rhs);
        self
    }

    /// Require `smaller <= larger`.
    pub(crate) fn require(mut self, label: &str, smaller: f64, larger: f64) -> Self {
        self.absorb(smaller);
        self.absorb(larger);
        let s = larger - smaller;
        self.details.insert(format!("slack_{label}"), s);
        self.slack = Some(match self.slack {
            Some(prev) => prev.min(s),
            None => s,
        });
        self
    }

    /// Require `a == b` (two one-sided constraints).
    pub(crate) fn require_equal(mut self, label: &str, a: f64, b: f64) -> Self {
        self.absorb(a);
        self.absorb(b);
        let s = -(a - b).abs();
        self.details.insert(format!("slack_{label}"), s);
        self.slack = Some(match self.slack {
            Some(prev) => prev.min(s),
            None => s,
        });
        self
    }

    pub(crate) fn detail(mut self, key: impl Into<String>, v: f64) -> Self {
        self.details.insert(key.into(), v);
        self
    }

    pub(crate) fn finish(self) -> CheckReport {
        let abs_tol = SLACK_REL_TOL * self.magnitude;
        let slack = self.slack.unwrap_or(self.rhs - self.lhs);
        let outcome = if slack >= -abs_tol {
            Outcome::Holds
        } else {
            Outcome::Violated
        };
        CheckReport {
            name: self.name.to_string(),
            p: self.p,
            lhs: self.lhs,
            rhs: self.rhs,
            slack,
            abs_tol,
            outcome,
            preconditions_met: true,
            details: self.details,
            reason: None,
        }
    }
}

/// JSON has no infinities; non-finite values travel as the strings
/// `"inf"`, `"-inf"` and `"nan"`.
pub mod json_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(super) enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub(super) fn decode<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Str(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("bad float `{other}`"))),
            },
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        decode(Repr::deserialize(d)?)
    }
}

pub mod json_f64_map {
    use std::collections::BTreeMap;

    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::json_f64;

    struct Wrapped<'a>(&'a f64);

    impl serde::Serialize for Wrapped<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            json_f64::serialize(self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(k, &Wrapped(v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        let raw: BTreeMap<String, json_f64::Repr> = BTreeMap::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| json_f64::decode(v).map(|x| (k, x)))
            .collect()
    }
}
