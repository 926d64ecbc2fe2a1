//! Perturbation sweeps: bounds on `sr_p(A + E)^(1/p)` as `||E||_2 / ||A||_2` grows.

use serde::{Deserialize, Serialize};
use srlab::matcore::{sample, SampleSpec};
use srlab::theorems::{check_perturbation, json_f64, Outcome};
use srlab::{Matrix, PExponent, Tolerances};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// Gaussian entries, same shape and field as `A`.
    Gaussian,
    /// Rank-deficient PSD Gram matrix (square `A` only).
    Psd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    #[serde(with = "json_f64")]
    pub epsilon: f64,
    pub outcome: Outcome,
    pub rank_e: Option<usize>,
    pub lower: Option<f64>,
    pub actual: Option<f64>,
    pub upper: Option<f64>,
    pub slack_lower: Option<f64>,
    pub slack_upper: Option<f64>,
    /// Sharper bounds, present when `A` and `E` are both PSD.
    pub lower_psd: Option<f64>,
    pub upper_psd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Fixed perturbation direction for a sweep.
pub fn perturbation_direction(a: &Matrix, kind: PerturbationKind, seed: u64) -> CliResult<Matrix> {
    let (m, n) = a.shape();
    let spec = match kind {
        PerturbationKind::Gaussian => SampleSpec::gaussian(m, n, seed),
        PerturbationKind::Psd => {
            if m != n {
                return Err(CliError::InvalidParams(
                    "psd perturbations need a square matrix".into(),
                ));
            }
            SampleSpec::psd_gram(1 + n / 2, n, seed)
        }
    };
    Ok(sample(&spec.with_field(a.field()))?)
}

/// One row per `epsilon`, with `E = epsilon * ||A||_2 * D / ||D||_2`.
pub fn condition_sweep(
    a: &Matrix,
    direction: &Matrix,
    epsilons: &[f64],
    p: PExponent,
    tol: &Tolerances,
) -> CliResult<Vec<ConditionRow>> {
    let na = a.two_norm()?;
    let nd = direction.two_norm()?;
    epsilons
        .iter()
        .map(|&eps| {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(CliError::InvalidParams(format!("epsilon must be finite and >= 0, got {eps}")));
            }
            let e = if nd == 0.0 { direction.clone() } else { direction.scale(eps * na / nd) };
            let r = check_perturbation(a, &e, p, tol)?;
            let d = |k: &str| r.detail(k);
            Ok(ConditionRow {
                epsilon: eps,
                outcome: r.outcome,
                rank_e: d("rank_e").map(|x| x as usize),
                lower: d("lower_general"),
                actual: d("root_sum"),
                upper: d("upper_general"),
                slack_lower: d("slack_general_lower"),
                slack_upper: d("slack_general_upper"),
                lower_psd: d("lower_psd"),
                upper_psd: d("upper_psd"),
                reason: r.reason.clone(),
            })
        })
        .collect()
}
