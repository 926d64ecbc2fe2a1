//! Parameterized example families with closed-form predicted values.
//!
//! Every family is emitted as dense matrices. The `predicted` map holds the
//! closed-form values; `computed` holds the same quantities evaluated through
//! [`crate::ranks`]. Threshold predicates are decided in exact rational
//! arithmetic on the (binary) parameter values.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    haar_unitary, hermitian_eigen, sample, svd, Matrix, SampleSpec, ScalarField, Tolerances,
};
use crate::ranks::{intrinsic_dimension, numerical_rank, p_stable_rank, stable_rank};
use crate::schatten::PExponent;
use crate::theorems::json_f64_map;

/// Relative tolerance for predicted vs computed values.
pub const FORMULA_REL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct FamilyInstance {
    pub name: String,
    #[serde(skip)]
    pub matrices: BTreeMap<String, Matrix>,
    #[serde(with = "json_f64_map")]
    pub params: BTreeMap<String, f64>,
    #[serde(with = "json_f64_map")]
    pub predicted: BTreeMap<String, f64>,
    #[serde(with = "json_f64_map")]
    pub computed: BTreeMap<String, f64>,
    /// Values quoted for comparison but not asserted.
    #[serde(with = "json_f64_map")]
    pub reference: BTreeMap<String, f64>,
    /// Exact threshold predicates, keyed by the quantity they govern.
    pub thresholds: BTreeMap<String, bool>,
    /// Whether the advertised effect occurs in the computed values.
    pub violations: BTreeMap<String, bool>,
    pub threshold_met: bool,
    pub notes: Vec<String>,
}

impl FamilyInstance {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Self::default()
        }
    }

    fn param(mut self, k: &str, v: f64) -> Self {
        self.params.insert(k.into(), v);
        self
    }

    fn matrix(mut self, k: &str, m: Matrix) -> Self {
        self.matrices.insert(k.into(), m);
        self
    }

    fn value(mut self, k: &str, predicted: f64, computed: f64) -> Self {
        self.predicted.insert(k.into(), predicted);
        self.computed.insert(k.into(), computed);
        self
    }

    fn threshold(mut self, k: &str, met: bool, violated: bool) -> Self {
        self.thresholds.insert(k.into(), met);
        self.violations.insert(k.into(), violated);
        self.threshold_met = self.thresholds.values().any(|&t| t);
        self
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    /// Largest `|computed - predicted| / max(1, |predicted|)` over all keys.
    pub fn max_relative_error(&self) -> f64 {
        self.predicted
            .iter()
            .map(|(k, &p)| {
                let c = self.computed.get(k).copied().unwrap_or(f64::NAN);
                let e = (c - p).abs() / p.abs().max(1.0);
                if e.is_nan() {
                    f64::INFINITY
                } else {
                    e
                }
            })
            .fold(0.0, f64::max)
    }

    /// All formulas reproduced and every threshold agrees with its effect.
    pub fn is_consistent(&self) -> bool {
        self.max_relative_error() <= FORMULA_REL_TOL
            && self
                .thresholds
                .iter()
                .all(|(k, t)| self.violations.get(k) == Some(t))
    }
}

/// Exact value of a binary floating-point number.
fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite parameter")
}

fn qn(n: usize) -> BigRational {
    q(n as f64)
}

/// `a > b` with a guard of `1e-12 * max(1, |a|, |b|)` against round-off.
fn exceeds(a: f64, b: f64) -> bool {
    a - b > 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn sr(a: &Matrix) -> Result<f64> {
    Ok(stable_rank(a)?.value)
}

fn intdim(a: &Matrix) -> Result<f64> {
    Ok(intrinsic_dimension(&a.hermitian_part()?, &Tolerances::default())?.value)
}

/// Pair of seeded complex unitaries for `U M V*`, or `None`.
struct Rotation {
    u: Matrix,
    v: Matrix,
}

impl Rotation {
    fn new(n: usize, seed: Option<u64>) -> Option<Self> {
        seed.map(|s| Rotation {
            u: haar_unitary(n, ScalarField::Complex, s),
            v: haar_unitary(n, ScalarField::Complex, s.wrapping_add(0x9e37_79b9_7f4a_7c15)),
        })
    }

    fn two_sided(r: &Option<Self>, m: Matrix) -> Result<Matrix> {
        match r {
            Some(r) => r.u.matmul(&m)?.matmul(&r.v.conj_transpose()),
            None => Ok(m),
        }
    }

    fn left(r: &Option<Self>, m: Matrix) -> Result<Matrix> {
        match r {
            Some(r) => r.u.matmul(&m),
            None => Ok(m),
        }
    }

    /// `U M U*`, which keeps Hermitian and PSD structure.
    fn conjugate(r: &Option<Self>, m: Matrix) -> Result<Matrix> {
        match r {
            Some(r) => r.u.matmul(&m)?.matmul(&r.u.conj_transpose())?.hermitian_part(),
            None => Ok(m),
        }
    }
}

fn rotation_note(seed: Option<u64>) -> Option<String> {
    seed.map(|s| format!("rotated by seeded Haar unitaries (seed {s})"))
}

fn with_rotation_note(inst: FamilyInstance, seed: Option<u64>) -> FamilyInstance {
    match rotation_note(seed) {
        Some(n) => inst.note(n).param("rotation_seed", seed.unwrap() as f64),
        None => inst,
    }
}

/// Diagonal with `s_j = ratio^(j-1)`; `sr = (1 - ratio^(2n)) / (1 - ratio^2)`.
pub fn geometric_decay(n: usize, ratio: f64, rotation: Option<u64>) -> Result<FamilyInstance> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(invalid(format!("ratio must lie in (0, 1), got {ratio}")));
    }
    let rot = Rotation::new(n, rotation);
    let values: Vec<f64> = (0..n).map(|j| ratio.powi(j as i32)).collect();
    let a = Rotation::two_sided(&rot, Matrix::diag(&values)?)?;
    let r2 = ratio * ratio;
    let predicted = (1.0 - r2.powi(n as i32)) / (1.0 - r2);
    let computed = sr(&a)?;
    let mut inst = FamilyInstance::new("geometric_decay")
        .param("n", n as f64)
        .param("ratio", ratio)
        .value("sr_a", predicted, computed);
    inst.reference.insert("sr_limit".into(), 1.0 / (1.0 - r2));
    if ratio == 0.5 {
        inst.reference
            .insert("sr_printed_formula".into(), 4.0 / 3.0 * (1.0 - 1.0 / n as f64));
        inst = inst.note(
            "the closed form (4/3)(1 - 1/n) quoted for ratio 1/2 disagrees with the geometric \
             series (4/3)(1 - 4^-n); suspected typo, the series value is used",
        );
    }
    Ok(with_rotation_note(inst.matrix("A", a), rotation))
}

/// `A = diag(I_{n-1}, alpha)`. Deleting the last column raises `sr` once
/// `alpha^2 > (n-1)/(n-2)`; deleting the last row and column raises
/// `intdim` once `alpha > (n-1)/(n-2)`.
pub fn deletion_family(n: usize, alpha: f64, rotation: Option<u64>) -> Result<FamilyInstance> {
    if n < 3 {
        return Err(invalid(format!("deletion family needs n >= 3, got {n}")));
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(invalid(format!("deletion family needs alpha >= 1, got {alpha}")));
    }
    let rot = Rotation::new(n, rotation);
    let mut d = vec![1.0; n];
    d[n - 1] = alpha;
    let a_psd = Matrix::diag(&d)?;
    let a = Rotation::left(&rot, a_psd.clone())?;
    let a_hat = a.remove_column(n - 1)?;
    let a_hat_rowcol = a_psd.remove_row_and_column(n - 1)?;
    let nf = n as f64;

    let (sr_a, sr_hat) = (sr(&a)?, sr(&a_hat)?);
    let (id_a, id_hat) = (intdim(&a_psd)?, intdim(&a_hat_rowcol)?);
    let a_q = q(alpha);
    let sr_threshold = &a_q * &a_q * qn(n - 2) > qn(n - 1);
    let id_threshold = a_q * qn(n - 2) > qn(n - 1);

    let inst = FamilyInstance::new("deletion")
        .param("n", nf)
        .param("alpha", alpha)
        .value("sr_a", 1.0 + (nf - 1.0) / (alpha * alpha), sr_a)
        .value("sr_a_hat", nf - 1.0, sr_hat)
        .value("intdim_a", 1.0 + (nf - 1.0) / alpha, id_a)
        .value("intdim_a_hat", nf - 1.0, id_hat)
        .threshold("sr", sr_threshold, exceeds(sr_hat, sr_a))
        .threshold("intdim", id_threshold, exceeds(id_hat, id_a))
        .matrix("A", a)
        .matrix("A_hat", a_hat)
        .matrix("A_psd", a_psd)
        .matrix("A_hat_rowcol", a_hat_rowcol);
    let inst = if rotation.is_some() {
        inst.note("rotation is applied on the left only so column deletion commutes with it")
    } else {
        inst
    };
    Ok(with_rotation_note(inst, rotation))
}

/// `A = diag(alpha, 2 I_{n-1})`, `B = diag(-alpha, -I_{n-1})`, `A + B =
/// diag(0, I_{n-1})`; `sr(A+B) > sr(A) + sr(B)` once
/// `alpha^2 > 5(n-1)/(n-3)`.
pub fn sum_violation_family(n: usize, alpha: f64, rotation: Option<u64>) -> Result<FamilyInstance> {
    if n < 4 {
        return Err(invalid(format!("sum violation family needs n >= 4, got {n}")));
    }
    if !(alpha.abs() >= 2.0 && alpha.is_finite()) {
        return Err(invalid(format!("sum violation family needs |alpha| >= 2, got {alpha}")));
    }
    let rot = Rotation::new(n, rotation);
    let mut da = vec![2.0; n];
    da[0] = alpha;
    let mut db = vec![-1.0; n];
    db[0] = -alpha;
    let a = Rotation::conjugate(&rot, Matrix::diag(&da)?)?;
    let b = Rotation::conjugate(&rot, Matrix::diag(&db)?)?;
    let sum = a.add(&b)?;
    let nf = n as f64;
    let a2 = alpha * alpha;
    let (sr_a, sr_b, sr_sum) = (sr(&a)?, sr(&b)?, sr(&sum)?);
    let a_q = q(alpha);
    let met = &a_q * &a_q * qn(n - 3) > q(5.0) * qn(n - 1);
    let inst = FamilyInstance::new("sum_violation")
        .param("n", nf)
        .param("alpha", alpha)
        .value("sr_a", 1.0 + 4.0 * (nf - 1.0) / a2, sr_a)
        .value("sr_b", 1.0 + (nf - 1.0) / a2, sr_b)
        .value("sr_sum", nf - 1.0, sr_sum)
        .threshold("sr", met, exceeds(sr_sum, sr_a + sr_b))
        .note("B is negative definite, so the PSD sum bounds do not apply")
        .matrix("A", a)
        .matrix("B", b)
        .matrix("A_plus_B", sum);
    Ok(with_rotation_note(inst, rotation))
}

/// `A = diag(0, I_{n-1})`, `B = diag(beta, 0)`. Adding the rank-one `B`
/// lowers `intdim` by more than one once `beta > (n-1)/(n-3)`.
pub fn rank1_drop_family(n: usize, beta: f64, rotation: Option<u64>) -> Result<FamilyInstance> {
    if n < 4 {
        return Err(invalid(format!("rank-one drop family needs n >= 4, got {n}")));
    }
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(invalid(format!("rank-one drop family needs beta >= 1, got {beta}")));
    }
    let rot = Rotation::new(n, rotation);
    let mut da = vec![1.0; n];
    da[0] = 0.0;
    let mut db = vec![0.0; n];
    db[0] = beta;
    let a = Rotation::conjugate(&rot, Matrix::diag(&da)?)?;
    let b = Rotation::conjugate(&rot, Matrix::diag(&db)?)?;
    let sum = a.add(&b)?;
    let nf = n as f64;
    let (id_a, id_sum) = (intdim(&a)?, intdim(&sum)?);
    let rank_b = numerical_rank(&b, crate::ranks::DEFAULT_RTOL)?;
    let predicted_drop = nf - 2.0 - (nf - 1.0) / beta;
    let met = q(beta) * qn(n - 3) > qn(n - 1);
    let inst = FamilyInstance::new("rank1_drop")
        .param("n", nf)
        .param("beta", beta)
        .value("intdim_a", nf - 1.0, id_a)
        .value("intdim_sum", 1.0 + (nf - 1.0) / beta, id_sum)
        .value("intdim_drop", predicted_drop, id_a - id_sum)
        .value("rank_b", 1.0, rank_b as f64)
        .threshold("intdim", met, exceeds(id_a - id_sum, 1.0))
        .matrix("A", a)
        .matrix("B", b)
        .matrix("A_plus_B", sum);
    Ok(with_rotation_note(inst, rotation))
}

/// `A = diag(I_{n-1}, alpha)`, `B = diag(I_{n-1}, 1/alpha)`, `AB = I_n`.
/// For `alpha > 1` both `sr(AB)` and `intdim(AB)` exceed the larger of the
/// factors' values.
pub fn product_violation_family(
    n: usize,
    alpha: f64,
    rotation: Option<u64>,
) -> Result<FamilyInstance> {
    if n < 2 {
        return Err(invalid(format!("product family needs n >= 2, got {n}")));
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(invalid(format!("product family needs alpha >= 1, got {alpha}")));
    }
    let rot = Rotation::new(n, rotation);
    let mut da = vec![1.0; n];
    da[n - 1] = alpha;
    let mut db = vec![1.0; n];
    db[n - 1] = 1.0 / alpha;
    let a = Rotation::conjugate(&rot, Matrix::diag(&da)?)?;
    let b = Rotation::conjugate(&rot, Matrix::diag(&db)?)?;
    let ab = a.matmul(&b)?;
    let nf = n as f64;
    let (sr_a, sr_b, sr_ab) = (sr(&a)?, sr(&b)?, sr(&ab)?);
    let (id_a, id_b, id_ab) = (intdim(&a)?, intdim(&b)?, intdim(&ab)?);
    let met = q(alpha) > q(1.0);
    let inst = FamilyInstance::new("product_violation")
        .param("n", nf)
        .param("alpha", alpha)
        .value("sr_a", 1.0 + (nf - 1.0) / (alpha * alpha), sr_a)
        .value("sr_b", nf - 1.0 + 1.0 / (alpha * alpha), sr_b)
        .value("sr_ab", nf, sr_ab)
        .value("intdim_a", 1.0 + (nf - 1.0) / alpha, id_a)
        .value("intdim_b", nf - 1.0 + 1.0 / alpha, id_b)
        .value("intdim_ab", nf, id_ab)
        .threshold("sr", met, exceeds(sr_ab, sr_a.max(sr_b)))
        .threshold("intdim", met, exceeds(id_ab, id_a.max(id_b)))
        .matrix("A", a)
        .matrix("B", b)
        .matrix("AB", ab);
    Ok(with_rotation_note(inst, rotation))
}

fn require_square(a: &Matrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        })
    }
}

fn check_rtol(rtol: f64) -> Result<Tolerances> {
    Tolerances::default().with_rel_spectral(rtol)
}

/// `B = V diag(1/s_1, .., 1/s_r, I)` so that `AB = U diag(I_r, 0)` and
/// `sr(AB) = r`, the largest value any nonsingular multiplier can reach.
pub fn maximizer_multiplier(a: &Matrix, rtol: f64) -> Result<FamilyInstance> {
    multiplier(a, 1.0, rtol, "maximizer")
}

/// `B = V diag(1/s_1, alpha/s_2, .., alpha/s_r, I)` so that
/// `sr(AB) = 1 + (r-1) alpha^2`.
pub fn minimizer_multiplier(a: &Matrix, alpha: f64, rtol: f64) -> Result<FamilyInstance> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    multiplier(a, alpha, rtol, "minimizer")
}

fn multiplier(a: &Matrix, alpha: f64, rtol: f64, name: &str) -> Result<FamilyInstance> {
    require_square(a)?;
    check_rtol(rtol)?;
    let n = a.rows();
    let r = numerical_rank(a, rtol)?;
    let minimizer = name == "minimizer";
    if r == 0 || (minimizer && r < 2) {
        return Err(invalid(format!("{name} needs numerical rank >= {}, got {r}", 1 + minimizer as usize)));
    }
    let f = svd(a)?;
    let scale: Vec<f64> = (0..n)
        .map(|j| match j {
            0 => 1.0 / f.values[0],
            j if j < r => alpha / f.values[j],
            _ => 1.0,
        })
        .collect();
    let b = f.v.matmul(&Matrix::diag(&scale)?)?;
    let ab = a.matmul(&b)?;
    let rf = r as f64;
    let predicted = if minimizer {
        1.0 + (rf - 1.0) * alpha * alpha
    } else {
        rf
    };
    let sr_a = sr(a)?;
    let sr_ab = sr(&ab)?;
    let mut inst = FamilyInstance::new(name)
        .param("n", n as f64)
        .param("r", rf)
        .param("rtol", rtol)
        .value("sr_ab", predicted, sr_ab)
        .matrix("A", a.clone())
        .matrix("B", b)
        .matrix("AB", ab);
    if minimizer {
        inst = inst.param("alpha", alpha);
    }
    inst.computed.insert("sr_a".into(), sr_a);
    Ok(inst)
}

/// Congruence `B* A B` with `B = Q diag(lambda_1^{-1/2}, .., lambda_r^{-1/2}, I)`
/// giving `intdim(B* A B) = r`.
pub fn congruence_maximizer(a: &Matrix, rtol: f64) -> Result<FamilyInstance> {
    congruence(a, 1.0, rtol, "congruence_maximizer")
}

/// Congruence with `B = Q diag(lambda_1^{-1/2}, (alpha/lambda_2)^{1/2}, ..)`
/// giving `intdim(B* A B) = 1 + (r-1) alpha`.
pub fn congruence_minimizer(a: &Matrix, alpha: f64, rtol: f64) -> Result<FamilyInstance> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    congruence(a, alpha, rtol, "congruence_minimizer")
}

fn congruence(a: &Matrix, alpha: f64, rtol: f64, name: &str) -> Result<FamilyInstance> {
    require_square(a)?;
    let tol = check_rtol(rtol)?;
    let id_a = intrinsic_dimension(a, &tol)?.value;
    let n = a.rows();
    let eig = hermitian_eigen(a, &tol)?;
    let top = eig.values[0];
    let r = eig.values.iter().filter(|&&l| l > rtol * top).count();
    let minimizer = name == "congruence_minimizer";
    if r == 0 || (minimizer && r < 2) {
        return Err(invalid(format!("{name} needs rank >= {}, got {r}", 1 + minimizer as usize)));
    }
    let scale: Vec<f64> = (0..n)
        .map(|j| match j {
            0 => (1.0 / eig.values[0]).sqrt(),
            j if j < r => (alpha / eig.values[j]).sqrt(),
            _ => 1.0,
        })
        .collect();
    let b = eig.vectors.matmul(&Matrix::diag(&scale)?)?;
    let m = b.conj_transpose().matmul(a)?.matmul(&b)?.hermitian_part()?;
    let rf = r as f64;
    let predicted = if minimizer { 1.0 + (rf - 1.0) * alpha } else { rf };
    let id_m = intrinsic_dimension(&m, &tol)?.value;
    let mut inst = FamilyInstance::new(name)
        .param("n", n as f64)
        .param("r", rf)
        .param("rtol", rtol)
        .value("intdim_bab", predicted, id_m)
        .matrix("A", a.clone())
        .matrix("B", b)
        .matrix("BAB", m);
    if minimizer {
        inst = inst.param("alpha", alpha);
    }
    inst.computed.insert("intdim_a".into(), id_a);
    Ok(inst)
}

/// `A = diag(1, alpha I_{n-1})`: for `alpha < 1` both `sr(A*A) < sr(A)` and
/// `intdim(A*A) < intdim(A)`.
pub fn cross_gap_family(n: usize, alpha: f64, rotation: Option<u64>) -> Result<FamilyInstance> {
    if n < 2 {
        return Err(invalid(format!("cross gap family needs n >= 2, got {n}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let rot = Rotation::new(n, rotation);
    let mut d = vec![alpha; n];
    d[0] = 1.0;
    let a = Rotation::conjugate(&rot, Matrix::diag(&d)?)?;
    let g = a.gram().hermitian_part()?;
    let m = n as f64 - 1.0;
    let (sr_a, sr_g) = (sr(&a)?, sr(&g)?);
    let (id_a, id_g) = (intdim(&a)?, intdim(&g)?);
    let met = q(alpha) < q(1.0);
    let inst = FamilyInstance::new("cross_gap")
        .param("n", n as f64)
        .param("alpha", alpha)
        .value("sr_a", 1.0 + m * alpha.powi(2), sr_a)
        .value("sr_gram", 1.0 + m * alpha.powi(4), sr_g)
        .value("intdim_a", 1.0 + m * alpha, id_a)
        .value("intdim_gram", 1.0 + m * alpha.powi(2), id_g)
        .threshold("sr", met, exceeds(sr_a, sr_g))
        .threshold("intdim", met, exceeds(id_a, id_g))
        .matrix("A", a)
        .matrix("AstarA", g);
    Ok(with_rotation_note(inst, rotation))
}

/// Matrices with `sr_p(A) = rank(A)` for every finite `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualityKind {
    Rank1,
    ScaledUnitary,
    FlatSpectrum(usize),
    Projector(usize),
}

impl fmt::Display for EqualityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqualityKind::Rank1 => f.write_str("rank1"),
            EqualityKind::ScaledUnitary => f.write_str("scaled_unitary"),
            EqualityKind::FlatSpectrum(r) => write!(f, "flat_spectrum({r})"),
            EqualityKind::Projector(r) => write!(f, "projector({r})"),
        }
    }
}

impl FromStr for EqualityKind {
    type Err = Error;

    /// Accepts `rank1`, `scaled_unitary`, `flat_spectrum(r)` / `flat_spectrum:r`,
    /// `projector(r)` / `projector:r`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let (head, arg) = match t.find(['(', ':']) {
            Some(i) => (&t[..i], Some(t[i + 1..].trim_end_matches(')'))),
            None => (t.as_str(), None),
        };
        let rank = || -> Result<usize> {
            arg.ok_or_else(|| invalid(format!("`{s}` needs a rank argument")))?
                .parse()
                .map_err(|_| invalid(format!("bad rank in `{s}`")))
        };
        match head {
            "rank1" => Ok(EqualityKind::Rank1),
            "scaled_unitary" => Ok(EqualityKind::ScaledUnitary),
            "flat_spectrum" => Ok(EqualityKind::FlatSpectrum(rank()?)),
            "projector" => Ok(EqualityKind::Projector(rank()?)),
            _ => Err(invalid(format!("unknown equality case `{s}`"))),
        }
    }
}

pub fn equality_cases(kind: EqualityKind, n: usize, p: PExponent, seed: u64) -> Result<FamilyInstance> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let (a, r) = match kind {
        EqualityKind::Rank1 => (
            sample(&SampleSpec::prescribed_spectrum(n, n, vec![2.5], seed).with_field(ScalarField::Complex))?,
            1,
        ),
        EqualityKind::ScaledUnitary => (haar_unitary(n, ScalarField::Complex, seed).scale(-1.75), n),
        EqualityKind::FlatSpectrum(r) | EqualityKind::Projector(r) if r == 0 || r > n => {
            return Err(invalid(format!("rank must lie in 1..={n}, got {r}")))
        }
        EqualityKind::FlatSpectrum(r) => (
            sample(&SampleSpec::prescribed_spectrum(n, n, vec![3.0; r], seed).with_field(ScalarField::Complex))?,
            r,
        ),
        EqualityKind::Projector(r) => (
            sample(&SampleSpec::orthogonal_projector(n, r, seed).with_field(ScalarField::Complex))?,
            r,
        ),
    };
    let value = p_stable_rank(&a, p)?.value;
    let rank = numerical_rank(&a, crate::ranks::DEFAULT_RTOL)?;
    let predicted = if p == PExponent::Infinity { 1.0 } else { r as f64 };
    let mut inst = FamilyInstance::new("equality_cases")
        .param("n", n as f64)
        .param("p", p.value())
        .param("seed", seed as f64)
        .value("sr_p", predicted, value)
        .value("rank", r as f64, rank as f64)
        .note(format!("kind: {kind}"))
        .matrix("A", a);
    if p == PExponent::Infinity && r > 1 {
        inst = inst.note("sr_inf is 1 for every nonzero matrix; the equality with the rank needs finite p");
    }
    if p.is_quasi() {
        inst = inst.note("p < 1 amplifies round-off in the vanishing singular values");
    }
    Ok(inst)
}

/// Families whose threshold predicate separates a violation from a safe region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationFamily {
    DeletionSr,
    DeletionIntdim,
    SumViolation,
    Rank1Drop,
    ProductViolation,
}

impl ViolationFamily {
    pub const ALL: [ViolationFamily; 5] = [
        ViolationFamily::DeletionSr,
        ViolationFamily::DeletionIntdim,
        ViolationFamily::SumViolation,
        ViolationFamily::Rank1Drop,
        ViolationFamily::ProductViolation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ViolationFamily::DeletionSr => "deletion/sr",
            ViolationFamily::DeletionIntdim => "deletion/intdim",
            ViolationFamily::SumViolation => "sum_violation/sr",
            ViolationFamily::Rank1Drop => "rank1_drop/intdim",
            ViolationFamily::ProductViolation => "product_violation/sr",
        }
    }

    fn key(self) -> &'static str {
        match self {
            ViolationFamily::DeletionSr | ViolationFamily::SumViolation => "sr",
            ViolationFamily::ProductViolation => "sr",
            ViolationFamily::DeletionIntdim | ViolationFamily::Rank1Drop => "intdim",
        }
    }

    /// Parameter value at which the violation switches on.
    pub fn boundary(self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            ViolationFamily::DeletionSr => ((nf - 1.0) / (nf - 2.0)).sqrt(),
            ViolationFamily::DeletionIntdim => (nf - 1.0) / (nf - 2.0),
            ViolationFamily::SumViolation => (5.0 * (nf - 1.0) / (nf - 3.0)).sqrt(),
            ViolationFamily::Rank1Drop => (nf - 1.0) / (nf - 3.0),
            ViolationFamily::ProductViolation => 1.0,
        }
    }

    pub fn build(self, n: usize, param: f64, rotation: Option<u64>) -> Result<FamilyInstance> {
        match self {
            ViolationFamily::DeletionSr | ViolationFamily::DeletionIntdim => {
                deletion_family(n, param, rotation)
            }
            ViolationFamily::SumViolation => sum_violation_family(n, param, rotation),
            ViolationFamily::Rank1Drop => rank1_drop_family(n, param, rotation),
            ViolationFamily::ProductViolation => product_violation_family(n, param, rotation),
        }
    }

    /// `(threshold predicate, effect observed)` for one parameter value.
    pub fn evaluate(self, n: usize, param: f64, rotation: Option<u64>) -> Result<(bool, bool)> {
        let inst = self.build(n, param, rotation)?;
        let k = self.key();
        Ok((inst.thresholds[k], inst.violations[k]))
    }

    /// Grid of `2 * half` points spaced `step` apart around the boundary,
    /// boundary excluded. The product family has no safe side above its
    /// boundary, so its grid lies entirely above it.
    pub fn sweep_grid(self, n: usize, step: f64, half: usize) -> Vec<f64> {
        let b = self.boundary(n);
        match self {
            ViolationFamily::ProductViolation => {
                (1..=2 * half).map(|k| b + k as f64 * step).collect()
            }
            _ => (0..=2 * half)
                .filter(|&k| k != half)
                .map(|k| b + (k as f64 - half as f64) * step)
                .collect(),
        }
    }
}
