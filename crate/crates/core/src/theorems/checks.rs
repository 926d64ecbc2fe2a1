use crate::error::{Error, Result};
use crate::matcore::{
    hermitian_eigenvalues, is_psd, pivoted_cholesky, psd_spectrum, singular_values, Matrix,
    Spectrum, Tolerances,
};
use crate::ranks::{numerical_rank_of_spectrum, p_stable_rank_of_spectrum, p_stable_root_of_spectrum};
use crate::schatten::PExponent;

use super::report::{CheckReport, ReportBuilder};

/// PSD spectrum, or the reason the matrix does not qualify.
fn psd_or_reason(a: &Matrix, label: &str, tol: &Tolerances) -> Result<std::result::Result<Spectrum, String>> {
    match psd_spectrum(a, tol) {
        Ok(s) => Ok(Ok(s)),
        Err(Error::NotSquare { rows, cols }) => Ok(Err(format!("{label} is not square ({rows}x{cols})"))),
        Err(Error::NotHermitian { max_asymmetry }) => Ok(Err(format!(
            "{label} is not Hermitian (max asymmetry {max_asymmetry:e})"
        ))),
        Err(Error::NotPsd { lambda_min }) => Ok(Err(format!(
            "{label} is not positive semi-definite (lambda_min = {lambda_min:e})"
        ))),
        Err(e) => Err(e),
    }
}

fn same_shape(a: &Matrix, b: &Matrix) -> std::result::Result<(), String> {
    if a.shape() == b.shape() {
        Ok(())
    } else {
        Err(format!("shapes differ: {:?} vs {:?}", a.shape(), b.shape()))
    }
}

fn all_na(name: &'static str, ps: &[PExponent], reason: &str) -> Vec<CheckReport> {
    ps.iter()
        .map(|&p| CheckReport::not_applicable(name, Some(p), reason))
        .collect()
}

fn pdetail(p: PExponent) -> f64 {
    p.value()
}

macro_rules! bail_na {
    ($name:expr, $p:expr, $reason:expr) => {
        return Ok(CheckReport::not_applicable($name, $p, $reason))
    };
}

macro_rules! bail_na_grid {
    ($name:expr, $ps:expr, $reason:expr) => {
        return Ok(all_na($name, $ps, &$reason))
    };
}

/// `lambda_1(A) <= lambda_1(A) + lambda_n(B) <= lambda_1(A + B)` for PSD `A`, `B`.
pub fn check_weyl(a: &Matrix, b: &Matrix, tol: &Tolerances) -> Result<CheckReport> {
    const NAME: &str = "weyl";
    if let Err(r) = same_shape(a, b) {
        bail_na!(NAME, None, r);
    }
    let sa = match psd_or_reason(a, "A", tol)? {
        Ok(s) => s,
        Err(r) => bail_na!(NAME, None, r),
    };
    let sb = match psd_or_reason(b, "B", tol)? {
        Ok(s) => s,
        Err(r) => bail_na!(NAME, None, r),
    };
    let ssum = hermitian_eigenvalues(&a.add(b)?.hermitian_part()?, tol)?;
    let l1a = sa.largest();
    let lnb = sb.smallest();
    let l1sum = ssum.largest();
    Ok(ReportBuilder::new(NAME, None)
        .primary(l1a, l1sum)
        .require("upper", l1a + lnb, l1sum)
        .require("lower", l1a, l1a + lnb)
        .detail("lambda1_a", l1a)
        .detail("lambdan_b", lnb)
        .detail("lambda1_sum", l1sum)
        .finish())
}

fn intdim_from(a: &Matrix, spec: &Spectrum) -> Result<f64> {
    let top = spec.largest().max(0.0);
    Ok(if top == 0.0 { 0.0 } else { a.trace()?.re / top })
}

/// `intdim(A + B) <= intdim(A) + intdim(B)` for nonzero PSD `A`, `B`.
pub fn check_intdim_subadditive(a: &Matrix, b: &Matrix, tol: &Tolerances) -> Result<CheckReport> {
    const NAME: &str = "intdim_subadditive";
    if let Err(r) = same_shape(a, b) {
        bail_na!(NAME, None, r);
    }
    let sa = match psd_or_reason(a, "A", tol)? {
        Ok(s) => s,
        Err(r) => bail_na!(NAME, None, r),
    };
    let sb = match psd_or_reason(b, "B", tol)? {
        Ok(s) => s,
        Err(r) => bail_na!(NAME, None, r),
    };
    if a.is_zero() || b.is_zero() {
        bail_na!(NAME, None, "A and B must be nonzero");
    }
    let sum = a.add(b)?.hermitian_part()?;
    let ssum = hermitian_eigenvalues(&sum, tol)?;
    let ia = intdim_from(a, &sa)?;
    let ib = intdim_from(b, &sb)?;
    let isum = intdim_from(&sum, &ssum)?;
    Ok(ReportBuilder::new(NAME, None)
        .primary(isum, ia + ib)
        .require("sum", isum, ia + ib)
        .detail("intdim_a", ia)
        .detail("intdim_b", ib)
        .detail("intdim_sum", isum)
        .finish())
}

fn norm_exponent_reason(p: PExponent) -> Option<String> {
    if p.is_norm() {
        None
    } else {
        Some(format!("requires p >= 1, got p = {p}"))
    }
}

/// `sr_p(A+B)^(1/p) <= sr_p(A)^(1/p) + sr_p(B)^(1/p)` for nonzero PSD `A`, `B`.
pub fn check_sum_subadditivity_proot_grid(
    a: &Matrix,
    b: &Matrix,
    ps: &[PExponent],
    tol: &Tolerances,
) -> Result<Vec<CheckReport>> {
    const NAME: &str = "sum_subadditivity_proot";
    if let Err(r) = same_shape(a, b) {
        bail_na_grid!(NAME, ps, r);
    }
    let sa = match psd_or_reason(a, "A", tol)? {
        Ok(s) => s.to_singular(),
        Err(r) => bail_na_grid!(NAME, ps, r),
    };
    let sb = match psd_or_reason(b, "B", tol)? {
        Ok(s) => s.to_singular(),
        Err(r) => bail_na_grid!(NAME, ps, r),
    };
    if a.is_zero() || b.is_zero() {
        bail_na_grid!(NAME, ps, "A and B must be nonzero");
    }
    let ssum = hermitian_eigenvalues(&a.add(b)?.hermitian_part()?, tol)?.to_singular();
    ps.iter()
        .map(|&p| {
            if let Some(r) = norm_exponent_reason(p) {
                return Ok(CheckReport::not_applicable(NAME, Some(p), r));
            }
            let ra = p_stable_root_of_spectrum(&sa, p)?;
            let rb = p_stable_root_of_spectrum(&sb, p)?;
            let rsum = p_stable_root_of_spectrum(&ssum, p)?;
            Ok(ReportBuilder::new(NAME, Some(p))
                .primary(rsum, ra + rb)
                .require("sum", rsum, ra + rb)
                .detail("p", pdetail(p))
                .detail("root_a", ra)
                .detail("root_b", rb)
                .detail("root_sum", rsum)
                .finish())
        })
        .collect()
}

pub fn check_sum_subadditivity_proot(
    a: &Matrix,
    b: &Matrix,
    p: PExponent,
    tol: &Tolerances,
) -> Result<CheckReport> {
    Ok(check_sum_subadditivity_proot_grid(a, b, &[p], tol)?.remove(0))
}

/// `sr_p(A+B)^(1/p) - sr_p(A)^(1/p) <= 1` for PSD `A` and rank-one PSD `B`.
pub fn check_rank1_addition_grid(
    a: &Matrix,
    b: &Matrix,
    ps: &[PExponent],
    tol: &Tolerances,
) -> Result<Vec<CheckReport>> {
    const NAME: &str = "rank1_addition";
    if let Err(r) = same_shape(a, b) {
        bail_na_grid!(NAME, ps, r);
    }
    let sa = match psd_or_reason(a, "A", tol)? {
        Ok(s) => s.to_singular(),
        Err(r) => bail_na_grid!(NAME, ps, r),
    };
    let sb = match psd_or_reason(b, "B", tol)? {
        Ok(s) => s.to_singular(),
        Err(r) => bail_na_grid!(NAME, ps, r),
    };
    let rank_b = numerical_rank_of_spectrum(&sb, tol.rel_spectral);
    if rank_b != 1 {
        bail_na_grid!(NAME, ps, format!("B must have rank 1, has numerical rank {rank_b}"));
    }
    let ssum = hermitian_eigenvalues(&a.add(b)?.hermitian_part()?, tol)?.to_singular();
    ps.iter()
        .map(|&p| {
            if let Some(r) = norm_exponent_reason(p) {
                return Ok(CheckReport::not_applicable(NAME, Some(p), r));
            }
            let ra = p_stable_root_of_spectrum(&sa, p)?;
            let rsum = p_stable_root_of_spectrum(&ssum, p)?;
            Ok(ReportBuilder::new(NAME, Some(p))
                .primary(rsum - ra, 1.0)
                .require("increase", rsum - ra, 1.0)
                .detail("p", pdetail(p))
                .detail("root_a", ra)
                .detail("root_sum", rsum)
                .detail("root_b", p_stable_root_of_spectrum(&sb, p)?)
                .finish())
        })
        .collect()
}

pub fn check_rank1_addition(
    a: &Matrix,
    b: &Matrix,
    p: PExponent,
    tol: &Tolerances,
) -> Result<CheckReport> {
    Ok(check_rank1_addition_grid(a, b, &[p], tol)?.remove(0))
}

/// `sr_p(B) / kappa^p <= sr_p(AB) <= kappa^p sr_p(B)` for nonsingular `A`.
///
/// Nonsingular means full numerical rank at `tol.rel_spectral`;
/// `kappa = s_1(A) / s_n(A)`.
pub fn check_product_kappa_grid(
    a: &Matrix,
    b: &Matrix,
    ps: &[PExponent],
    tol: &Tolerances,
) -> Result<Vec<CheckReport>> {
    const NAME: &str = "product_kappa";
    if !a.is_square() {
        bail_na_grid!(NAME, ps, format!("A is not square ({:?})", a.shape()));
    }
    if a.cols() != b.rows() {
        bail_na_grid!(NAME, ps, format!("A{:?} and B{:?} are not conformable", a.shape(), b.shape()));
    }
    let sa = singular_values(a)?;
    let rank_a = numerical_rank_of_spectrum(&sa, tol.rel_spectral);
    if rank_a != a.rows() {
        bail_na_grid!(
            NAME,
            ps,
            format!("A is numerically singular (rank {rank_a} < {})", a.rows())
        );
    }
    let kappa = sa.largest() / sa.smallest();
    let sb = singular_values(b)?;
    let sab = singular_values(&a.matmul(b)?)?;
    ps.iter()
        .map(|&p| {
            let pv = match p {
                PExponent::Finite(v) if v >= 1.0 => v,
                _ => {
                    return Ok(CheckReport::not_applicable(
                        NAME,
                        Some(p),
                        format!("requires finite p >= 1, got p = {p}"),
                    ))
                }
            };
            let srb = p_stable_rank_of_spectrum(&sb, p, tol.rel_spectral);
            let srab = p_stable_rank_of_spectrum(&sab, p, tol.rel_spectral);
            let kp = kappa.powf(pv);
            let lower = srb / kp;
            let upper = kp * srb;
            Ok(ReportBuilder::new(NAME, Some(p))
                .primary(srab, upper)
                .require("upper", srab, upper)
                .require("lower", lower, srab)
                .detail("p", pv)
                .detail("kappa2", kappa)
                .detail("sr_b", srb)
                .detail("sr_ab", srab)
                .detail("lower", lower)
                .detail("upper", upper)
                .finish())
        })
        .collect()
}

pub fn check_product_kappa(
    a: &Matrix,
    b: &Matrix,
    p: PExponent,
    tol: &Tolerances,
) -> Result<CheckReport> {
    Ok(check_product_kappa_grid(a, b, &[p], tol)?.remove(0))
}

/// `sr_p(A*A) <= sr_p(A)` and `sr_p(AA*) <= sr_p(A)`, together with the
/// identities `sr_p(A*A) = sr_2p(A) = sr_p(AA*)`.
pub fn check_cross_product_grid(
    a: &Matrix,
    ps: &[PExponent],
    tol: &Tolerances,
) -> Result<Vec<CheckReport>> {
    const NAME: &str = "cross_product";
    let sa = singular_values(a)?;
    let sg = singular_values(&a.gram())?;
    let so = singular_values(&a.outer_gram())?;
    ps.iter()
        .map(|&p| {
            if let Some(r) = norm_exponent_reason(p) {
                return Ok(CheckReport::not_applicable(NAME, Some(p), r));
            }
            let rtol = tol.rel_spectral;
            let sr_a = p_stable_rank_of_spectrum(&sa, p, rtol);
            let sr_2p = p_stable_rank_of_spectrum(&sa, p.doubled(), rtol);
            let sr_g = p_stable_rank_of_spectrum(&sg, p, rtol);
            let sr_o = p_stable_rank_of_spectrum(&so, p, rtol);
            Ok(ReportBuilder::new(NAME, Some(p))
                .primary(sr_g, sr_a)
                .require("gram", sr_g, sr_a)
                .require("outer_gram", sr_o, sr_a)
                .require_equal("gram_identity", sr_g, sr_2p)
                .require_equal("outer_gram_identity", sr_o, sr_2p)
                .detail("p", pdetail(p))
                .detail("sr_a", sr_a)
                .detail("sr_2p_a", sr_2p)
                .detail("sr_gram", sr_g)
                .detail("sr_outer_gram", sr_o)
                .finish())
        })
        .collect()
}

pub fn check_cross_product(a: &Matrix, p: PExponent, tol: &Tolerances) -> Result<CheckReport> {
    Ok(check_cross_product_grid(a, &[p], tol)?.remove(0))
}

/// Perturbation bounds for `sr_p(A + E)^(1/p)` with `eps = ||E||_2/||A||_2 < 1`
/// and `r = rank(E)`:
///
/// `(s - r^(1/p) eps)/(1 + eps) <= sr_p(A+E)^(1/p) <= (s + r^(1/p) eps)/(1 - eps)`
///
/// where `s = sr_p(A)^(1/p)`. If `A` and `E` are both PSD, additionally
/// `s/(1 + eps) <= sr_p(A+E)^(1/p) <= s + r^(1/p) eps`.
pub fn check_perturbation_grid(
    a: &Matrix,
    e: &Matrix,
    ps: &[PExponent],
    tol: &Tolerances,
) -> Result<Vec<CheckReport>> {
    const NAME: &str = "perturbation";
    if let Err(r) = same_shape(a, e) {
        bail_na_grid!(NAME, ps, r);
    }
    let sa = singular_values(a)?;
    if sa.largest() == 0.0 {
        bail_na_grid!(NAME, ps, "A is the zero matrix");
    }
    let se = singular_values(e)?;
    let eps = se.largest() / sa.largest();
    if eps >= 1.0 {
        bail_na_grid!(NAME, ps, format!("epsilon = {eps} is not below 1"));
    }
    let rank_e = numerical_rank_of_spectrum(&se, tol.rel_spectral);
    let psd_pair = a.is_square() && is_psd(a, tol)? && is_psd(e, tol)?;
    let ssum = singular_values(&a.add(e)?)?;
    ps.iter()
        .map(|&p| {
            if let Some(r) = norm_exponent_reason(p) {
                return Ok(CheckReport::not_applicable(NAME, Some(p), r));
            }
            let s = p_stable_root_of_spectrum(&sa, p)?;
            let v = p_stable_root_of_spectrum(&ssum, p)?;
            let rroot = match (rank_e, p) {
                (0, _) => 0.0,
                (_, PExponent::Finite(pv)) => (rank_e as f64).powf(1.0 / pv),
                _ => 1.0,
            };
            let lower = (s - rroot * eps) / (1.0 + eps);
            let upper = (s + rroot * eps) / (1.0 - eps);
            let mut rb = ReportBuilder::new(NAME, Some(p))
                .require("general_lower", lower, v)
                .require("general_upper", v, upper)
                .detail("p", pdetail(p))
                .detail("epsilon", eps)
                .detail("rank_e", rank_e as f64)
                .detail("root_a", s)
                .detail("root_sum", v)
                .detail("lower_general", lower)
                .detail("upper_general", upper)
                .detail("psd_pair", if psd_pair { 1.0 } else { 0.0 });
            if psd_pair {
                let lower_psd = s / (1.0 + eps);
                let upper_psd = s + rroot * eps;
                rb = rb
                    .require("psd_lower", lower_psd, v)
                    .require("psd_upper", v, upper_psd)
                    .detail("lower_psd", lower_psd)
                    .detail("upper_psd", upper_psd)
                    .primary(v, upper_psd);
            } else {
                rb = rb.primary(v, upper);
            }
            Ok(rb.finish())
        })
        .collect()
}

pub fn check_perturbation(
    a: &Matrix,
    e: &Matrix,
    p: PExponent,
    tol: &Tolerances,
) -> Result<CheckReport> {
    Ok(check_perturbation_grid(a, e, &[p], tol)?.remove(0))
}

/// `min(sr(A11), sr(A22)) <= sr(diag(A11, A22)) <= sr(A11) + sr(A22)`.
pub fn check_block_diag_sr(a11: &Matrix, a22: &Matrix, tol: &Tolerances) -> Result<CheckReport> {
    const NAME: &str = "block_diag_sr";
    let two = PExponent::Finite(2.0);
    let rtol = tol.rel_spectral;
    let block = Matrix::block_diagonal(a11, a22);
    let sr = p_stable_rank_of_spectrum(&singular_values(&block)?, two, rtol);
    let sr11 = p_stable_rank_of_spectrum(&singular_values(a11)?, two, rtol);
    let sr22 = p_stable_rank_of_spectrum(&singular_values(a22)?, two, rtol);
    let lower = sr11.min(sr22);
    let upper = sr11 + sr22;
    Ok(ReportBuilder::new(NAME, None)
        .primary(sr, upper)
        .require("upper", sr, upper)
        .require("lower", lower, sr)
        .detail("sr", sr)
        .detail("sr_11", sr11)
        .detail("sr_22", sr22)
        .finish())
}

/// `intdim(A) <= intdim(A11) + intdim(A22)` for PSD `A` split after row/column `k`.
pub fn check_block_intdim(a: &Matrix, k: usize, tol: &Tolerances) -> Result<CheckReport> {
    const NAME: &str = "block_intdim";
    let sa = match psd_or_reason(a, "A", tol)? {
        Ok(s) => s,
        Err(r) => bail_na!(NAME, None, r),
    };
    let n = a.rows();
    if k == 0 || k >= n {
        bail_na!(NAME, None, format!("split index must satisfy 1 <= k < {n}, got {k}"));
    }
    let h = a.hermitian_part()?;
    let a11 = h.submatrix(0, 0, k, k)?;
    let a22 = h.submatrix(k, k, n - k, n - k)?;
    let s11 = hermitian_eigenvalues(&a11, tol)?;
    let s22 = hermitian_eigenvalues(&a22, tol)?;
    let ia = intdim_from(&h, &sa)?;
    let i11 = intdim_from(&a11, &s11)?;
    let i22 = intdim_from(&a22, &s22)?;
    Ok(ReportBuilder::new(NAME, None)
        .primary(ia, i11 + i22)
        .require("blocks", ia, i11 + i22)
        .detail("k", k as f64)
        .detail("intdim_a", ia)
        .detail("intdim_11", i11)
        .detail("intdim_22", i22)
        .finish())
}

/// Deleting a column never raises the rank. The stable rank (and, for PSD
/// `A`, the intrinsic dimension of the principal submatrix) may go either
/// way and is reported in `details` only.
///
/// Both ranks are counted against the cut-off `rtol * s_1(A)`, so singular
/// value interlacing makes the rank clause exact.
pub fn check_deletion(a: &Matrix, drop_col: usize, tol: &Tolerances) -> Result<CheckReport> {
    const NAME: &str = "deletion";
    if a.cols() < 2 || drop_col >= a.cols() {
        bail_na!(
            NAME,
            None,
            format!("cannot delete column {drop_col} from {} columns", a.cols())
        );
    }
    let hat = a.remove_column(drop_col)?;
    let sa = singular_values(a)?;
    let sh = singular_values(&hat)?;
    let cutoff = tol.rel_spectral * sa.largest();
    let rank_a = sa.values().iter().filter(|&&s| s > cutoff).count();
    let rank_hat = sh.values().iter().filter(|&&s| s > cutoff).count();
    let two = PExponent::Finite(2.0);
    let sr_a = p_stable_rank_of_spectrum(&sa, two, tol.rel_spectral);
    let sr_hat = p_stable_rank_of_spectrum(&sh, two, tol.rel_spectral);
    let mut rb = ReportBuilder::new(NAME, None)
        .primary(rank_hat as f64, rank_a as f64)
        .require("rank", rank_hat as f64, rank_a as f64)
        .detail("drop_col", drop_col as f64)
        .detail("rank_a", rank_a as f64)
        .detail("rank_a_hat", rank_hat as f64)
        .detail("sr_a", sr_a)
        .detail("sr_a_hat", sr_hat)
        .detail("sr_increased", if sr_hat > sr_a { 1.0 } else { 0.0 });
    if a.is_square() && drop_col < a.rows() {
        if let Ok(spec) = psd_spectrum(a, tol) {
            let sub = a.hermitian_part()?.remove_row_and_column(drop_col)?;
            let ssub = hermitian_eigenvalues(&sub, tol)?;
            let ia = intdim_from(a, &spec)?;
            let isub = intdim_from(&sub, &ssub)?;
            rb = rb
                .detail("intdim_a", ia)
                .detail("intdim_a_hat", isub)
                .detail("intdim_increased", if isub > ia { 1.0 } else { 0.0 });
        }
    }
    Ok(rb.finish())
}

/// Pivoted Cholesky `P* A P = L L*` of a PSD matrix. The identities give
/// `intdim(A) = sr(L)`, and `sr(L) <= sr_1(L)` by monotonicity in `p`;
/// the verified inequality is `intdim(A) <= sr_1(L)`. `trace(L)/||L||_2`
/// and `sr(L)` are reported alongside, with the permutation.
pub fn check_cholesky_intdim(a: &Matrix, tol: &Tolerances) -> Result<CheckReport> {
    const NAME: &str = "cholesky_intdim";
    let sa = match psd_or_reason(a, "A", tol)? {
        Ok(s) => s,
        Err(r) => bail_na!(NAME, None, r),
    };
    let f = pivoted_cholesky(a, tol)?;
    let ia = intdim_from(a, &sa)?;
    let sl = singular_values(&f.l)?;
    let sr_l = p_stable_rank_of_spectrum(&sl, PExponent::Finite(2.0), tol.rel_spectral);
    let sr1_l = p_stable_rank_of_spectrum(&sl, PExponent::Finite(1.0), tol.rel_spectral);
    let lead: f64 = (0..f.l.cols().min(f.l.rows())).map(|i| f.l.get(i, i).re).sum();
    let trace_ratio = if sl.largest() > 0.0 { lead / sl.largest() } else { 0.0 };
    let mut rb = ReportBuilder::new(NAME, None)
        .primary(ia, sr1_l)
        .require("factor", ia, sr1_l)
        .detail("intdim_a", ia)
        .detail("sr_l", sr_l)
        .detail("sr1_l", sr1_l)
        .detail("trace_ratio_l", trace_ratio)
        .detail("rank", f.rank as f64);
    for (i, &j) in f.perm.iter().enumerate() {
        rb = rb.detail(format!("perm_{i:02}"), j as f64);
    }
    Ok(rb.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{sample, SampleSpec, ScalarField};

    const TOL: Tolerances = Tolerances {
        rel_spectral: 1e-10,
        hermitian_asym: 1e-12,
        psd_negativity: 1e-10,
    };

    fn diag(v: &[f64]) -> Matrix {
        Matrix::diag(v).unwrap()
    }

    fn psd(seed: u64, n: usize) -> Matrix {
        sample(&SampleSpec::psd_gram(n + 2, n, seed).with_field(ScalarField::Complex)).unwrap()
    }

    #[test]
    fn weyl_cases() {
        let r = check_weyl(&Matrix::identity(3), &Matrix::identity(3), &TOL).unwrap();
        assert!(r.holds());
        assert!(r.detail("slack_upper").unwrap().abs() < 1e-14);
        let r = check_weyl(&psd(1, 4), &Matrix::zeros(4, 4), &TOL).unwrap();
        assert!(r.holds());
        assert!(r.slack.abs() < 1e-12);
        let r = check_weyl(&psd(2, 8), &psd(3, 8), &TOL).unwrap();
        assert!(r.holds());
        // oracle: eigenvalues of each matrix separately
        let a = psd(2, 8);
        let b = psd(3, 8);
        let la = hermitian_eigenvalues(&a, &TOL).unwrap();
        let lb = hermitian_eigenvalues(&b, &TOL).unwrap();
        assert_eq!(r.detail("lambda1_a"), Some(la.largest()));
        assert_eq!(r.detail("lambdan_b"), Some(lb.smallest()));
        let r = check_weyl(&diag(&[1.0, -1.0]), &Matrix::identity(2), &TOL).unwrap();
        assert!(!r.preconditions_met);
    }

    #[test]
    fn intdim_subadditive_cases() {
        let r = check_intdim_subadditive(&Matrix::identity(4), &Matrix::identity(4), &TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (4.0, 8.0));
        // oracle: direct trace/norm of complementary coordinate projectors
        let a = diag(&[1.0, 1.0, 0.0, 0.0, 0.0]);
        let b = diag(&[0.0, 0.0, 1.0, 1.0, 1.0]);
        let r = check_intdim_subadditive(&a, &b, &TOL).unwrap();
        assert!((r.lhs - 5.0).abs() < 1e-14 && (r.rhs - 5.0).abs() < 1e-14);
        assert!(r.slack.abs() < 1e-14 && r.holds());
        let r = check_intdim_subadditive(&psd(4, 6), &psd(5, 6), &TOL).unwrap();
        assert!(r.holds());
        let r = check_intdim_subadditive(&Matrix::zeros(2, 2), &Matrix::identity(2), &TOL).unwrap();
        assert!(!r.preconditions_met);
    }

    #[test]
    fn sum_subadditivity_cases() {
        let a = psd(6, 5);
        for p in [1.0, 2.0, 3.0] {
            let p = PExponent::Finite(p);
            let r = check_sum_subadditivity_proot(&a, &a, p, &TOL).unwrap();
            assert!((r.lhs - r.detail("root_a").unwrap()).abs() < 1e-12);
            assert!(r.holds());
        }
        let r = check_sum_subadditivity_proot(
            &diag(&[1.0, 0.0]),
            &diag(&[0.0, 1.0]),
            PExponent::Finite(2.0),
            &TOL,
        )
        .unwrap();
        assert!((r.lhs - 2f64.sqrt()).abs() < 1e-15 && r.rhs == 2.0);
        let r = check_sum_subadditivity_proot(
            &diag(&[4.0, 2.0]),
            &diag(&[-4.0, -1.0]),
            PExponent::Finite(2.0),
            &TOL,
        )
        .unwrap();
        assert!(!r.preconditions_met);
        let r = check_sum_subadditivity_proot(&a, &a, PExponent::Finite(0.5), &TOL).unwrap();
        assert!(!r.preconditions_met);
    }

    #[test]
    fn rank1_addition_cases() {
        let b = sample(&SampleSpec::rank1_psd(5, 8)).unwrap();
        for p in PExponent::default_grid() {
            let r = check_rank1_addition(&Matrix::zeros(5, 5), &b, p, &TOL).unwrap();
            assert!((r.lhs - 1.0).abs() < 1e-12, "{p}: {}", r.lhs);
            assert!(r.slack.abs() < 1e-12 && r.holds());
        }
        // intdim drops by 8/3 when adding diag(3, 0, ...) to diag(0, I_4)
        let a = diag(&[0.0, 1.0, 1.0, 1.0, 1.0]);
        let b = diag(&[3.0, 0.0, 0.0, 0.0, 0.0]);
        let r = check_rank1_addition(&a, &b, PExponent::Finite(1.0), &TOL).unwrap();
        let drop = 4.0 - (1.0 + 4.0 / 3.0);
        assert!((r.lhs + drop).abs() < 1e-14);
        assert!(r.holds() && -r.lhs > 1.0);
        let r = check_rank1_addition(&psd(9, 6), &sample(&SampleSpec::rank1_psd(6, 10)).unwrap(), PExponent::Finite(2.0), &TOL)
            .unwrap();
        assert!(r.holds());
        let r = check_rank1_addition(&a, &Matrix::identity(5), PExponent::Finite(2.0), &TOL).unwrap();
        assert!(!r.preconditions_met);
    }

    #[test]
    fn product_kappa_cases() {
        let q = crate::matcore::haar_unitary(5, ScalarField::Complex, 4);
        let b = sample(&SampleSpec::gaussian(5, 3, 5)).unwrap();
        for p in [1.0, 2.0, 3.0, 10.0] {
            let r = check_product_kappa(&q, &b, PExponent::Finite(p), &TOL).unwrap();
            assert!(r.holds());
            assert!((r.detail("kappa2").unwrap() - 1.0).abs() < 1e-13);
            assert!(r.slack.abs() <= 1e-10 * r.lhs.max(1.0));
            let r = check_product_kappa(&Matrix::identity(5).scale(3.0), &b, PExponent::Finite(p), &TOL)
                .unwrap();
            assert!(r.slack.abs() <= 1e-10 * r.lhs.max(1.0));
        }
        let a = sample(&SampleSpec::gaussian(5, 5, 6)).unwrap();
        assert!(check_product_kappa(&a, &b, PExponent::Finite(2.0), &TOL).unwrap().holds());
        let singular = diag(&[1.0, 1.0, 1.0, 1.0, 0.0]);
        let r = check_product_kappa(&singular, &b, PExponent::Finite(2.0), &TOL).unwrap();
        assert!(!r.preconditions_met);
        let r = check_product_kappa(&a, &b, PExponent::Infinity, &TOL).unwrap();
        assert!(!r.preconditions_met);
    }

    #[test]
    fn cross_product_cases() {
        let proj = sample(&SampleSpec::orthogonal_projector(6, 2, 1)).unwrap();
        let r = check_cross_product(&proj, PExponent::Finite(2.0), &TOL).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12 && (r.rhs - 2.0).abs() < 1e-12);
        assert!(r.holds());
        // sr(A) = 1 + 2 * 0.25, sr(A*A) = 1 + 2 * 0.0625
        let a = diag(&[1.0, 0.5, 0.5]);
        let r = check_cross_product(&a, PExponent::Finite(2.0), &TOL).unwrap();
        assert!((r.rhs - 1.5).abs() < 1e-14 && (r.lhs - 1.125).abs() < 1e-14);
        assert!(r.detail("slack_gram").unwrap() > 0.3);
        let g = sample(&SampleSpec::gaussian(4, 7, 2).with_field(ScalarField::Complex)).unwrap();
        for r in check_cross_product_grid(&g, &PExponent::default_grid(), &TOL).unwrap() {
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn perturbation_cases() {
        let a = psd(11, 6);
        let zero = Matrix::zeros(6, 6);
        let r = check_perturbation(&a, &zero, PExponent::Finite(2.0), &TOL).unwrap();
        let s = r.detail("root_a").unwrap();
        for key in ["lower_general", "upper_general", "lower_psd", "upper_psd", "root_sum"] {
            assert!((r.detail(key).unwrap() - s).abs() < 1e-12, "{key}");
        }
        let alpha = 0.4;
        for p in [1.0, 2.0] {
            let r = check_perturbation(&a, &a.scale(alpha), PExponent::Finite(p), &TOL).unwrap();
            assert!(r.holds());
            let s = r.detail("root_a").unwrap();
            let lower_slack = r.detail("slack_psd_lower").unwrap();
            assert!((lower_slack - (1.0 - 1.0 / (1.0 + alpha)) * s).abs() < 1e-10);
        }
        let r = check_perturbation(&a, &a.scale(1.5), PExponent::Finite(2.0), &TOL).unwrap();
        assert!(!r.preconditions_met);
        let r = check_perturbation(&zero, &a, PExponent::Finite(2.0), &TOL).unwrap();
        assert!(!r.preconditions_met);
    }

    #[test]
    fn block_diag_cases() {
        let r = check_block_diag_sr(&Matrix::identity(3), &Matrix::identity(3), &TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (6.0, 6.0));
        assert!(r.holds());
        // oracle: (2 + 9) / 9
        let r = check_block_diag_sr(&Matrix::identity(2), &diag(&[3.0]), &TOL).unwrap();
        assert!((r.lhs - 11.0 / 9.0).abs() < 1e-14);
        assert_eq!(r.rhs, 3.0);
        assert!(r.holds());
    }

    #[test]
    fn block_intdim_cases() {
        for k in 1..5 {
            let r = check_block_intdim(&Matrix::identity(5), k, &TOL).unwrap();
            assert!(r.slack.abs() < 1e-14 && r.holds());
        }
        let r = check_block_intdim(&psd(12, 8), 4, &TOL).unwrap();
        assert!(r.holds());
        assert!(!check_block_intdim(&Matrix::identity(3), 3, &TOL).unwrap().preconditions_met);
    }

    #[test]
    fn deletion_cases() {
        let a = Matrix::from_row_major(2, 3, &[1.0, 2.0, 0.0, 3.0, 4.0, 0.0]).unwrap();
        let r = check_deletion(&a, 2, &TOL).unwrap();
        assert_eq!(r.detail("sr_a"), r.detail("sr_a_hat"));
        let a = diag(&[1.0, 1.0, 1.0, 1.0, 2.0]);
        let r = check_deletion(&a, 4, &TOL).unwrap();
        assert!(r.holds());
        assert!((r.detail("sr_a").unwrap() - 2.0).abs() < 1e-14);
        assert!((r.detail("sr_a_hat").unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(r.detail("sr_increased"), Some(1.0));
        assert_eq!(r.detail("intdim_increased"), Some(1.0));
        let g = sample(&SampleSpec::gaussian(5, 4, 3)).unwrap();
        assert!(check_deletion(&g, 1, &TOL).unwrap().holds());
        assert!(!check_deletion(&g, 4, &TOL).unwrap().preconditions_met);
    }

    #[test]
    fn cholesky_cases() {
        let r = check_cholesky_intdim(&Matrix::identity(4), &TOL).unwrap();
        assert!((r.lhs - 4.0).abs() < 1e-14 && (r.rhs - 4.0).abs() < 1e-14);
        let alpha: f64 = 0.5;
        let a = diag(&[1.0, alpha * alpha, alpha * alpha, alpha * alpha]);
        let r = check_cholesky_intdim(&a, &TOL).unwrap();
        assert!((r.lhs - (1.0 + 3.0 * alpha * alpha)).abs() < 1e-14);
        assert!((r.rhs - (1.0 + 3.0 * alpha)).abs() < 1e-14);
        assert!((r.detail("trace_ratio_l").unwrap() - (1.0 + 3.0 * alpha)).abs() < 1e-14);
        assert!((r.detail("sr_l").unwrap() - r.lhs).abs() < 1e-14);
        let r = check_cholesky_intdim(&psd(13, 7), &TOL).unwrap();
        assert!(r.holds());
        assert!((r.detail("sr_l").unwrap() - r.lhs).abs() < 1e-10);
        assert!(!check_cholesky_intdim(&diag(&[1.0, -1.0]), &TOL).unwrap().preconditions_met);
    }
}
