//! Acceptance criteria. Each criterion prints one `PASS` or `FAIL` line;
//! the process exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use srlab::gallery::{self, EqualityKind, ViolationFamily};
use srlab::matcore::{haar_unitary, psd_sqrt, sample, SampleSpec, ScalarField};
use srlab::theorems::{check_cross_product, check_product_kappa, Outcome};
use srlab::{numerical_rank, p_stable_rank, Matrix, PExponent, Tolerances};
use srlab_cli::condition::{condition_sweep, perturbation_direction, PerturbationKind};
use srlab_cli::fuzz::{run_fuzz, FuzzConfig};

type Criterion = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// `sum d_j^2 / max d_j^2` straight from the diagonal entries.
fn sr_diag(d: &[f64]) -> f64 {
    let top = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    d.iter().map(|x| (x / top).powi(2)).sum()
}

/// `trace / lambda_max` of a non-negative diagonal.
fn intdim_diag(d: &[f64]) -> f64 {
    let top = d.iter().cloned().fold(0.0f64, f64::max);
    d.iter().sum::<f64>() / top
}

fn diag_with(n: usize, fill: f64, idx: usize, v: f64) -> Vec<f64> {
    let mut d = vec![fill; n];
    d[idx] = v;
    d
}

fn matches(inst: &gallery::FamilyInstance, key: &str, oracle: f64) -> Result<(), String> {
    let p = inst.predicted[key];
    let c = inst.computed[key];
    ensure(rel(p, oracle) <= 1e-10 && rel(c, oracle) <= 1e-10, || {
        format!("{}.{key}: oracle {oracle}, predicted {p}, computed {c}", inst.name)
    })
}

fn formula_reproduction() -> Result<String, String> {
    let mut checked = 0;
    let mut go = |inst: &gallery::FamilyInstance, key: &str, oracle: f64| {
        checked += 1;
        matches(inst, key, oracle)
    };
    for rot in [None, Some(17)] {
        let n = 5;
        let d = diag_with(n, 1.0, n - 1, 2.0);
        let del = gallery::deletion_family(n, 2.0, rot).map_err(|e| e.to_string())?;
        go(&del, "sr_a", sr_diag(&d))?;
        go(&del, "sr_a_hat", sr_diag(&d[..n - 1]))?;
        go(&del, "intdim_a", intdim_diag(&d))?;
        go(&del, "intdim_a_hat", intdim_diag(&d[..n - 1]))?;

        let sum = gallery::sum_violation_family(5, 4.0, rot).map_err(|e| e.to_string())?;
        let da = diag_with(5, 2.0, 0, 4.0);
        let db = diag_with(5, -1.0, 0, -4.0);
        let ds: Vec<f64> = da.iter().zip(&db).map(|(x, y)| x + y).collect();
        go(&sum, "sr_a", sr_diag(&da))?;
        go(&sum, "sr_b", sr_diag(&db))?;
        go(&sum, "sr_sum", sr_diag(&ds))?;
        ensure(sum.computed["sr_sum"] > sum.computed["sr_a"] + sum.computed["sr_b"], || {
            "sum violation not observed".into()
        })?;

        let r1 = gallery::rank1_drop_family(5, 3.0, rot).map_err(|e| e.to_string())?;
        let da = diag_with(5, 1.0, 0, 0.0);
        let ds = diag_with(5, 1.0, 0, 3.0);
        go(&r1, "intdim_a", intdim_diag(&da))?;
        go(&r1, "intdim_sum", intdim_diag(&ds))?;
        go(&r1, "rank_b", 1.0)?;

        let prod = gallery::product_violation_family(3, 2.0, rot).map_err(|e| e.to_string())?;
        let da = diag_with(3, 1.0, 2, 2.0);
        let db = diag_with(3, 1.0, 2, 0.5);
        go(&prod, "sr_a", sr_diag(&da))?;
        go(&prod, "sr_b", sr_diag(&db))?;
        go(&prod, "sr_ab", 3.0)?;
        go(&prod, "intdim_a", intdim_diag(&da))?;
        go(&prod, "intdim_b", intdim_diag(&db))?;
        go(&prod, "intdim_ab", 3.0)?;

        let cross = gallery::cross_gap_family(3, 0.5, rot).map_err(|e| e.to_string())?;
        let d = diag_with(3, 0.5, 0, 1.0);
        let d2: Vec<f64> = d.iter().map(|x| x * x).collect();
        go(&cross, "sr_a", sr_diag(&d))?;
        go(&cross, "sr_gram", sr_diag(&d2))?;
        go(&cross, "intdim_a", intdim_diag(&d))?;
        go(&cross, "intdim_gram", intdim_diag(&d2))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..20u64 {
        let n = rng.random_range(3..9);
        let r = rng.random_range(2..=n);
        let mut spectrum: Vec<f64> = (0..r).map(|_| rng.random_range(0.1..10.0)).collect();
        spectrum.sort_by(|x, y| y.total_cmp(x));
        let a = sample(&SampleSpec::prescribed_spectrum(n, n, spectrum, trial).with_field(ScalarField::Complex))
            .map_err(|e| e.to_string())?;
        let g = a.gram().hermitian_part().map_err(|e| e.to_string())?;
        let rt = 1e-10;
        let rf = r as f64;
        go(&gallery::maximizer_multiplier(&a, rt).map_err(|e| e.to_string())?, "sr_ab", rf)?;
        go(&gallery::minimizer_multiplier(&a, 0.1, rt).map_err(|e| e.to_string())?, "sr_ab", 1.0 + (rf - 1.0) * 0.01)?;
        go(&gallery::congruence_maximizer(&g, rt).map_err(|e| e.to_string())?, "intdim_bab", rf)?;
        go(&gallery::congruence_minimizer(&g, 0.25, rt).map_err(|e| e.to_string())?, "intdim_bab", 1.0 + (rf - 1.0) * 0.25)?;
    }
    Ok(format!("{checked} predicted values within 1e-10"))
}

fn geometric_decay() -> Result<String, String> {
    let g = gallery::geometric_decay(10, 0.5, None).map_err(|e| e.to_string())?;
    let sr = g.computed["sr_a"];
    let oracle = 4.0 / 3.0 * (1.0 - 4f64.powi(-10));
    ensure(sr <= 4.0 / 3.0, || format!("sr {sr} exceeds 4/3"))?;
    ensure((sr - oracle).abs() <= 1e-12, || format!("sr {sr} vs {oracle}"))?;
    ensure(g.notes.iter().any(|n| n.contains("typo")), || "missing discrepancy note".into())?;
    ensure(g.reference.contains_key("sr_printed_formula"), || "missing printed value".into())?;
    Ok(format!("sr = {sr:.15}, |err| = {:.1e}", (sr - oracle).abs()))
}

fn fuzz_clean() -> Result<String, String> {
    let config = FuzzConfig {
        trials: 10_000,
        seed: 42,
        ..FuzzConfig::default()
    };
    let start = Instant::now();
    let report = run_fuzz(&config).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(report.total_failures == 0, || {
        format!("{} failures, first: {:?}", report.total_failures, report.failures.first())
    })?;
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    let applicable: u64 = report.checks.values().map(|c| c.applicable_count).sum();
    Ok(format!("0 failures over {applicable} applicable reports in {secs:.2}s"))
}

fn equality_tightness() -> Result<String, String> {
    let tol = Tolerances::default();
    let finite: Vec<PExponent> = PExponent::default_grid()
        .into_iter()
        .filter(|p| matches!(p, PExponent::Finite(_)))
        .collect();
    let mut worst = 0.0f64;
    let mut track = |slack: f64, lhs: f64, what: &str| {
        let s = slack.abs() / lhs.abs().max(1.0);
        worst = worst.max(s);
        ensure(s <= 1e-10, || format!("{what}: slack {slack}"))
    };
    for seed in 0..10u64 {
        for n in [2usize, 5, 9] {
            let kinds = [
                EqualityKind::Rank1,
                EqualityKind::ScaledUnitary,
                EqualityKind::FlatSpectrum(1 + n / 2),
                EqualityKind::Projector(1 + n / 3),
            ];
            for kind in kinds {
                for &p in &finite {
                    let inst = gallery::equality_cases(kind, n, p, seed).map_err(|e| e.to_string())?;
                    let (pr, c) = (inst.predicted["sr_p"], inst.computed["sr_p"]);
                    track(c - pr, pr, &format!("{kind} n={n} p={p}"))?;
                    let a = &inst.matrices["A"];
                    let r = check_cross_product(a, p, &tol).map_err(|e| e.to_string())?;
                    ensure(r.outcome == Outcome::Holds, || format!("cross {kind}: {r:?}"))?;
                    track(r.slack, r.lhs, &format!("cross {kind} n={n} p={p}"))?;
                }
            }
            let u = haar_unitary(n, ScalarField::Complex, seed).scale(3.0);
            let b = sample(&SampleSpec::gaussian(n, n + 2, seed ^ 9).with_field(ScalarField::Complex))
                .map_err(|e| e.to_string())?;
            for &p in &finite {
                let r = check_product_kappa(&u, &b, p, &tol).map_err(|e| e.to_string())?;
                ensure(r.outcome == Outcome::Holds, || format!("product_kappa: {r:?}"))?;
                track(r.slack, r.lhs, &format!("product_kappa n={n} p={p}"))?;
            }
        }
    }
    Ok(format!("worst relative slack {worst:.1e}"))
}

fn identity_suite() -> Result<String, String> {
    let tol = Tolerances::default();
    let grid = PExponent::default_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for i in 0..1000u64 {
        let m = rng.random_range(1..13);
        let n = rng.random_range(1..13);
        let f = if rng.random_bool(0.5) { ScalarField::Complex } else { ScalarField::Real };
        let spec = match i % 4 {
            0 => SampleSpec::gaussian(m, n, i),
            1 => {
                let r = rng.random_range(1..=m.min(n));
                let mut s: Vec<f64> = (0..r).map(|_| 10f64.powf(rng.random_range(-3.0..3.0))).collect();
                s.sort_by(|x, y| y.total_cmp(x));
                SampleSpec::prescribed_spectrum(m, n, s, i)
            }
            2 => SampleSpec::psd_gram(m, n, i),
            _ => SampleSpec::orthogonal_projector(n, rng.random_range(1..=n), i),
        };
        let a = sample(&spec.with_field(f)).map_err(|e| e.to_string())?;
        let g = a.gram();
        let o = a.outer_gram();
        let psd = g.hermitian_part().map_err(|e| e.to_string())?;
        let root = psd_sqrt(&psd, &tol).map_err(|e| e.to_string())?;
        let v = |x: &Matrix, p: PExponent| p_stable_rank(x, p).map(|r| r.value).map_err(|e| e.to_string());
        for &p in &grid {
            let s2p = v(&a, p.doubled())?;
            for (what, got, want) in [
                ("gram", v(&g, p)?, s2p),
                ("outer", v(&o, p)?, s2p),
                ("root", v(&root, p.doubled())?, v(&psd, p)?),
            ] {
                let e = rel(got, want);
                worst = worst.max(e);
                ensure(e <= 1e-10, || format!("matrix {i} {what} p={p}: {got} vs {want}"))?;
            }
        }
        ensure(v(&a, PExponent::Infinity)? == 1.0, || format!("matrix {i}: sr_inf != 1"))?;
        let rank = numerical_rank(&a, 1e-10).map_err(|e| e.to_string())? as f64;
        ensure(v(&a, PExponent::Zero)? == rank, || format!("matrix {i}: sr_0 != rank"))?;
    }
    Ok(format!("1000 matrices, worst relative error {worst:.1e}"))
}

fn conditioning() -> Result<String, String> {
    let tol = Tolerances::default();
    let eps = [0.01, 0.05, 0.1, 0.3, 0.5];
    let grid: Vec<PExponent> = PExponent::default_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut rows = 0;
    for pair in 0..100u64 {
        let n = rng.random_range(2..11);
        let m = rng.random_range(2..11);
        let f = if rng.random_bool(0.5) { ScalarField::Complex } else { ScalarField::Real };
        let general = sample(&SampleSpec::gaussian(m, n, pair).with_field(f)).map_err(|e| e.to_string())?;
        let psd = sample(&SampleSpec::psd_gram(m, n, pair ^ 1).with_field(f)).map_err(|e| e.to_string())?;
        for (a, kind) in [(general, PerturbationKind::Gaussian), (psd, PerturbationKind::Psd)] {
            let d = perturbation_direction(&a, kind, pair ^ 2).map_err(|e| e.to_string())?;
            for &p in &grid {
                for row in condition_sweep(&a, &d, &eps, p, &tol).map_err(|e| e.to_string())? {
                    rows += 1;
                    ensure(row.outcome == Outcome::Holds, || format!("pair {pair} p={p}: {row:?}"))?;
                    if kind == PerturbationKind::Psd {
                        let (lo, hi) = (row.lower.unwrap(), row.upper.unwrap());
                        let (lp, hp) = (
                            row.lower_psd.ok_or("missing psd lower bound")?,
                            row.upper_psd.ok_or("missing psd upper bound")?,
                        );
                        let g = |x: f64, y: f64| 1e-12 * x.abs().max(y.abs()).max(1.0);
                        ensure(lp >= lo - g(lp, lo) && hp <= hi + g(hp, hi), || {
                            format!("pair {pair} p={p}: psd bounds looser: {row:?}")
                        })?;
                        let x = row.actual.unwrap();
                        ensure(lp - g(lp, x) <= x && x <= hp + g(hp, x), || {
                            format!("pair {pair} p={p}: psd bounds violated: {row:?}")
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!("{rows} rows hold, PSD bounds never looser"))
}

fn threshold_sharpness() -> Result<String, String> {
    let mut points = 0;
    for fam in ViolationFamily::ALL {
        for n in [5usize, 6, 8, 12] {
            for rot in [None, Some(3)] {
                for x in fam.sweep_grid(n, 1e-3, 10) {
                    let (met, hit) = fam.evaluate(n, x, rot).map_err(|e| e.to_string())?;
                    points += 1;
                    ensure(met == hit, || {
                        format!("{} n={n} param={x}: predicate {met}, observed {hit}", fam.name())
                    })?;
                    let expect = x > fam.boundary(n);
                    ensure(met == expect, || format!("{} n={n} param={x}: predicate {met}", fam.name()))?;
                }
            }
        }
    }
    Ok(format!("{points} sweep points agree with the threshold predicate"))
}

fn fuzz_json(parallelism: &str) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_srlab"))
        .args(["fuzz", "--trials", "1000", "--seed", "7", "--parallelism", parallelism])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("exit {:?}", out.status.code()))?;
    let mut v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    v.as_object_mut().ok_or("not an object")?.remove("wall_time_s");
    Ok(v)
}

fn determinism() -> Result<String, String> {
    let a = fuzz_json("1")?;
    let b = fuzz_json("8")?;
    ensure(a == b, || "reports differ between 1 and 8 threads".into())?;
    Ok("identical reports at 1 and 8 threads".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("formula reproduction", formula_reproduction),
        ("geometric decay", geometric_decay),
        ("fuzz 10000 trials", fuzz_clean),
        ("equality tightness", equality_tightness),
        ("identity suite", identity_suite),
        ("perturbation conditioning", conditioning),
        ("threshold sharpness", threshold_sharpness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(msg) => println!("PASS criterion {} ({name}): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
