use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use srlab::gallery::{self, EqualityKind, FamilyInstance};
use srlab::matcore::{sample, SampleKind, SampleSpec, ScalarField};
use srlab::ranks::{intrinsic_dimension, numerical_rank, p_stable_rank_with};
use srlab::theorems::CheckReport;
use srlab::{schatten_norm, Matrix, PExponent, Tolerances};

use crate::condition::{condition_sweep, perturbation_direction, PerturbationKind};
use crate::error::{CliError, CliResult};
use crate::fuzz::{resolve_parallelism, run_check, run_fuzz, CheckArgs, CheckName, FuzzConfig};
use crate::io::{read_matrix, write_matrix};
use crate::output::{csv_table, json, opt, Format, SCHEMA_VERSION};

#[derive(Debug, Parser)]
#[command(name = "srlab", version, about = "Stable ranks, intrinsic dimension and their inequalities")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Relative singular-value cut-off for numerical rank decisions.
    #[arg(long, global = true, default_value_t = srlab::ranks::DEFAULT_RTOL)]
    pub rtol: f64,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one quantity of a matrix file.
    Compute {
        input: PathBuf,
        #[arg(long, short, value_enum, default_value_t = Quantity::Sr)]
        quantity: Quantity,
        /// Exponent for `srp` and `schatten`.
        #[arg(long, short)]
        p: Option<PExponent>,
    },
    /// Run one theorem checker on matrix files.
    Verify {
        check: CheckName,
        inputs: Vec<PathBuf>,
        /// Single exponent; the default grid is used when omitted.
        #[arg(long, short)]
        p: Option<PExponent>,
        /// Split index for `block_intdim`.
        #[arg(long)]
        k: Option<usize>,
        /// Column to delete for `deletion`.
        #[arg(long)]
        col: Option<usize>,
    },
    /// Build an example family, report predicted vs computed values.
    Gallery(GalleryArgs),
    /// Perturbation bounds over a sweep of relative perturbation sizes.
    Condition {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = PerturbationKind::Gaussian)]
        perturbation: PerturbationKind,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1,0.3,0.5")]
        epsilons: Vec<f64>,
        #[arg(long, short, default_value = "2")]
        p: PExponent,
    },
    /// Seeded random search for theorem violations.
    Fuzz(FuzzArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Srp,
    Sr,
    Intdim,
    Rank,
    Schatten,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FamilyName {
    GeometricDecay,
    #[value(alias = "deletion_family")]
    Deletion,
    #[value(alias = "sum_violation_family")]
    SumViolation,
    #[value(alias = "rank1_drop_family")]
    Rank1Drop,
    #[value(alias = "product_violation_family")]
    ProductViolation,
    MaximizerMultiplier,
    MinimizerMultiplier,
    CongruenceMaximizer,
    CongruenceMinimizer,
    #[value(alias = "cross_gap_family")]
    CrossGap,
    EqualityCases,
}

#[derive(Debug, Args)]
pub struct GalleryArgs {
    pub family: FamilyName,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Rank of the sampled input for the multiplier and congruence families.
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long, short)]
    pub p: Option<PExponent>,
    /// `rank1`, `scaled_unitary`, `flat_spectrum(r)` or `projector(r)`.
    #[arg(long)]
    pub kind: Option<String>,
    /// Conjugate or rotate the family by seeded Haar unitaries.
    #[arg(long)]
    pub rotate: Option<u64>,
    /// Input matrix for the multiplier and congruence families.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Directory for the emitted matrices and instance JSON.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 20)]
    pub dims_max: usize,
    /// Comma-separated sample distributions (default: all).
    #[arg(long, value_delimiter = ',')]
    pub distributions: Vec<String>,
    /// Comma-separated exponents.
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,3,10,inf")]
    pub p_grid: Vec<PExponent>,
    /// Comma-separated checker names (default: all).
    #[arg(long, value_delimiter = ',')]
    pub checks: Vec<CheckName>,
    /// Worker threads; falls back to SRLAB_THREADS, then all cores.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Rendered output and process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, exit_code: 0 }
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let tol = Tolerances::default().with_rel_spectral(cli.rtol)?;
    match &cli.command {
        Command::Compute { input, quantity, p } => compute(cli, &tol, input, *quantity, *p),
        Command::Verify {
            check,
            inputs,
            p,
            k,
            col,
        } => verify(cli, &tol, *check, inputs, *p, CheckArgs { k: *k, col: *col }),
        Command::Gallery(args) => gallery_cmd(cli, args),
        Command::Condition {
            input,
            perturbation,
            epsilons,
            p,
        } => condition(cli, &tol, input, *perturbation, epsilons, *p),
        Command::Fuzz(args) => fuzz(cli, args),
    }
}

#[derive(Serialize)]
struct ComputeRecord<'a> {
    schema: u32,
    command: &'static str,
    input: &'a Path,
    quantity: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<PExponent>,
    value: f64,
}

fn compute(
    cli: &Cli,
    tol: &Tolerances,
    input: &Path,
    quantity: Quantity,
    p: Option<PExponent>,
) -> CliResult<Outcome> {
    let a = read_matrix(input)?;
    let two = PExponent::Finite(2.0);
    let (p, value) = match quantity {
        Quantity::Srp => {
            let p = p.unwrap_or(two);
            (Some(p), p_stable_rank_with(&a, p, cli.rtol)?.value)
        }
        Quantity::Sr => (None, p_stable_rank_with(&a, two, cli.rtol)?.value),
        Quantity::Intdim => (None, intrinsic_dimension(&a, tol)?.value),
        Quantity::Rank => (None, numerical_rank(&a, cli.rtol)? as f64),
        Quantity::Schatten => {
            let p = p.unwrap_or(two);
            (Some(p), schatten_norm(&a, p)?)
        }
    };
    let stdout = match cli.format {
        Format::Json => json(&ComputeRecord {
            schema: SCHEMA_VERSION,
            command: "compute",
            input,
            quantity,
            p,
            value,
        }),
        Format::Csv => csv_table(
            &["quantity", "p", "value"],
            [vec![
                quantity.to_possible_value().expect("named").get_name().to_string(),
                opt(p),
                value.to_string(),
            ]],
        ),
        Format::Text => format!("{value}\n"),
    };
    Ok(Outcome::ok(stdout))
}

#[derive(Serialize)]
struct VerifyRecord<'a> {
    schema: u32,
    command: &'static str,
    check: CheckName,
    holds: bool,
    reports: &'a [CheckReport],
}

fn report_rows(reports: &[CheckReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                opt(r.p),
                format!("{:?}", r.outcome).to_lowercase(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.slack.to_string(),
                r.reason.clone().unwrap_or_default(),
            ]
        })
        .collect()
}

const REPORT_HEADER: [&str; 7] = ["check", "p", "outcome", "lhs", "rhs", "slack", "reason"];

fn verify(
    cli: &Cli,
    tol: &Tolerances,
    check: CheckName,
    paths: &[PathBuf],
    p: Option<PExponent>,
    args: CheckArgs,
) -> CliResult<Outcome> {
    if paths.len() != check.arity() {
        return Err(CliError::InvalidParams(format!(
            "{check} takes {} input file(s), got {}",
            check.arity(),
            paths.len()
        )));
    }
    let inputs = paths.iter().map(|p| read_matrix(p)).collect::<CliResult<Vec<_>>>()?;
    let grid = p.map(|p| vec![p]).unwrap_or_else(PExponent::default_grid);
    let reports = run_check(check, &inputs, args, &grid, tol)?;
    let holds = !reports.iter().any(CheckReport::is_violation);
    let stdout = match cli.format {
        Format::Json => json(&VerifyRecord {
            schema: SCHEMA_VERSION,
            command: "verify",
            check,
            holds,
            reports: &reports,
        }),
        Format::Csv => csv_table(&REPORT_HEADER, report_rows(&reports)),
        Format::Text => report_rows(&reports)
            .into_iter()
            .map(|r| {
                let reason = if r[6].is_empty() { String::new() } else { format!(" ({})", r[6]) };
                format!("{} p={} {} lhs={} rhs={} slack={}{reason}\n", r[0], r[1], r[2], r[3], r[4], r[5])
            })
            .collect(),
    };
    Ok(Outcome {
        stdout,
        exit_code: if holds { 0 } else { 1 },
    })
}

fn sampled_input(n: usize, r: usize, seed: u64, psd: bool) -> CliResult<Matrix> {
    if r == 0 || r > n {
        return Err(CliError::InvalidParams(format!("r must lie in 1..={n}, got {r}")));
    }
    let spectrum: Vec<f64> = (0..r).map(|j| 1.0 / (1.0 + j as f64)).collect();
    let spec = SampleSpec::prescribed_spectrum(n, n, spectrum, seed).with_field(ScalarField::Complex);
    let x = sample(&spec)?;
    Ok(if psd { x.gram().hermitian_part()? } else { x })
}

fn build_family(cli: &Cli, a: &GalleryArgs) -> CliResult<FamilyInstance> {
    let rot = a.rotate;
    let alpha = |d: f64| a.alpha.unwrap_or(d);
    let n = |d: usize| a.n.unwrap_or(d);
    let input = |psd: bool| -> CliResult<Matrix> {
        match &a.input {
            Some(path) => read_matrix(path),
            None => sampled_input(n(6), a.r.unwrap_or(5), cli.seed, psd),
        }
    };
    let inst = match a.family {
        FamilyName::GeometricDecay => gallery::geometric_decay(n(10), a.ratio.unwrap_or(0.5), rot)?,
        FamilyName::Deletion => gallery::deletion_family(n(5), alpha(2.0), rot)?,
        FamilyName::SumViolation => gallery::sum_violation_family(n(5), alpha(4.0), rot)?,
        FamilyName::Rank1Drop => gallery::rank1_drop_family(n(5), a.beta.unwrap_or(3.0), rot)?,
        FamilyName::ProductViolation => gallery::product_violation_family(n(3), alpha(2.0), rot)?,
        FamilyName::CrossGap => gallery::cross_gap_family(n(3), alpha(0.5), rot)?,
        FamilyName::MaximizerMultiplier => gallery::maximizer_multiplier(&input(false)?, cli.rtol)?,
        FamilyName::MinimizerMultiplier => {
            gallery::minimizer_multiplier(&input(false)?, alpha(0.1), cli.rtol)?
        }
        FamilyName::CongruenceMaximizer => gallery::congruence_maximizer(&input(true)?, cli.rtol)?,
        FamilyName::CongruenceMinimizer => {
            gallery::congruence_minimizer(&input(true)?, alpha(0.25), cli.rtol)?
        }
        FamilyName::EqualityCases => {
            let kind: EqualityKind = a.kind.as_deref().unwrap_or("projector(3)").parse()?;
            let p = a.p.unwrap_or(PExponent::Finite(2.0));
            gallery::equality_cases(kind, n(6), p, cli.seed)?
        }
    };
    Ok(inst)
}

#[derive(Serialize)]
struct GalleryRecord<'a> {
    schema: u32,
    command: &'static str,
    #[serde(flatten)]
    instance: &'a FamilyInstance,
    max_relative_error: f64,
    files: Vec<PathBuf>,
}

fn gallery_cmd(cli: &Cli, args: &GalleryArgs) -> CliResult<Outcome> {
    let inst = build_family(cli, args)?;
    let mut files = Vec::new();
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        for (key, m) in &inst.matrices {
            let path = dir.join(format!("{}_{key}.mtx", inst.name));
            write_matrix(&path, m)?;
            files.push(path);
        }
    }
    let record = GalleryRecord {
        schema: SCHEMA_VERSION,
        command: "gallery",
        instance: &inst,
        max_relative_error: inst.max_relative_error(),
        files,
    };
    if let Some(dir) = &args.out_dir {
        let path = dir.join(format!("{}.json", inst.name));
        std::fs::write(&path, json(&record)).map_err(|source| CliError::Io { path, source })?;
    }
    let keys = inst.predicted.keys();
    let stdout = match cli.format {
        Format::Json => json(&record),
        Format::Csv => csv_table(
            &["family", "quantity", "predicted", "computed"],
            keys.map(|k| {
                vec![
                    inst.name.clone(),
                    k.clone(),
                    inst.predicted[k].to_string(),
                    inst.computed[k].to_string(),
                ]
            }),
        ),
        Format::Text => {
            let mut s = format!("{} threshold_met={}\n", inst.name, inst.threshold_met);
            for k in keys {
                let _ = writeln!(s, "  {k}: predicted {} computed {}", inst.predicted[k], inst.computed[k]);
            }
            for (k, v) in &inst.violations {
                let _ = writeln!(s, "  violation[{k}] = {v}");
            }
            for n in &inst.notes {
                let _ = writeln!(s, "  note: {n}");
            }
            s
        }
    };
    Ok(Outcome::ok(stdout))
}

#[derive(Serialize)]
struct ConditionRecord<'a> {
    schema: u32,
    command: &'static str,
    input: &'a Path,
    perturbation: PerturbationKind,
    p: PExponent,
    seed: u64,
    rows: &'a [crate::condition::ConditionRow],
}

fn condition(
    cli: &Cli,
    tol: &Tolerances,
    input: &Path,
    kind: PerturbationKind,
    epsilons: &[f64],
    p: PExponent,
) -> CliResult<Outcome> {
    let a = read_matrix(input)?;
    let d = perturbation_direction(&a, kind, cli.seed)?;
    let rows = condition_sweep(&a, &d, epsilons, p, tol)?;
    let violated = rows.iter().any(|r| r.outcome == srlab::Outcome::Violated);
    let cells = |r: &crate::condition::ConditionRow| {
        vec![
            r.epsilon.to_string(),
            format!("{:?}", r.outcome).to_lowercase(),
            opt(r.lower),
            opt(r.actual),
            opt(r.upper),
            opt(r.slack_lower),
            opt(r.slack_upper),
            opt(r.lower_psd),
            opt(r.upper_psd),
        ]
    };
    let header = [
        "epsilon", "outcome", "lower", "actual", "upper", "slack_lower", "slack_upper", "lower_psd", "upper_psd",
    ];
    let stdout = match cli.format {
        Format::Json => json(&ConditionRecord {
            schema: SCHEMA_VERSION,
            command: "condition",
            input,
            perturbation: kind,
            p,
            seed: cli.seed,
            rows: &rows,
        }),
        Format::Csv => csv_table(&header, rows.iter().map(cells)),
        Format::Text => rows
            .iter()
            .map(|r| cells(r).join("\t") + "\n")
            .fold(header.join("\t") + "\n", |acc, l| acc + &l),
    };
    Ok(Outcome {
        stdout,
        exit_code: if violated { 1 } else { 0 },
    })
}

fn fuzz(cli: &Cli, args: &FuzzArgs) -> CliResult<Outcome> {
    let distributions = if args.distributions.is_empty() {
        SampleKind::ALL.to_vec()
    } else {
        args.distributions
            .iter()
            .map(|d| d.parse::<SampleKind>())
            .collect::<srlab::Result<Vec<_>>>()?
    };
    let checks = if args.checks.is_empty() {
        CheckName::ALL.to_vec()
    } else {
        args.checks.clone()
    };
    let config = FuzzConfig {
        trials: args.trials,
        seed: cli.seed,
        dims_max: args.dims_max,
        distributions,
        p_grid: args.p_grid.clone(),
        checks,
        rtol: cli.rtol,
        parallelism: resolve_parallelism(args.parallelism),
    };
    let report = run_fuzz(&config)?;
    let body = json(&report);
    if let Some(path) = &args.output {
        std::fs::write(path, &body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    let header = [
        "check", "applicable", "passed", "not_applicable", "failures", "min_slack", "argmin_instance_seed",
    ];
    let rows = report.checks.iter().map(|(c, a)| {
        vec![
            c.to_string(),
            a.applicable_count.to_string(),
            a.pass_count.to_string(),
            a.not_applicable_count.to_string(),
            a.failure_count.to_string(),
            opt(a.min_slack),
            opt(a.argmin_instance_seed),
        ]
    });
    let stdout = match cli.format {
        Format::Json => body,
        Format::Csv => csv_table(&header, rows),
        Format::Text => {
            let mut s = String::new();
            for (c, a) in &report.checks {
                let slack = a.min_slack.map_or("-".to_string(), |v| format!("{v:.3e}"));
                let _ = writeln!(
                    s,
                    "{:<24} {:>8} applicable {:>8} passed {:>6} failed  min slack {slack}",
                    c.to_string(),
                    a.applicable_count,
                    a.pass_count,
                    a.failure_count,
                );
            }
            let _ = writeln!(
                s,
                "{} trials, {} failures, {:.2} s",
                config.trials, report.total_failures, report.wall_time_s
            );
            s
        }
    };
    Ok(Outcome {
        stdout,
        exit_code: if report.passed() { 0 } else { 1 },
    })
}
