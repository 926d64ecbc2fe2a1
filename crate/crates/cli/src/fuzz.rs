//! Seeded fuzz harness over the theorem checkers.
//!
//! Trial `i` gets the seed `splitmix64(seed + (i + 1) * GAMMA)`, and each
//! checker inside a trial gets `splitmix64(trial_seed ^ tag)`. Every input
//! matrix is drawn from that instance seed alone, so a failure is
//! reproducible from `(check, instance_seed, config)` and results do not
//! depend on scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use srlab::matcore::{haar_unitary, sample, SampleKind, SampleSpec};
use srlab::theorems::*;
use srlab::{Matrix, PExponent, ScalarField, Tolerances};

use crate::error::{CliError, CliResult};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    splitmix64(seed.wrapping_add(trial.wrapping_add(1).wrapping_mul(GAMMA)))
}

pub fn instance_seed(trial_seed: u64, check: CheckName) -> u64 {
    splitmix64(trial_seed ^ check.tag())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Weyl,
    IntdimSubadditive,
    SumSubadditivityProot,
    Rank1Addition,
    ProductKappa,
    CrossProduct,
    Perturbation,
    BlockDiagSr,
    BlockIntdim,
    Deletion,
    CholeskyIntdim,
}

impl CheckName {
    pub const ALL: [CheckName; 11] = [
        CheckName::Weyl,
        CheckName::IntdimSubadditive,
        CheckName::SumSubadditivityProot,
        CheckName::Rank1Addition,
        CheckName::ProductKappa,
        CheckName::CrossProduct,
        CheckName::Perturbation,
        CheckName::BlockDiagSr,
        CheckName::BlockIntdim,
        CheckName::Deletion,
        CheckName::CholeskyIntdim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckName::Weyl => "weyl",
            CheckName::IntdimSubadditive => "intdim_subadditive",
            CheckName::SumSubadditivityProot => "sum_subadditivity_proot",
            CheckName::Rank1Addition => "rank1_addition",
            CheckName::ProductKappa => "product_kappa",
            CheckName::CrossProduct => "cross_product",
            CheckName::Perturbation => "perturbation",
            CheckName::BlockDiagSr => "block_diag_sr",
            CheckName::BlockIntdim => "block_intdim",
            CheckName::Deletion => "deletion",
            CheckName::CholeskyIntdim => "cholesky_intdim",
        }
    }

    /// Number of input matrices the checker takes.
    pub fn arity(self) -> usize {
        match self {
            CheckName::CrossProduct
            | CheckName::BlockIntdim
            | CheckName::Deletion
            | CheckName::CholeskyIntdim => 1,
            _ => 2,
        }
    }

    /// Whether the checker is evaluated once per exponent of the grid.
    pub fn uses_p(self) -> bool {
        matches!(
            self,
            CheckName::SumSubadditivityProot
                | CheckName::Rank1Addition
                | CheckName::ProductKappa
                | CheckName::CrossProduct
                | CheckName::Perturbation
        )
    }

    fn tag(self) -> u64 {
        (self as u64 + 1).wrapping_mul(0x632b_e59b_d9b4_e019)
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim().trim_start_matches("check_");
        CheckName::ALL
            .into_iter()
            .find(|c| c.name() == t)
            .ok_or_else(|| format!("unknown check `{s}`"))
    }
}

/// Extra integer argument for the checks that need one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckArgs {
    /// Split point for `block_intdim`.
    pub k: Option<usize>,
    /// Column for `deletion`.
    pub col: Option<usize>,
}

/// Run one checker on explicit inputs over a p grid. Checks without an
/// exponent produce a single report.
pub fn run_check(
    check: CheckName,
    inputs: &[Matrix],
    args: CheckArgs,
    grid: &[PExponent],
    tol: &Tolerances,
) -> srlab::Result<Vec<CheckReport>> {
    let a = &inputs[0];
    let b = || &inputs[1];
    Ok(match check {
        CheckName::Weyl => vec![check_weyl(a, b(), tol)?],
        CheckName::IntdimSubadditive => vec![check_intdim_subadditive(a, b(), tol)?],
        CheckName::SumSubadditivityProot => check_sum_subadditivity_proot_grid(a, b(), grid, tol)?,
        CheckName::Rank1Addition => check_rank1_addition_grid(a, b(), grid, tol)?,
        CheckName::ProductKappa => check_product_kappa_grid(a, b(), grid, tol)?,
        CheckName::CrossProduct => check_cross_product_grid(a, grid, tol)?,
        CheckName::Perturbation => check_perturbation_grid(a, b(), grid, tol)?,
        CheckName::BlockDiagSr => vec![check_block_diag_sr(a, b(), tol)?],
        CheckName::BlockIntdim => {
            let k = args.k.unwrap_or(a.rows() / 2);
            vec![check_block_intdim(a, k, tol)?]
        }
        CheckName::Deletion => {
            let col = args.col.unwrap_or(a.cols().saturating_sub(1));
            vec![check_deletion(a, col, tol)?]
        }
        CheckName::CholeskyIntdim => vec![check_cholesky_intdim(a, tol)?],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub trials: u64,
    pub seed: u64,
    pub dims_max: usize,
    pub distributions: Vec<SampleKind>,
    pub p_grid: Vec<PExponent>,
    pub checks: Vec<CheckName>,
    pub rtol: f64,
    /// Worker threads, 0 for automatic. Not echoed: the report must not
    /// depend on it.
    #[serde(skip)]
    pub parallelism: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            dims_max: 20,
            distributions: SampleKind::ALL.to_vec(),
            p_grid: PExponent::default_grid(),
            checks: CheckName::ALL.to_vec(),
            rtol: srlab::ranks::DEFAULT_RTOL,
            parallelism: 0,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: &str| Err(CliError::InvalidParams(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.dims_max == 0 {
            return bad("dims_max must be at least 1");
        }
        if self.p_grid.is_empty() {
            return bad("p_grid must not be empty");
        }
        if self.distributions.is_empty() {
            return bad("at least one distribution is required");
        }
        if self.checks.is_empty() {
            return bad("at least one check is required");
        }
        self.tolerances().map(|_| ())
    }

    pub fn tolerances(&self) -> CliResult<Tolerances> {
        Ok(Tolerances::default().with_rel_spectral(self.rtol)?)
    }
}

/// Draws the inputs of one instance from its seed.
struct Gen {
    rng: ChaCha8Rng,
    kind: SampleKind,
    field: ScalarField,
    dims_max: usize,
}

impl Gen {
    fn new(seed: u64, config: &FuzzConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = config.distributions[rng.random_range(0..config.distributions.len())];
        let field = if rng.random::<bool>() {
            ScalarField::Complex
        } else {
            ScalarField::Real
        };
        Gen {
            rng,
            kind,
            field,
            dims_max: config.dims_max,
        }
    }

    fn seed(&mut self) -> u64 {
        self.rng.random()
    }

    fn dim(&mut self) -> usize {
        self.rng.random_range(1..=self.dims_max)
    }

    fn scale(&mut self) -> f64 {
        10f64.powf(self.rng.random_range(-3.0..3.0))
    }

    fn draw(&mut self, spec: SampleSpec) -> Matrix {
        let scale = self.scale();
        sample(&spec.with_field(self.field))
            .expect("generator specs are valid")
            .scale(scale)
    }

    /// Descending spectrum of length `1..=k`; flat a quarter of the time.
    fn spectrum(&mut self, k: usize, full: bool) -> Vec<f64> {
        let r = if full { k } else { self.rng.random_range(1..=k) };
        if self.rng.random_range(0..4) == 0 {
            return vec![1.0; r];
        }
        let mut s: Vec<f64> = (0..r).map(|_| self.rng.random_range(0.01..1.0)).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    fn projector_rank(&mut self, n: usize) -> usize {
        self.rng.random_range(1..=n)
    }

    /// Matrix with `m` rows; square kinds ignore `n`.
    fn general(&mut self, m: usize, n: usize) -> Matrix {
        let seed = self.seed();
        let spec = match self.kind {
            SampleKind::Gaussian => SampleSpec::gaussian(m, n, seed),
            SampleKind::PrescribedSpectrum => {
                let s = self.spectrum(m.min(n), false);
                SampleSpec::prescribed_spectrum(m, n, s, seed)
            }
            SampleKind::PsdGram => {
                let k = self.dim();
                SampleSpec::psd_gram(k, m, seed)
            }
            SampleKind::Rank1Psd => SampleSpec::rank1_psd(m, seed),
            SampleKind::OrthogonalProjector => {
                let r = self.projector_rank(m);
                SampleSpec::orthogonal_projector(m, r, seed)
            }
        };
        self.draw(spec)
    }

    fn psd(&mut self, n: usize) -> Matrix {
        let seed = self.seed();
        match self.kind {
            SampleKind::Gaussian | SampleKind::PsdGram => {
                let k = self.dim();
                self.draw(SampleSpec::psd_gram(k, n, seed))
            }
            SampleKind::PrescribedSpectrum => {
                let s = self.spectrum(n, false);
                let x = self.draw(SampleSpec::prescribed_spectrum(n, n, s, seed));
                x.gram().hermitian_part().expect("square")
            }
            SampleKind::Rank1Psd => self.draw(SampleSpec::rank1_psd(n, seed)),
            SampleKind::OrthogonalProjector => {
                let r = self.projector_rank(n);
                self.draw(SampleSpec::orthogonal_projector(n, r, seed))
            }
        }
    }

    /// Square and full rank; the rank-deficient kinds map to scaled unitaries.
    fn nonsingular(&mut self, n: usize) -> Matrix {
        let seed = self.seed();
        match self.kind {
            SampleKind::Gaussian => self.draw(SampleSpec::gaussian(n, n, seed)),
            SampleKind::PrescribedSpectrum => {
                let s = self.spectrum(n, true);
                self.draw(SampleSpec::prescribed_spectrum(n, n, s, seed))
            }
            SampleKind::PsdGram => {
                let k = n + self.dim();
                self.draw(SampleSpec::psd_gram(k, n, seed))
            }
            SampleKind::Rank1Psd | SampleKind::OrthogonalProjector => {
                let scale = self.scale();
                haar_unitary(n, self.field, seed).scale(scale)
            }
        }
    }

    fn is_psd_kind(&self) -> bool {
        matches!(
            self.kind,
            SampleKind::PsdGram | SampleKind::Rank1Psd | SampleKind::OrthogonalProjector
        )
    }

    fn rescale_to(&mut self, e: Matrix, a: &Matrix) -> Matrix {
        let eps = self.rng.random_range(0.0..0.99);
        let ne = e.two_norm().expect("finite");
        if ne == 0.0 {
            e
        } else {
            e.scale(eps * a.two_norm().expect("finite") / ne)
        }
    }
}

/// Inputs of one fuzz instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub kind: SampleKind,
    pub field: ScalarField,
    pub inputs: Vec<Matrix>,
    pub args: CheckArgs,
}

pub fn generate_instance(check: CheckName, seed: u64, config: &FuzzConfig) -> Instance {
    let mut g = Gen::new(seed, config);
    let mut args = CheckArgs::default();
    let inputs = match check {
        CheckName::Weyl | CheckName::IntdimSubadditive | CheckName::SumSubadditivityProot => {
            let n = g.dim();
            vec![g.psd(n), g.psd(n)]
        }
        CheckName::Rank1Addition => {
            let n = g.dim();
            let s = g.seed();
            let b = g.draw(SampleSpec::rank1_psd(n, s));
            vec![g.psd(n), b]
        }
        CheckName::ProductKappa => {
            let (n, k) = (g.dim(), g.dim());
            vec![g.nonsingular(n), g.general(n, k)]
        }
        CheckName::CrossProduct => {
            let (m, n) = (g.dim(), g.dim());
            vec![g.general(m, n)]
        }
        CheckName::Perturbation => {
            if g.is_psd_kind() {
                let n = g.dim();
                let a = g.psd(n);
                let e = g.psd(n);
                let e = g.rescale_to(e, &a);
                vec![a, e]
            } else {
                let (m, n) = (g.dim(), g.dim());
                let a = g.general(m, n);
                let (r, c) = a.shape();
                let s = g.seed();
                let e = g.draw(SampleSpec::gaussian(r, c, s));
                let e = g.rescale_to(e, &a);
                vec![a, e]
            }
        }
        CheckName::BlockDiagSr => {
            let (m1, n1, m2, n2) = (g.dim(), g.dim(), g.dim(), g.dim());
            vec![g.general(m1, n1), g.general(m2, n2)]
        }
        CheckName::BlockIntdim => {
            let n = g.dim().max(2);
            args.k = Some(g.rng.random_range(1..n));
            vec![g.psd(n)]
        }
        CheckName::Deletion => {
            let (m, n) = (g.dim().max(2), g.dim().max(2));
            let a = g.general(m, n);
            args.col = Some(g.rng.random_range(0..a.cols()));
            vec![a]
        }
        CheckName::CholeskyIntdim => {
            let n = g.dim();
            vec![g.psd(n)]
        }
    };
    Instance {
        kind: g.kind,
        field: g.field,
        inputs,
        args,
    }
}

/// Regenerate and re-check one instance.
pub fn replay_instance(
    check: CheckName,
    instance_seed: u64,
    config: &FuzzConfig,
) -> srlab::Result<Vec<CheckReport>> {
    let inst = generate_instance(check, instance_seed, config);
    let tol = Tolerances::default().with_rel_spectral(config.rtol)?;
    run_check(check, &inst.inputs, inst.args, &config.p_grid, &tol)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckAggregate {
    pub applicable_count: u64,
    pub pass_count: u64,
    pub not_applicable_count: u64,
    pub failure_count: u64,
    pub min_slack: Option<f64>,
    pub argmin_instance_seed: Option<u64>,
}

impl CheckAggregate {
    fn absorb(&mut self, other: &CheckAggregate) {
        self.applicable_count += other.applicable_count;
        self.pass_count += other.pass_count;
        self.not_applicable_count += other.not_applicable_count;
        self.failure_count += other.failure_count;
        if let Some(s) = other.min_slack {
            if self.min_slack.is_none_or(|m| s < m) {
                self.min_slack = Some(s);
                self.argmin_instance_seed = other.argmin_instance_seed;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub check: CheckName,
    pub trial: u64,
    pub trial_seed: u64,
    pub instance_seed: u64,
    pub distribution: SampleKind,
    pub field: ScalarField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<CheckReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub config: FuzzConfig,
    pub checks: BTreeMap<CheckName, CheckAggregate>,
    pub total_failures: u64,
    pub failures: Vec<Failure>,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.total_failures == 0
    }
}

struct TrialSummary {
    per_check: Vec<(CheckName, CheckAggregate)>,
    failures: Vec<Failure>,
}

fn run_trial(trial: u64, config: &FuzzConfig, tol: &Tolerances) -> TrialSummary {
    let ts = trial_seed(config.seed, trial);
    let mut per_check = Vec::with_capacity(config.checks.len());
    let mut failures = Vec::new();
    for &check in &config.checks {
        let seed = instance_seed(ts, check);
        let inst = generate_instance(check, seed, config);
        let mut agg = CheckAggregate::default();
        let failure = |report: Option<CheckReport>, error: Option<String>| Failure {
            check,
            trial,
            trial_seed: ts,
            instance_seed: seed,
            distribution: inst.kind,
            field: inst.field,
            report,
            error,
        };
        match run_check(check, &inst.inputs, inst.args, &config.p_grid, tol) {
            Ok(reports) => {
                for r in reports {
                    if !r.preconditions_met {
                        agg.not_applicable_count += 1;
                        continue;
                    }
                    agg.applicable_count += 1;
                    if agg.min_slack.is_none_or(|m| r.slack < m) {
                        agg.min_slack = Some(r.slack);
                        agg.argmin_instance_seed = Some(seed);
                    }
                    if r.holds() {
                        agg.pass_count += 1;
                    } else {
                        agg.failure_count += 1;
                        failures.push(failure(Some(r), None));
                    }
                }
            }
            Err(e) => {
                agg.failure_count += 1;
                failures.push(failure(None, Some(e.to_string())));
            }
        }
        per_check.push((check, agg));
    }
    TrialSummary {
        per_check,
        failures,
    }
}

/// Thread count: explicit value, else `SRLAB_THREADS`, else automatic.
pub fn resolve_parallelism(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var("SRLAB_THREADS").ok()?.parse().ok())
        .unwrap_or(0)
}

pub fn run_fuzz(config: &FuzzConfig) -> CliResult<RunReport> {
    config.validate()?;
    let tol = config.tolerances()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| CliError::InvalidParams(format!("cannot start worker pool: {e}")))?;
    let start = Instant::now();
    let summaries: Vec<TrialSummary> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(t, config, &tol))
            .collect()
    });
    let mut checks: BTreeMap<CheckName, CheckAggregate> = config
        .checks
        .iter()
        .map(|&c| (c, CheckAggregate::default()))
        .collect();
    let mut failures = Vec::new();
    for s in summaries {
        for (c, agg) in &s.per_check {
            checks.get_mut(c).expect("configured check").absorb(agg);
        }
        failures.extend(s.failures);
    }
    Ok(RunReport {
        schema: crate::output::SCHEMA_VERSION,
        command: "fuzz".into(),
        config: config.clone(),
        checks,
        total_failures: failures.len() as u64,
        failures,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
