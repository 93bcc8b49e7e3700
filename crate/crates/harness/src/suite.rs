//! Plans, the suite runner and suite reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use qprob_core::classical::{classical_corollary_check_on, Corollary, CorollaryReport};
use qprob_core::maximal::{
    levy_skorohod_verify, levy_verify, lp_symmetrization_verify, ottaviani_verify, strong_symmetrization_verify,
    weak_symmetrization_verify, SumSequence, VerifierConfig,
};
use qprob_core::measure::{chebyshev_check, median_property_check, MedianReport, TraceDistribution};
use qprob_core::report::InequalityReport;
use qprob_core::serde_ext::ext_real;
use qprob_core::{Error, HermitianOperator};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SuiteConfig;
use crate::generate::{generate, rng_from, GeneratorKind, GeneratorSpec};
use crate::instance::Instance;
use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifierKind {
    Levy,
    Ottaviani,
    LevySkorohod,
    SymmetrizeStrong,
    SymmetrizeWeak,
    SymmetrizeLp,
    Chebyshev,
    Median,
    ClassicalLevy,
    ClassicalLevyAbs,
    ClassicalLevySkorohod,
    ClassicalStrong,
}

impl VerifierKind {
    pub const ALL: [Self; 12] = [
        Self::Levy,
        Self::Ottaviani,
        Self::LevySkorohod,
        Self::SymmetrizeStrong,
        Self::SymmetrizeWeak,
        Self::SymmetrizeLp,
        Self::Chebyshev,
        Self::Median,
        Self::ClassicalLevy,
        Self::ClassicalLevyAbs,
        Self::ClassicalLevySkorohod,
        Self::ClassicalStrong,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Levy => "levy",
            Self::Ottaviani => "ottaviani",
            Self::LevySkorohod => "levy-skorohod",
            Self::SymmetrizeStrong => "symmetrize-strong",
            Self::SymmetrizeWeak => "symmetrize-weak",
            Self::SymmetrizeLp => "symmetrize-lp",
            Self::Chebyshev => "chebyshev",
            Self::Median => "median",
            Self::ClassicalLevy => "classical-levy",
            Self::ClassicalLevyAbs => "classical-levy-abs",
            Self::ClassicalLevySkorohod => "classical-levy-skorohod",
            Self::ClassicalStrong => "classical-strong",
        }
    }

    fn corollary(self) -> Option<Corollary> {
        match self {
            Self::ClassicalLevy => Some(Corollary::Levy),
            Self::ClassicalLevyAbs => Some(Corollary::LevyAbs),
            Self::ClassicalLevySkorohod => Some(Corollary::LevySkorohod),
            Self::ClassicalStrong => Some(Corollary::StrongSymmetrization),
            _ => None,
        }
    }

    fn uses_alpha(self) -> bool {
        matches!(self, Self::LevySkorohod | Self::SymmetrizeWeak | Self::SymmetrizeLp | Self::ClassicalLevySkorohod)
    }

    fn uses_exponent(self) -> bool {
        matches!(self, Self::SymmetrizeLp | Self::Chebyshev | Self::Median)
    }

    fn uses_lambda(self) -> bool {
        !matches!(self, Self::SymmetrizeLp | Self::Median)
    }

    fn default_alphas(self) -> Vec<f64> {
        match self {
            Self::LevySkorohod | Self::ClassicalLevySkorohod => vec![0.25, 0.5, 0.75],
            Self::SymmetrizeWeak => vec![0.0, 1.0],
            Self::SymmetrizeLp => vec![0.0],
            _ => Vec::new(),
        }
    }
}

impl std::fmt::Display for VerifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for VerifierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown verifier `{s}`"))
    }
}

/// Parameter grid of one plan item. Absent lists fall back to the sweep
/// policy: thresholds from the spectrum of `|s_n|`, verifier-specific
/// `alpha` values, and exponents `1, 2, 4`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanItem {
    pub id: String,
    pub generator: GeneratorSpec,
    pub verifiers: Vec<VerifierKind>,
    #[serde(default)]
    pub params: PlanParams,
}

pub const DEFAULT_EXPONENTS: [f64; 3] = [1.0, 2.0, 4.0];
const QUANTILES: [f64; 3] = [0.25, 0.5, 0.75];
const FAMILY_SHIFT: f64 = 1.0;

/// Quantiles `0.25, 0.5, 0.75` of the spectral distribution of `|s_n|` and
/// one threshold above its spectrum; nonpositive values are dropped.
pub fn lambda_sweep(members: &[HermitianOperator]) -> Result<Vec<f64>, HarnessError> {
    let first = members.first().ok_or(Error::EmptyFamily)?;
    let total = members[1..].iter().try_fold(first.clone(), |acc, x| acc.try_add(x))?;
    let res = total.resolution()?.absolute();
    let dist = TraceDistribution::from_resolution(&res);
    let mut out: Vec<f64> = Vec::with_capacity(4);
    for q in QUANTILES {
        let mut cum = 0.0;
        for a in dist.atoms() {
            cum += a.weight;
            if cum >= q - 1e-12 {
                out.push(a.value);
                break;
            }
        }
    }
    out.push(res.norm() + 1.0);
    out.retain(|l| *l > 0.0);
    out.dedup();
    Ok(out)
}

/// Chebyshev thresholds: a quarter, a half and all of the operator norm of
/// `s_n`. Empty for the zero operator.
pub fn chebyshev_thresholds(norm: f64) -> Vec<f64> {
    if norm > 0.0 {
        vec![0.25 * norm, 0.5 * norm, norm]
    } else {
        Vec::new()
    }
}

/// The default plan: tensor-symmetric families for the six theorem
/// verifiers, diagonal classical instances for the corollaries, and random
/// Hermitian matrices for the Chebyshev and median checks.
pub fn default_plan(cfg: &SuiteConfig) -> Vec<PlanItem> {
    let mut rng = rng_from(cfg.seed);
    let mut plan = Vec::new();
    let family_dims = |rng: &mut rand_chacha::ChaCha8Rng| {
        let n = rng.random_range(1..=cfg.max_vars);
        (0..n).map(|_| rng.random_range(2..=cfg.max_factor_dim)).collect::<Vec<usize>>()
    };
    for i in 0..cfg.family_instances {
        let dims = family_dims(&mut rng);
        plan.push(PlanItem {
            id: format!("family-{i:04}"),
            generator: GeneratorSpec::new(GeneratorKind::TensorSymmetricFamily, dims, rng.random()),
            verifiers: vec![VerifierKind::Levy, VerifierKind::Ottaviani, VerifierKind::LevySkorohod],
            params: PlanParams::default(),
        });
        let dims = family_dims(&mut rng);
        let mut generator = GeneratorSpec::new(GeneratorKind::TensorSymmetricFamily, dims, rng.random());
        generator.shift = Some(FAMILY_SHIFT);
        plan.push(PlanItem {
            id: format!("shifted-{i:04}"),
            generator,
            verifiers: vec![VerifierKind::SymmetrizeStrong, VerifierKind::SymmetrizeWeak, VerifierKind::SymmetrizeLp],
            params: PlanParams::default(),
        });
    }
    for i in 0..cfg.classical_instances {
        for symmetric in [true, false] {
            let mut generator = GeneratorSpec::new(GeneratorKind::DiagonalClassical, Vec::new(), rng.random());
            generator.n_vars = rng.random_range(1..=cfg.max_vars + 1);
            generator.symmetric = symmetric;
            let (id, verifiers) = if symmetric {
                (format!("classical-sym-{i:04}"), vec![VerifierKind::ClassicalLevy, VerifierKind::ClassicalLevyAbs])
            } else {
                (format!("classical-gen-{i:04}"), vec![VerifierKind::ClassicalLevySkorohod, VerifierKind::ClassicalStrong])
            };
            plan.push(PlanItem { id, generator, verifiers, params: PlanParams::default() });
        }
    }
    for i in 0..cfg.hermitian_instances {
        let d = rng.random_range(1..=cfg.max_hermitian_dim);
        plan.push(PlanItem {
            id: format!("hermitian-{i:04}"),
            generator: GeneratorSpec::new(GeneratorKind::RandomHermitian, vec![d], rng.random()),
            verifiers: vec![VerifierKind::Chebyshev, VerifierKind::Median],
            params: PlanParams::default(),
        });
    }
    plan
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Vacuous,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    /// `hypothesis` or `input`.
    pub category: String,
    pub message: String,
}

impl ErrorInfo {
    pub fn from_error(e: &HarnessError) -> Self {
        let category = match e {
            HarnessError::Core(Error::HypothesisFailed { .. } | Error::NotSymmetric { .. }) => "hypothesis",
            _ => "input",
        };
        Self { category: category.into(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Inequality(InequalityReport),
    Median(MedianReport),
    Corollary(CorollaryReport),
    Error(ErrorInfo),
}

impl Outcome {
    pub fn status(&self) -> Status {
        match self {
            Self::Inequality(r) => inequality_status(r),
            Self::Median(m) => {
                if m.all_pass {
                    Status::Pass
                } else {
                    Status::Fail
                }
            }
            Self::Corollary(c) => {
                if !c.holds {
                    Status::Fail
                } else if c.classical_vacuous {
                    Status::Vacuous
                } else {
                    Status::Pass
                }
            }
            Self::Error(_) => Status::Error,
        }
    }

    /// Smallest slack of the checked inequalities, `None` for errors.
    pub fn slack(&self) -> Option<f64> {
        match self {
            Self::Inequality(r) => Some(r.slack),
            Self::Median(m) => Some(m.tail_bound_slack.min(m.lp_bound_slack).min(m.variance_bound_slack)),
            Self::Corollary(c) => Some(c.noncommutative.slack),
            Self::Error(_) => None,
        }
    }

    pub fn inequality(&self) -> Option<&InequalityReport> {
        match self {
            Self::Inequality(r) => Some(r),
            Self::Corollary(c) => Some(&c.noncommutative),
            _ => None,
        }
    }
}

fn inequality_status(r: &InequalityReport) -> Status {
    if !r.holds || !r.invariants_ok() {
        Status::Fail
    } else if r.vacuous {
        Status::Vacuous
    } else {
        Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub verifier: VerifierKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    pub status: Status,
    pub outcome: Outcome,
}

/// One verifier call on the members of an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Call {
    pub verifier: VerifierKind,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub exponent: Option<f64>,
}

fn total_of(seq: &SumSequence) -> &HermitianOperator {
    seq.total()
}

fn need(v: Option<f64>, what: &str) -> Result<f64, HarnessError> {
    v.ok_or_else(|| HarnessError::Input(format!("missing {what}")))
}

/// Runs one verifier. Single-variable verifiers act on `s_n`; the classical
/// corollaries need a classical instance.
pub fn run_call(instance: &Instance, seq: &SumSequence, call: &Call, cfg: &VerifierConfig) -> Outcome {
    match try_call(instance, seq, call, cfg) {
        Ok(o) => o,
        Err(e) => Outcome::Error(ErrorInfo::from_error(&e)),
    }
}

fn try_call(instance: &Instance, seq: &SumSequence, call: &Call, cfg: &VerifierConfig) -> Result<Outcome, HarnessError> {
    let tol = &cfg.tolerances;
    let lambda = || need(call.lambda, "--lambda");
    let alpha = || need(call.alpha, "--alpha");
    let exponent = || need(call.exponent, "--p");
    let report = match call.verifier {
        VerifierKind::Levy => levy_verify(seq, lambda()?, cfg)?,
        VerifierKind::Ottaviani => ottaviani_verify(seq, lambda()?, cfg)?,
        VerifierKind::LevySkorohod => levy_skorohod_verify(seq, lambda()?, alpha()?, cfg)?,
        VerifierKind::SymmetrizeStrong => strong_symmetrization_verify(seq.xs(), lambda()?, cfg)?,
        VerifierKind::SymmetrizeWeak => weak_symmetrization_verify(total_of(seq), lambda()?, alpha()?, cfg)?,
        VerifierKind::SymmetrizeLp => lp_symmetrization_verify(total_of(seq), alpha()?, exponent()?, cfg)?,
        VerifierKind::Chebyshev => chebyshev_check(total_of(seq), lambda()?, exponent()?, tol)?,
        VerifierKind::Median => return Ok(Outcome::Median(median_property_check(total_of(seq), exponent()?, tol)?)),
        kind => {
            let corollary = kind.corollary().expect("remaining kinds are corollaries");
            let inst = instance
                .as_classical()
                .ok_or_else(|| HarnessError::Input(format!("{kind} needs a classical instance")))?;
            let alpha = if kind == VerifierKind::ClassicalLevySkorohod { Some(alpha()?) } else { None };
            return Ok(Outcome::Corollary(classical_corollary_check_on(inst, seq, corollary, lambda()?, alpha, cfg)?));
        }
    };
    Ok(Outcome::Inequality(report))
}

fn expand(kind: VerifierKind, params: &PlanParams, sweep: &[f64], norm: f64) -> Vec<Call> {
    let default_lambdas = || if kind == VerifierKind::Chebyshev { chebyshev_thresholds(norm) } else { sweep.to_vec() };
    let lambdas: Vec<Option<f64>> =
        if kind.uses_lambda() { params.lambdas.clone().unwrap_or_else(default_lambdas).into_iter().map(Some).collect() } else { vec![None] };
    let alphas: Vec<Option<f64>> =
        if kind.uses_alpha() { params.alphas.clone().unwrap_or_else(|| kind.default_alphas()).into_iter().map(Some).collect() } else { vec![None] };
    let exponents: Vec<Option<f64>> = if kind.uses_exponent() {
        params.exponents.clone().unwrap_or_else(|| DEFAULT_EXPONENTS.to_vec()).into_iter().map(Some).collect()
    } else {
        vec![None]
    };
    let mut calls = Vec::new();
    for &lambda in &lambdas {
        for &alpha in &alphas {
            for &exponent in &exponents {
                calls.push(Call { verifier: kind, lambda, alpha, exponent });
            }
        }
    }
    calls
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub id: String,
    pub generator: GeneratorSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub records: Vec<RunRecord>,
}

impl InstanceResult {
    fn failed_setup(item: &PlanItem, e: &HarnessError) -> Self {
        Self { id: item.id.clone(), generator: item.generator.clone(), error: Some(ErrorInfo::from_error(e)), records: Vec::new() }
    }
}

pub fn verifier_config(cfg: &SuiteConfig) -> VerifierConfig {
    VerifierConfig { tolerances: cfg.tolerances, caps: cfg.caps, independence_seed: cfg.seed, enforce_hypotheses: true }
}

pub fn run_item(item: &PlanItem, cfg: &SuiteConfig) -> InstanceResult {
    let vcfg = verifier_config(cfg);
    let setup = (|| -> Result<(Instance, SumSequence, Vec<f64>), HarnessError> {
        let instance = generate(&item.generator, &cfg.caps)?;
        let members = instance.members(&cfg.caps)?;
        let sweep = lambda_sweep(&members)?;
        Ok((instance, SumSequence::new(members)?, sweep))
    })();
    let (instance, seq, sweep) = match setup {
        Ok(s) => s,
        Err(e) => return InstanceResult::failed_setup(item, &e),
    };
    let mut records = Vec::new();
    for &kind in &item.verifiers {
        let norm = if kind == VerifierKind::Chebyshev { seq.total().resolution().map_or(0.0, |r| r.norm()) } else { 0.0 };
        for call in expand(kind, &item.params, &sweep, norm) {
            let outcome = run_call(&instance, &seq, &call, &vcfg);
            records.push(RunRecord {
                verifier: kind,
                lambda: call.lambda,
                alpha: call.alpha,
                exponent: call.exponent,
                status: outcome.status(),
                outcome,
            });
        }
    }
    InstanceResult { id: item.id.clone(), generator: item.generator.clone(), error: None, records }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifierSummary {
    pub runs: usize,
    pub passed: usize,
    pub vacuous: usize,
    pub failed: usize,
    pub errors: usize,
    /// Smallest slack over the non-error runs.
    #[serde(with = "ext_real")]
    pub worst_slack: f64,
}

impl Default for VerifierSummary {
    fn default() -> Self {
        Self { runs: 0, passed: 0, vacuous: 0, failed: 0, errors: 0, worst_slack: f64::INFINITY }
    }
}

impl VerifierSummary {
    fn add(&mut self, status: Status, slack: Option<f64>) {
        self.runs += 1;
        match status {
            Status::Pass => self.passed += 1,
            Status::Vacuous => self.vacuous += 1,
            Status::Fail => self.failed += 1,
            Status::Error => self.errors += 1,
        }
        if let Some(s) = slack {
            self.worst_slack = self.worst_slack.min(s);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub config: SuiteConfig,
    pub totals: VerifierSummary,
    /// Instances that could not be generated or set up.
    pub setup_errors: usize,
    pub verifiers: BTreeMap<VerifierKind, VerifierSummary>,
    /// Sorted by id.
    pub instances: Vec<InstanceResult>,
    pub exit_code: i32,
}

/// Runs every plan item; instances run in parallel and are sorted by id.
pub fn run_suite(cfg: &SuiteConfig, plan: &[PlanItem]) -> Result<SuiteReport, HarnessError> {
    cfg.validate()?;
    let mut instances: Vec<InstanceResult> = plan.par_iter().map(|item| run_item(item, cfg)).collect();
    instances.sort_by(|a, b| a.id.cmp(&b.id));

    let mut totals = VerifierSummary::default();
    let mut verifiers: BTreeMap<VerifierKind, VerifierSummary> = BTreeMap::new();
    let mut setup_errors = 0;
    for inst in &instances {
        if inst.error.is_some() {
            setup_errors += 1;
        }
        for r in &inst.records {
            let slack = r.outcome.slack();
            totals.add(r.status, slack);
            verifiers.entry(r.verifier).or_default().add(r.status, slack);
        }
    }
    let exit_code = if totals.failed > 0 {
        1
    } else if totals.errors > 0 || setup_errors > 0 {
        2
    } else {
        0
    };
    Ok(SuiteReport { seed: cfg.seed, config: cfg.clone(), totals, setup_errors, verifiers, instances, exit_code })
}

/// Runs the configured plan, or the default plan when none is given.
pub fn run_configured(cfg: &SuiteConfig) -> Result<SuiteReport, HarnessError> {
    match &cfg.plan {
        Some(plan) => run_suite(cfg, plan),
        None => run_suite(cfg, &default_plan(cfg)),
    }
}

/// Index entry of `suite.json`; full reports live in the per-instance files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceIndex {
    pub id: String,
    pub generator: GeneratorSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub summary: BTreeMap<VerifierKind, VerifierSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteFile {
    pub seed: u64,
    pub config: SuiteConfig,
    pub totals: VerifierSummary,
    pub setup_errors: usize,
    pub verifiers: BTreeMap<VerifierKind, VerifierSummary>,
    pub instances: Vec<InstanceIndex>,
    pub exit_code: i32,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn index(&self) -> SuiteFile {
        let instances = self
            .instances
            .iter()
            .map(|inst| {
                let mut summary: BTreeMap<VerifierKind, VerifierSummary> = BTreeMap::new();
                for r in &inst.records {
                    summary.entry(r.verifier).or_default().add(r.status, r.outcome.slack());
                }
                InstanceIndex { id: inst.id.clone(), generator: inst.generator.clone(), error: inst.error.clone(), summary }
            })
            .collect();
        SuiteFile {
            seed: self.seed,
            config: self.config.clone(),
            totals: self.totals.clone(),
            setup_errors: self.setup_errors,
            verifiers: self.verifiers.clone(),
            instances,
            exit_code: self.exit_code,
        }
    }

    /// Writes `run-<seed>-<unix time>/suite.json` and one
    /// `instances/<id>.json` per instance under `out`.
    pub fn write_run_dir(&self, out: &Path) -> Result<PathBuf, HarnessError> {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let dir = out.join(format!("run-{}-{stamp}", self.seed));
        let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir.join("instances")).map_err(io)?;
        let index = serde_json::to_string_pretty(&self.index()).expect("reports serialize");
        fs::write(dir.join("suite.json"), index + "\n").map_err(io)?;
        for inst in &self.instances {
            let text = serde_json::to_string_pretty(inst).expect("reports serialize");
            fs::write(dir.join("instances").join(format!("{}.json", inst.id)), text + "\n").map_err(io)?;
        }
        Ok(dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_uses_quantiles_of_the_absolute_total() {
        let x = HermitianOperator::diagonal(&[-2.0, 0.0, 1.0, 3.0]);
        assert_eq!(lambda_sweep(&[x]).unwrap(), vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn sweep_drops_zero_thresholds() {
        let x = HermitianOperator::diagonal(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(lambda_sweep(&[x]).unwrap(), vec![2.0]);
    }

    #[test]
    fn verifier_names_parse_back() {
        for k in VerifierKind::ALL {
            assert_eq!(k.name().parse::<VerifierKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
    }

    #[test]
    fn expansion_is_the_product_grid() {
        let calls = expand(VerifierKind::LevySkorohod, &PlanParams::default(), &[1.0, 2.0], 0.0);
        assert_eq!(calls.len(), 6);
        let calls = expand(VerifierKind::Median, &PlanParams::default(), &[1.0, 2.0], 0.0);
        assert_eq!(calls.len(), 3);
        assert!(calls.iter().all(|c| c.lambda.is_none()));
        let calls = expand(VerifierKind::Chebyshev, &PlanParams::default(), &[1.0], 4.0);
        let lambdas: Vec<f64> = calls.iter().filter_map(|c| c.lambda).collect();
        assert_eq!(lambdas, [1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 4.0, 4.0, 4.0]);
    }

    #[test]
    fn default_plan_respects_counts() {
        let cfg = SuiteConfig { family_instances: 3, classical_instances: 2, hermitian_instances: 4, ..SuiteConfig::default() };
        let plan = default_plan(&cfg);
        assert_eq!(plan.len(), 3 * 2 + 2 * 2 + 4);
        assert_eq!(plan, default_plan(&cfg));
    }
}
