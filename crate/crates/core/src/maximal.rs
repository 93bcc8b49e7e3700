//! Verifiers for the maximal inequalities.
//!
//! Each verifier builds the witness projections of the corresponding proof,
//! evaluates both sides of every displayed bound and records the proof steps
//! it can check on the witnesses as internal invariants.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::independence::{weak_full_independence_test, DifferenceSpectrum, IndependenceOptions, IndependenceReport};
use crate::joint::{diagonal_frame, joint_eigenbasis, max_pairwise_commutator, JointEigenbasis};
use crate::lattice::{join, join_all, meet, meet_with_diagnostics, subprojection_defect, LatticeConfig};
use crate::measure::{check_threshold, TraceDistribution};
use crate::operator::{
    check_exponent, hermitian_part, lp_power_of, matmul, max_abs, BorelInterval, CMatrix, HermitianOperator, Projection, SpectralResolution,
};
use crate::report::{banded_check, HypothesisCheck, InequalityReport, ReportBuilder};
use crate::{Caps, Error, Result, Tolerances};

/// Hypothesis deviations between `accept` and `WARN_FACTOR * accept` pass
/// with a warning.
pub const WARN_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifierConfig {
    pub tolerances: Tolerances,
    pub caps: Caps,
    /// Seed of the independence falsifier.
    pub independence_seed: u64,
    /// Return `HypothesisFailed` instead of recording the failure and
    /// running the construction anyway.
    pub enforce_hypotheses: bool,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        Self { tolerances: Tolerances::default(), caps: Caps::default(), independence_seed: 0, enforce_hypotheses: true }
    }
}

impl VerifierConfig {
    pub fn lattice(&self) -> LatticeConfig {
        LatticeConfig::from(&self.tolerances)
    }

    pub fn independence_options(&self) -> IndependenceOptions {
        IndependenceOptions {
            max_word_len: self.caps.max_word_len,
            n_words: self.caps.n_words,
            seed: self.independence_seed,
            tol_indep: self.tolerances.tol_indep,
        }
    }
}

type Cached<T> = OnceLock<Result<Vec<T>>>;

fn cached<T>(cell: &Cached<T>, init: impl FnOnce() -> Result<Vec<T>>) -> Result<&[T]> {
    cell.get_or_init(init).as_deref().map_err(Clone::clone)
}

/// Commuting increments rewritten as diagonal operators in a joint eigenbasis.
#[derive(Debug, Clone)]
struct Frame {
    basis: JointEigenbasis,
    xs: Vec<HermitianOperator>,
    partial_sums: Vec<HermitianOperator>,
}

fn running_sums(xs: &[HermitianOperator]) -> Vec<HermitianOperator> {
    let mut acc = HermitianOperator::zero(xs[0].dim());
    xs.iter()
        .map(|x| {
            acc = &acc + x;
            acc.clone()
        })
        .collect()
}

/// Increments `x_1, ..., x_n` and partial sums `s_k = x_1 + ... + x_k`.
/// Spectral data and the independence verdict are computed once and shared
/// by every verifier run on the sequence.
#[derive(Debug, Clone)]
pub struct SumSequence {
    xs: Vec<HermitianOperator>,
    partial_sums: Vec<HermitianOperator>,
    members: Cached<SpectralResolution>,
    partial: Cached<SpectralResolution>,
    tails: Cached<SpectralResolution>,
    frame: OnceLock<Option<Frame>>,
    independence: OnceLock<(IndependenceOptions, Result<IndependenceReport>)>,
}

impl SumSequence {
    pub fn new(xs: Vec<HermitianOperator>) -> Result<Self> {
        let first = xs.first().ok_or(Error::EmptyFamily)?;
        let d = first.dim();
        if let Some(bad) = xs.iter().find(|x| x.dim() != d) {
            return Err(Error::DimMismatch { expected: d, found: bad.dim() });
        }
        let partial_sums = running_sums(&xs);
        Ok(Self {
            xs,
            partial_sums,
            members: OnceLock::new(),
            partial: OnceLock::new(),
            tails: OnceLock::new(),
            frame: OnceLock::new(),
            independence: OnceLock::new(),
        })
    }

    pub fn xs(&self) -> &[HermitianOperator] {
        &self.xs
    }

    pub fn partial_sums(&self) -> &[HermitianOperator] {
        &self.partial_sums
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.xs[0].dim()
    }

    /// `s_n`.
    pub fn total(&self) -> &HermitianOperator {
        self.partial_sums.last().expect("sequences are nonempty")
    }

    fn frame(&self) -> Option<&Frame> {
        self.frame
            .get_or_init(|| {
                if self.xs.iter().all(HermitianOperator::is_diagonal) {
                    return None;
                }
                let (basis, xs) = diagonal_frame(&self.xs)?;
                let partial_sums = running_sums(&xs);
                Some(Frame { basis, xs, partial_sums })
            })
            .as_ref()
    }

    /// Increments and partial sums in the basis the resolutions are written
    /// in: a joint eigenbasis when the increments commute, else the standard
    /// basis.
    fn working(&self) -> (&[HermitianOperator], &[HermitianOperator]) {
        match self.frame() {
            Some(f) => (&f.xs, &f.partial_sums),
            None => (&self.xs, &self.partial_sums),
        }
    }

    /// Maps a projection built from the resolutions back to the standard
    /// basis.
    fn lift(&self, p: Projection) -> Projection {
        match self.frame() {
            Some(f) => Projection::from_matrix_unchecked(hermitian_part(&f.basis.lift(p.matrix()))),
            None => p,
        }
    }

    /// Spectral resolutions of the increments. For commuting increments they
    /// are written in a joint eigenbasis, which leaves every trace unchanged.
    pub fn member_resolutions(&self) -> Result<&[SpectralResolution]> {
        cached(&self.members, || self.working().0.iter().map(HermitianOperator::resolution).collect())
    }

    /// Resolutions of `s_k`, in the same basis as [`Self::member_resolutions`].
    pub fn partial_resolutions(&self) -> Result<&[SpectralResolution]> {
        cached(&self.partial, || self.working().1.iter().map(HermitianOperator::resolution).collect())
    }

    /// Resolutions of `s_n - s_k` for `k = 1..n`, in the same basis as
    /// [`Self::member_resolutions`].
    pub fn tail_resolutions(&self) -> Result<&[SpectralResolution]> {
        cached(&self.tails, || {
            let partial = self.working().1;
            let total = partial.last().expect("sequences are nonempty");
            partial.iter().map(|s| (total - s).resolution()).collect()
        })
    }

    /// `max_k ||[s_k, s_n]|| / max(1, ||s_k|| ||s_n||)`, max-entry norms.
    pub fn commutation_deviation(&self) -> Result<f64> {
        let total = self.total();
        let total_norm = max_abs(total.matrix());
        let mut worst = 0.0_f64;
        for s in &self.partial_sums {
            let scale = (max_abs(s.matrix()) * total_norm).max(1.0);
            worst = worst.max(s.commutator_norm(total)? / scale);
        }
        Ok(worst)
    }

    /// Largest normalized symmetry deviation among the increments.
    pub fn symmetry_deviation(&self) -> Result<f64> {
        Ok(self
            .member_resolutions()?
            .iter()
            .map(|r| TraceDistribution::from_resolution(r).symmetry_deviation() / r.norm().max(1.0))
            .fold(0.0, f64::max))
    }

    pub fn independence(&self, opts: &IndependenceOptions) -> Result<IndependenceReport> {
        if let Some((cached_opts, report)) = self.independence.get() {
            if cached_opts == opts {
                return report.clone();
            }
        }
        let report = weak_full_independence_test(&self.xs, opts);
        let _ = self.independence.set((*opts, report.clone()));
        report
    }
}

/// The projections of a first-exit construction.
#[derive(Debug, Clone)]
pub struct WitnessFamily {
    pub r: Vec<Projection>,
    pub p_parts: Vec<Projection>,
    pub t: Vec<Projection>,
    pub f: Vec<Projection>,
    pub p_total: Projection,
    pub q_total: Option<Projection>,
}

struct Ladder {
    p_parts: Vec<Projection>,
    p_total: Projection,
    degenerate_gap: Option<f64>,
}

/// `p_k = (r_1 ∧ ... ∧ r_{k-1}) ∧ r_k^⊥` and `p = Σ p_k`.
fn build_ladder(r: &[Projection], lc: &LatticeConfig) -> Result<Ladder> {
    let d = r[0].dim();
    let mut running = Projection::identity(d);
    let mut p_parts = Vec::with_capacity(r.len());
    let mut degenerate_gap: Option<f64> = None;
    let mut total = CMatrix::zeros(d, d);
    for rk in r {
        let out = meet_with_diagnostics(&running, &rk.complement(), lc)?;
        if let Some(g) = out.degenerate_gap {
            degenerate_gap = Some(degenerate_gap.map_or(g, |h| h.min(g)));
        }
        total += out.projection.matrix();
        p_parts.push(out.projection);
        running = meet(&running, rk, lc)?;
    }
    Ok(Ladder { p_parts, p_total: Projection::from_matrix_unchecked(total), degenerate_gap })
}

fn orthogonality_defect(parts: &[Projection]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            worst = worst.max(max_abs(&matmul(parts[i].matrix(), parts[j].matrix())));
        }
    }
    worst
}

fn pow2(k: usize) -> f64 {
    // 2^{1-k} for 1-based k
    0.5_f64.powi(k as i32 - 1)
}

fn gather_hypotheses(seq: &SumSequence, cfg: &VerifierConfig, symmetric: bool) -> Result<Vec<HypothesisCheck>> {
    let accept = cfg.tolerances.tol_indep;
    let warn = accept * WARN_FACTOR;
    let mut checks = vec![banded_check("commuting partial sums", seq.commutation_deviation()?, accept, warn)];
    let indep = seq.independence(&cfg.independence_options())?;
    checks.push(banded_check("weak full independence", indep.max_deviation, accept, warn));
    if symmetric {
        checks.push(banded_check("symmetric increments", seq.symmetry_deviation()?, accept, warn));
    }
    Ok(checks)
}

fn admit(b: &mut ReportBuilder, checks: Vec<HypothesisCheck>, cfg: &VerifierConfig) -> Result<()> {
    for c in checks {
        if !c.passed && cfg.enforce_hypotheses {
            return Err(Error::HypothesisFailed { hypothesis: c.name, deviation: c.deviation });
        }
        b.hypothesis(c);
    }
    Ok(())
}

/// First-exit side: `r_k` from `partial[k]` on `r_set`, `t_k` from
/// `tails[k]` on `t_set`, `f_k = r_k^⊥ ∧ t_k`.
struct Side {
    r: Vec<Projection>,
    ladder: Ladder,
    t: Vec<Projection>,
    f: Vec<Projection>,
}

fn build_side(
    partial: &[SpectralResolution],
    r_set: &BorelInterval,
    tails: &[SpectralResolution],
    t_set: &BorelInterval,
    cfg: &VerifierConfig,
) -> Result<Side> {
    let eps = cfg.tolerances.eps_bnd;
    let lc = cfg.lattice();
    let r: Vec<Projection> = partial.iter().map(|res| res.projection(r_set, eps)).collect();
    let ladder = build_ladder(&r, &lc)?;
    let t: Vec<Projection> = tails.iter().map(|res| res.projection(t_set, eps)).collect();
    let f = r.iter().zip(&t).map(|(rk, tk)| meet(&rk.complement(), tk, &lc)).collect::<Result<Vec<_>>>()?;
    Ok(Side { r, ladder, t, f })
}

impl Side {
    fn tau_p(&self) -> f64 {
        self.ladder.p_parts.iter().map(Projection::trace).sum()
    }

    fn min_tau_t(&self) -> f64 {
        self.t.iter().map(Projection::trace).fold(f64::INFINITY, f64::min)
    }

    /// Traces of `r_k^⊥`, `p_k`, `t_k` plus the structural invariants shared by
    /// all first-exit constructions.
    fn record(&self, b: &mut ReportBuilder, tag: &str, target: &Projection) {
        let n = self.r.len();
        for k in 0..n {
            b.trace(format!("tau({tag}_{})", k + 1), self.ladder.p_parts[k].trace());
            b.trace(format!("tau(r{tag}_{}^perp)", k + 1), 1.0 - self.r[k].trace());
            b.trace(format!("tau(t{tag}_{})", k + 1), self.t[k].trace());
        }
        let tol = b.tol_check();
        let ortho = orthogonality_defect(&self.ladder.p_parts);
        b.invariant(format!("{tag}_k pairwise orthogonal"), ortho <= tol, ortho);
        let idem = self.ladder.p_total.idempotency_defect();
        b.invariant(format!("{tag} is a projection"), idem <= tol, idem);

        let complement = 1.0 - self.tau_p();
        for k in 0..n {
            b.invariant_le(
                format!("tau({tag}^perp) <= 1 - 2^(1-k) tau(r{tag}_k^perp), k = {}", k + 1),
                complement,
                1.0 - pow2(k + 1) * (1.0 - self.r[k].trace()),
            );
        }
        for (k, fk) in self.f.iter().enumerate() {
            let defect = subprojection_defect(fk, target).unwrap_or(f64::INFINITY);
            b.invariant(format!("f{tag}_{} below target", k + 1), defect <= tol, defect);
        }
        for k in 0..n {
            let pk = &self.ladder.p_parts[k];
            let joint = pk.product_trace(self.t[k].matrix());
            let dev = (joint - pk.trace() * self.t[k].trace()).abs();
            b.invariant(format!("tau({tag}_{0} t{tag}_{0}) = tau({tag}_{0}) tau(t{tag}_{0})", k + 1), dev <= tol, dev);
        }
        if let Some(g) = self.ladder.degenerate_gap {
            b.warning(format!("nearly degenerate meet in the {tag} ladder, gap {g:e}"));
        }
    }

    fn witnesses(self, q_total: Option<Projection>, seq: &SumSequence) -> WitnessFamily {
        let lift_all = |ps: Vec<Projection>| ps.into_iter().map(|p| seq.lift(p)).collect();
        WitnessFamily {
            r: lift_all(self.r),
            p_parts: lift_all(self.ladder.p_parts),
            t: lift_all(self.t),
            f: lift_all(self.f),
            p_total: seq.lift(self.ladder.p_total),
            q_total: q_total.map(|q| seq.lift(q)),
        }
    }
}

fn negated_all(res: &[SpectralResolution]) -> Vec<SpectralResolution> {
    res.iter().map(SpectralResolution::negated).collect()
}

fn absolute_all(res: &[SpectralResolution]) -> Vec<SpectralResolution> {
    res.iter().map(SpectralResolution::absolute).collect()
}

/// `max_k 2^{1-k} tau(e_B(y_k))`.
fn weighted_max(res: &[SpectralResolution], set: &BorelInterval, eps: f64) -> f64 {
    res.iter().enumerate().map(|(k, r)| pow2(k + 1) * r.trace_in(set, eps)).fold(0.0, f64::max)
}

fn levy_sides(seq: &SumSequence, lambda: f64, cfg: &VerifierConfig) -> Result<(Side, Side)> {
    let partial = seq.partial_resolutions()?;
    let tails = seq.tail_resolutions()?;
    let r_set = BorelInterval::at_most(lambda);
    let t_set = BorelInterval::at_least(0.0);
    let p = build_side(partial, &r_set, tails, &t_set, cfg)?;
    let q = build_side(&negated_all(partial), &r_set, &negated_all(tails), &t_set, cfg)?;
    Ok((p, q))
}

/// The Levy witnesses `r_k`, `p_k`, `t_k`, `f_k`, `p` and `q`.
pub fn levy_witnesses(seq: &SumSequence, lambda: f64, cfg: &VerifierConfig) -> Result<WitnessFamily> {
    check_threshold(lambda)?;
    let (p, q) = levy_sides(seq, lambda, cfg)?;
    Ok(p.witnesses(Some(q.ladder.p_total), seq))
}

/// `max_k 2^{1-k} tau(e_(λ,∞)(s_k)) <= tau(p) <= 2 tau(e_(λ,∞)(s_n))` and the
/// `|s_k|` version with `p + q`, for symmetric weakly fully independent
/// increments with `s_k s_n = s_n s_k`.
pub fn levy_verify(seq: &SumSequence, lambda: f64, cfg: &VerifierConfig) -> Result<InequalityReport> {
    check_threshold(lambda)?;
    let eps = cfg.tolerances.eps_bnd;
    let mut b = ReportBuilder::new("levy", cfg.tolerances.tol_check);
    b.parameter("lambda", lambda).parameter("n", seq.len() as f64);
    admit(&mut b, gather_hypotheses(seq, cfg, true)?, cfg)?;

    let partial = seq.partial_resolutions()?;
    let n = partial.len();
    let above = BorelInterval::above(lambda);
    let (p, q) = levy_sides(seq, lambda, cfg)?;
    let total = &partial[n - 1];
    p.record(&mut b, "p", &total.projection(&above, eps));
    q.record(&mut b, "q", &total.negated().projection(&above, eps));
    for side in [&p, &q] {
        for t in &side.t {
            b.invariant_le("tau(t_k) >= 1/2", 0.5, t.trace());
        }
    }

    let tau_p = p.tau_p();
    let tau_q = q.tau_p();
    let tail_n = total.trace_in(&above, eps);
    let abs_tail_n = total.absolute().trace_in(&above, eps);
    let lower_p = weighted_max(partial, &above, eps);
    let lower_q = weighted_max(&negated_all(partial), &above, eps);
    let lower_abs = weighted_max(&absolute_all(partial), &above, eps);
    let join_pq = join(&p.ladder.p_total, &q.ladder.p_total, &cfg.lattice())?.trace();

    b.trace("tau(p)", tau_p)
        .trace("tau(q)", tau_q)
        .trace("tau(p or q)", join_pq)
        .trace("tau(e_(lambda,inf)(s_n))", tail_n)
        .trace("tau(e_(lambda,inf)(|s_n|))", abs_tail_n)
        .trace("max_k 2^(1-k) tau(e_(lambda,inf)(s_k))", lower_p)
        .trace("max_k 2^(1-k) tau(e_(lambda,inf)(-s_k))", lower_q)
        .trace("max_k 2^(1-k) tau(e_(lambda,inf)(|s_k|))", lower_abs);
    b.invariant_le("|s_k| lower bound <= split lower bound", lower_abs, lower_p + lower_q);
    let excites = partial.iter().any(|r| r.trace_in(&above, eps) > 0.0);
    b.invariant("p nonzero when some tail is nonzero", !excites || tau_p > 0.0, 0.0);

    b.bound("max_k 2^(1-k) tau(e_(lambda,inf)(s_k)) <= tau(p)", lower_p, tau_p);
    b.bound("tau(p) <= 2 tau(e_(lambda,inf)(s_n))", tau_p, 2.0 * tail_n);
    b.bound("max_k 2^(1-k) tau(e_(lambda,inf)(|s_k|)) <= tau(p) + tau(q)", lower_abs, tau_p + tau_q);
    b.bound("tau(p) + tau(q) <= 2 tau(e_(lambda,inf)(|s_n|))", tau_p + tau_q, 2.0 * abs_tail_n);
    Ok(b.finish(tau_p, 2.0 * tail_n))
}

fn inverse_or_inf(v: f64) -> f64 {
    if v > 0.0 {
        1.0 / v
    } else {
        f64::INFINITY
    }
}

fn scaled_or_inf(m: f64, v: f64) -> f64 {
    if m.is_infinite() {
        f64::INFINITY
    } else {
        m * v
    }
}

/// `max_k 2^{1-k} tau(e_(2λ,∞)(|s_k|)) <= tau(p) <= M_λ tau(e_(λ/2,∞)(|s_n|))`
/// with `M_λ = 1 / min_k tau(e_[0,λ/2](|s_n - s_k|))`.
pub fn ottaviani_verify(seq: &SumSequence, lambda: f64, cfg: &VerifierConfig) -> Result<InequalityReport> {
    check_threshold(lambda)?;
    let eps = cfg.tolerances.eps_bnd;
    let mut b = ReportBuilder::new("ottaviani", cfg.tolerances.tol_check);
    b.parameter("lambda", lambda).parameter("n", seq.len() as f64);
    admit(&mut b, gather_hypotheses(seq, cfg, false)?, cfg)?;

    let abs_partial = absolute_all(seq.partial_resolutions()?);
    let abs_tails = absolute_all(seq.tail_resolutions()?);
    let side = build_side(
        &abs_partial,
        &BorelInterval::at_most(2.0 * lambda),
        &abs_tails,
        &BorelInterval::at_most(lambda / 2.0),
        cfg,
    )?;
    let total = abs_partial.last().expect("nonempty");
    let target_set = BorelInterval::above(lambda / 2.0);
    side.record(&mut b, "p", &total.projection(&target_set, eps));

    let tau_p = side.tau_p();
    let m = inverse_or_inf(side.min_tau_t());
    let tail = total.trace_in(&target_set, eps);
    let lower = weighted_max(&abs_partial, &BorelInterval::above(2.0 * lambda), eps);
    let rhs = scaled_or_inf(m, tail);
    b.trace("tau(p)", tau_p)
        .trace("M_lambda", m)
        .trace("tau(e_(lambda/2,inf)(|s_n|))", tail)
        .trace("max_k 2^(1-k) tau(e_(2lambda,inf)(|s_k|))", lower);
    if m.is_infinite() {
        b.note("min_k tau(t_k) = 0, so M_lambda = inf and the upper bound is vacuous");
    }
    b.bound("max_k 2^(1-k) tau(e_(2lambda,inf)(|s_k|)) <= tau(p)", lower, tau_p);
    b.bound("tau(p) <= M_lambda tau(e_(lambda/2,inf)(|s_n|))", tau_p, rhs);
    Ok(b.finish(tau_p, rhs))
}

/// `max_k 2^{1-k} tau(e_(λ,∞)(s_k)) <= tau(p) <= M_λ tau(e_(αλ,∞)(s_n))` with
/// `M_λ = 1 / min_k tau(e_[-(1-α)λ,∞)(s_n - s_k))`.
pub fn levy_skorohod_verify(seq: &SumSequence, lambda: f64, alpha: f64, cfg: &VerifierConfig) -> Result<InequalityReport> {
    check_threshold(lambda)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::BadAlpha(alpha));
    }
    let tol = &cfg.tolerances;
    let eps = tol.eps_bnd;
    let mut b = ReportBuilder::new("levy_skorohod", tol.tol_check);
    b.parameter("lambda", lambda).parameter("alpha", alpha).parameter("n", seq.len() as f64);
    admit(&mut b, gather_hypotheses(seq, cfg, false)?, cfg)?;

    let partial = seq.partial_resolutions()?;
    let side = build_side(
        partial,
        &BorelInterval::at_most(lambda),
        seq.tail_resolutions()?,
        &BorelInterval::at_least(-(1.0 - alpha) * lambda),
        cfg,
    )?;
    let total = partial.last().expect("nonempty");
    let target_set = BorelInterval::above(alpha * lambda);
    let target = total.projection(&target_set, eps);
    side.record(&mut b, "p", &target);

    let tau_p = side.tau_p();
    let m = inverse_or_inf(side.min_tau_t());
    let tail = total.trace_in(&target_set, eps);
    let lower = weighted_max(partial, &BorelInterval::above(lambda), eps);
    let rhs = scaled_or_inf(m, tail);
    b.trace("tau(p)", tau_p)
        .trace("M_lambda", m)
        .trace("tau(e_(alpha lambda,inf)(s_n))", tail)
        .trace("max_k 2^(1-k) tau(e_(lambda,inf)(s_k))", lower);
    if seq.symmetry_deviation()? < tol.tol_indep {
        b.invariant_le("M_lambda <= 2 for symmetric increments", m, 2.0);
    }
    if m.is_infinite() {
        b.note("min_k tau(t_k) = 0, so M_lambda = inf and the upper bound is vacuous");
    }
    b.bound("max_k 2^(1-k) tau(e_(lambda,inf)(s_k)) <= tau(p)", lower, tau_p);
    b.bound("tau(p) <= M_lambda tau(e_(alpha lambda,inf)(s_n))", tau_p, rhs);
    Ok(b.finish(tau_p, rhs))
}

/// How the strong symmetrization verifier represents `M (x) M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetrizationEngine {
    /// Joint eigenbasis for commuting families, doubled matrices otherwise.
    Auto,
    /// Coordinate projections in a common eigenbasis; commuting families only.
    JointEigenbasis,
    /// Explicit `d^2 x d^2` projections; needs `d^2 <= dim_cap`.
    DoubledMatrices,
}

struct StrongOutcome {
    tau_parts: Vec<f64>,
    ortho: f64,
    idem: f64,
    tau_join_q: f64,
    tau_q: Vec<f64>,
    /// Max over `k` of how far `e_[λ,∞)(z_k) (x) f_k` sticks out of `q_k`.
    domination: f64,
    degenerate_gap: Option<f64>,
}

/// `tau(p) <= 2 tau(∨_k e_[λ,∞)(x_k (x) 1 - 1 (x) x_k))` where
/// `p = Σ_k r_{k-1} ∧ e_[λ,∞)(z_k)`, `z_k = x_k - med(x_k)` and
/// `r_k = ∧_{j<=k} e_(-∞,λ)(z_j)`.
pub fn strong_symmetrization_verify(xs: &[HermitianOperator], lambda: f64, cfg: &VerifierConfig) -> Result<InequalityReport> {
    strong_symmetrization_verify_with(xs, lambda, cfg, SymmetrizationEngine::Auto)
}

pub fn strong_symmetrization_verify_with(
    xs: &[HermitianOperator],
    lambda: f64,
    cfg: &VerifierConfig,
    engine: SymmetrizationEngine,
) -> Result<InequalityReport> {
    if !lambda.is_finite() {
        return Err(Error::BadThreshold(lambda));
    }
    let first = xs.first().ok_or(Error::EmptyFamily)?;
    if let Some(bad) = xs.iter().find(|x| x.dim() != first.dim()) {
        return Err(Error::DimMismatch { expected: first.dim(), found: bad.dim() });
    }
    let tol = &cfg.tolerances;
    let eps = tol.eps_bnd;
    let mut b = ReportBuilder::new("strong_symmetrization", tol.tol_check);
    b.parameter("lambda", lambda).parameter("n", xs.len() as f64);

    let resolutions = xs.iter().map(HermitianOperator::resolution).collect::<Result<Vec<_>>>()?;
    let medians: Vec<f64> = resolutions.iter().map(|r| TraceDistribution::from_resolution(r).median()).collect();
    let shifted: Vec<SpectralResolution> = resolutions.iter().zip(&medians).map(|(r, &m)| r.shifted(m)).collect();

    let engine = match engine {
        SymmetrizationEngine::Auto if max_pairwise_commutator(xs)? < tol.tol_comm => SymmetrizationEngine::JointEigenbasis,
        SymmetrizationEngine::Auto => SymmetrizationEngine::DoubledMatrices,
        e => e,
    };
    let out = match engine {
        SymmetrizationEngine::JointEigenbasis => {
            b.note("engine: joint eigenbasis");
            strong_joint(xs, &medians, lambda, cfg, &mut b)?
        }
        _ => {
            b.note("engine: doubled matrices");
            strong_doubled(&resolutions, &shifted, lambda, cfg)?
        }
    };

    let tau_p: f64 = out.tau_parts.iter().sum();
    let f_traces: Vec<f64> = shifted.iter().map(|z| z.trace_in(&BorelInterval::at_most(0.0), eps)).collect();
    for (k, m) in medians.iter().enumerate() {
        b.parameter(&format!("med(x_{})", k + 1), *m);
    }
    for k in 0..xs.len() {
        b.trace(format!("tau(p_{})", k + 1), out.tau_parts[k]);
        b.trace(format!("tau(q_{})", k + 1), out.tau_q[k]);
        b.trace(format!("tau(f_{})", k + 1), f_traces[k]);
        b.invariant_le(format!("tau(f_{}) >= 1/2", k + 1), 0.5, f_traces[k]);
    }
    b.trace("tau(p)", tau_p).trace("tau(join q_k)", out.tau_join_q);
    let t = b.tol_check();
    b.invariant("p_k pairwise orthogonal", out.ortho <= t, out.ortho);
    b.invariant("p is a projection", out.idem <= t, out.idem);
    b.invariant("e_[lambda,inf)(z_k) f_k <= q_k", out.domination <= t, out.domination);
    let weighted: f64 = out.tau_parts.iter().zip(&f_traces).map(|(p, f)| p * f).sum();
    b.invariant_le("sum_k tau(p_k) tau(f_k) <= tau(join q_k)", weighted, out.tau_join_q);
    let excites = shifted.iter().any(|z| z.trace_in(&BorelInterval::at_least(lambda), eps) > 0.0);
    b.invariant("p nonzero when some e_[lambda,inf)(z_k) is nonzero", !excites || tau_p > 0.0, 0.0);
    if let Some(g) = out.degenerate_gap {
        b.warning(format!("nearly degenerate meet, gap {g:e}"));
    }
    b.bound("tau(p) <= 2 tau(join q_k)", tau_p, 2.0 * out.tau_join_q);
    Ok(b.finish(tau_p, 2.0 * out.tau_join_q))
}

fn strong_doubled(
    resolutions: &[SpectralResolution],
    shifted: &[SpectralResolution],
    lambda: f64,
    cfg: &VerifierConfig,
) -> Result<StrongOutcome> {
    let eps = cfg.tolerances.eps_bnd;
    let lc = cfg.lattice();
    let d = resolutions[0].dim();
    let doubled = d.saturating_mul(d);
    if doubled > cfg.caps.dim_cap {
        return Err(Error::DimOverflow { dim: doubled, cap: cfg.caps.dim_cap });
    }
    let below: Vec<Projection> = shifted.iter().map(|z| z.projection(&BorelInterval::below(lambda), eps)).collect();
    let ladder = build_ladder(&below, &lc)?;
    let upper = BorelInterval::at_least(lambda);
    let q: Vec<Projection> =
        resolutions.iter().map(|r| DifferenceSpectrum::new(r.clone()).projection(&upper, eps)).collect();
    let join_q = join_all(&q, &lc)?;
    let mut domination = 0.0_f64;
    for (k, z) in shifted.iter().enumerate() {
        let pair = z.projection(&upper, eps).kron(&z.projection(&BorelInterval::at_most(0.0), eps));
        domination = domination.max(subprojection_defect(&pair, &q[k])?);
    }
    Ok(StrongOutcome {
        tau_parts: ladder.p_parts.iter().map(Projection::trace).collect(),
        ortho: orthogonality_defect(&ladder.p_parts),
        idem: ladder.p_total.idempotency_defect(),
        tau_join_q: join_q.trace(),
        tau_q: q.iter().map(Projection::trace).collect(),
        domination,
        degenerate_gap: ladder.degenerate_gap,
    })
}

fn strong_joint(
    xs: &[HermitianOperator],
    medians: &[f64],
    lambda: f64,
    cfg: &VerifierConfig,
    b: &mut ReportBuilder,
) -> Result<StrongOutcome> {
    let tol = &cfg.tolerances;
    let eps = tol.eps_bnd;
    let jb = joint_eigenbasis(xs, tol.tol_comm, tol.tol_cluster)?;
    let residual = jb.residual(xs);
    let scale = xs.iter().map(|x| max_abs(x.matrix())).fold(1.0, f64::max);
    b.invariant("joint eigenbasis diagonalizes every x_k", residual <= b.tol_check() * scale, residual);

    let d = jb.dim();
    let n = xs.len();
    let upper = BorelInterval::at_least(lambda);
    let nonpositive = BorelInterval::at_most(0.0);
    let excited: Vec<Vec<bool>> =
        (0..n).map(|k| jb.values(k).iter().map(|v| upper.contains(v - medians[k], eps)).collect()).collect();
    let low: Vec<Vec<bool>> =
        (0..n).map(|k| jb.values(k).iter().map(|v| nonpositive.contains(v - medians[k], eps)).collect()).collect();

    let mut running = vec![true; d];
    let mut parts = Vec::with_capacity(n);
    for exc in &excited {
        let part: Vec<bool> = (0..d).map(|i| running[i] && exc[i]).collect();
        for i in 0..d {
            running[i] &= !exc[i];
        }
        parts.push(part);
    }
    let count = |m: &[bool]| m.iter().filter(|&&v| v).count();
    let tau_parts: Vec<f64> = parts.iter().map(|m| count(m) as f64 / d as f64).collect();
    let overlaps = (0..d).filter(|&i| parts.iter().filter(|m| m[i]).count() > 1).count();

    let pairs = (d * d) as f64;
    let mut q_counts = vec![0usize; n];
    let mut join_count = 0usize;
    let mut violations = 0usize;
    for i in 0..d {
        for j in 0..d {
            let mut any = false;
            for k in 0..n {
                let v = jb.values(k);
                let in_q = upper.contains(v[i] - v[j], eps);
                if in_q {
                    q_counts[k] += 1;
                    any = true;
                } else if excited[k][i] && low[k][j] {
                    violations += 1;
                }
            }
            if any {
                join_count += 1;
            }
        }
    }
    Ok(StrongOutcome {
        tau_parts,
        ortho: if overlaps == 0 { 0.0 } else { 1.0 },
        idem: 0.0,
        tau_join_q: join_count as f64 / pairs,
        tau_q: q_counts.iter().map(|&c| c as f64 / pairs).collect(),
        domination: violations as f64 / pairs,
        degenerate_gap: None,
    })
}

/// `tau(e_[λ,∞)(x - m)) <= 2 tau(e_[λ,∞)(x^))` and
/// `tau(e_[λ,∞)(|x - m|)) <= 2 tau(e_[λ,∞)(|x^|)) <= 4 tau(e_[λ/2,∞)(|x - α|))`
/// with `m = med(x)`, also at `α = m`.
pub fn weak_symmetrization_verify(x: &HermitianOperator, lambda: f64, alpha: f64, cfg: &VerifierConfig) -> Result<InequalityReport> {
    if !lambda.is_finite() {
        return Err(Error::BadThreshold(lambda));
    }
    if !alpha.is_finite() {
        return Err(Error::BadAlpha(alpha));
    }
    let eps = cfg.tolerances.eps_bnd;
    let res = x.resolution()?;
    let m = TraceDistribution::from_resolution(&res).median();
    let centred = res.shifted(m);
    let diff = DifferenceSpectrum::new(res.clone());
    let upper = BorelInterval::at_least(lambda);
    let half = BorelInterval::at_least(lambda / 2.0);

    let one_sided = centred.trace_in(&upper, eps);
    let hat_one_sided = diff.trace_in(&upper, eps);
    let abs_centred = centred.absolute().trace_in(&upper, eps);
    let hat_abs = diff.abs_trace_in(&upper, eps);
    let alpha_tail = res.shifted(alpha).absolute().trace_in(&half, eps);
    let median_tail = centred.absolute().trace_in(&half, eps);

    let mut b = ReportBuilder::new("weak_symmetrization", cfg.tolerances.tol_check);
    b.parameter("lambda", lambda).parameter("alpha", alpha).parameter("median", m);
    b.trace("tau(e_[lambda,inf)(x - m))", one_sided)
        .trace("tau(e_[lambda,inf)(x^))", hat_one_sided)
        .trace("tau(e_[lambda,inf)(|x - m|))", abs_centred)
        .trace("tau(e_[lambda,inf)(|x^|))", hat_abs)
        .trace("tau(e_[lambda/2,inf)(|x - alpha|))", alpha_tail)
        .trace("tau(e_[lambda/2,inf)(|x - m|))", median_tail);
    b.bound("tau(e_[lambda,inf)(x - m)) <= 2 tau(e_[lambda,inf)(x^))", one_sided, 2.0 * hat_one_sided);
    b.bound("tau(e_[lambda,inf)(|x - m|)) <= 2 tau(e_[lambda,inf)(|x^|))", abs_centred, 2.0 * hat_abs);
    b.bound("2 tau(e_[lambda,inf)(|x^|)) <= 4 tau(e_[lambda/2,inf)(|x - alpha|))", 2.0 * hat_abs, 4.0 * alpha_tail);
    b.bound("2 tau(e_[lambda,inf)(|x^|)) <= 4 tau(e_[lambda/2,inf)(|x - m|))", 2.0 * hat_abs, 4.0 * median_tail);
    Ok(b.finish(abs_centred, 4.0 * alpha_tail))
}

/// `½ ||x - med(x)||_p^p <= ||x^||_p^p <= 2 K_p ||x - α||_p^p` with
/// `K_p = 2^{p-1}`.
pub fn lp_symmetrization_verify(x: &HermitianOperator, alpha: f64, p: f64, cfg: &VerifierConfig) -> Result<InequalityReport> {
    check_exponent(p)?;
    if !alpha.is_finite() {
        return Err(Error::BadAlpha(alpha));
    }
    let res = x.resolution()?;
    let m = TraceDistribution::from_resolution(&res).median();
    let centred = lp_power_of(&res.shifted(m), p);
    let hat = DifferenceSpectrum::new(res.clone()).lp_power(p);
    let shifted = lp_power_of(&res.shifted(alpha), p);
    let k_p = 2f64.powf(p - 1.0);

    let mut b = ReportBuilder::new("lp_symmetrization", cfg.tolerances.tol_check);
    b.parameter("alpha", alpha).parameter("p", p).parameter("median", m).parameter("K_p", k_p);
    b.trace("||x - m||_p^p", centred).trace("||x^||_p^p", hat).trace("||x - alpha||_p^p", shifted);
    b.bound("1/2 ||x - m||_p^p <= ||x^||_p^p", 0.5 * centred, hat);
    b.bound("||x^||_p^p <= 2 K_p ||x - alpha||_p^p", hat, 2.0 * k_p * shifted);
    Ok(b.finish(0.5 * centred, 2.0 * k_p * shifted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::independence::tensor_family;
    use crate::operator::C64;

    fn rademachers(n: usize) -> SumSequence {
        let z = HermitianOperator::diagonal(&[1.0, -1.0]);
        let fam = tensor_family(&vec![z; n], 256).unwrap();
        SumSequence::new(fam.members().to_vec()).unwrap()
    }

    fn bernoullis(n: usize) -> SumSequence {
        let z = HermitianOperator::diagonal(&[1.0, 0.0]);
        let fam = tensor_family(&vec![z; n], 256).unwrap();
        SumSequence::new(fam.members().to_vec()).unwrap()
    }

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn levy_two_rademachers() {
        let r = levy_verify(&rademachers(2), 0.5, &VerifierConfig::default()).unwrap();
        assert!(r.holds, "{r:#?}");
        assert!(r.invariants_ok(), "{:?}", r.failed_invariants().collect::<Vec<_>>());
        assert!(approx(r.trace("tau(p)").unwrap(), 0.5));
        assert!(approx(r.trace("max_k 2^(1-k) tau(e_(lambda,inf)(s_k))").unwrap(), 0.5));
        assert!(approx(r.rhs, 0.5));
        assert!(r.slack.abs() < 1e-12);
    }

    #[test]
    fn levy_above_the_spectrum() {
        let seq = SumSequence::new(vec![HermitianOperator::diagonal(&[1.0, -1.0])]).unwrap();
        let r = levy_verify(&seq, 2.0, &VerifierConfig::default()).unwrap();
        assert!(r.holds);
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert_eq!(r.trace("tau(q)"), Some(0.0));
    }

    #[test]
    fn levy_three_rademachers() {
        let r = levy_verify(&rademachers(3), 1.5, &VerifierConfig::default()).unwrap();
        assert!(r.holds && r.invariants_ok());
        assert!(approx(r.trace("tau(e_(lambda,inf)(s_n))").unwrap(), 0.125));
        assert!(approx(r.rhs, 0.25));
        // the walk exceeds 1.5 exactly when the first two steps agree and are +1
        assert!(approx(r.lhs, 0.25));
        assert!(approx(r.trace("tau(p)").unwrap() + r.trace("tau(q)").unwrap(), 0.5));
    }

    #[test]
    fn levy_threshold_and_hypotheses() {
        let cfg = VerifierConfig::default();
        assert!(matches!(levy_verify(&rademachers(2), 0.0, &cfg), Err(Error::BadThreshold(_))));
        assert!(matches!(levy_verify(&bernoullis(2), 0.5, &cfg), Err(Error::HypothesisFailed { .. })));
        let lax = VerifierConfig { enforce_hypotheses: false, ..cfg };
        let r = levy_verify(&bernoullis(2), 0.5, &lax).unwrap();
        assert!(!r.hypotheses_ok && !r.holds);
    }

    #[test]
    fn levy_witness_orthogonality() {
        let w = levy_witnesses(&rademachers(3), 0.5, &VerifierConfig::default()).unwrap();
        assert_eq!(w.p_parts.len(), 3);
        assert!(orthogonality_defect(&w.p_parts) < 1e-15);
        assert!(w.q_total.is_some());
    }

    #[test]
    fn ottaviani_bernoulli_pair() {
        // s_1 in {1, 0}, s_2 in {2, 1, 1, 0}; r_k = {|s_k| <= 0.8}
        let r = ottaviani_verify(&bernoullis(2), 0.4, &VerifierConfig::default()).unwrap();
        assert!(r.holds, "{r:#?}");
        // p = {s_1 = 1} or {s_1 = 0, s_2 = 1}: 3/4
        assert!(approx(r.lhs, 0.75));
        // t_1 = {|x_2| <= 0.2} has trace 1/2, t_2 = 1
        assert!(approx(r.trace("M_lambda").unwrap(), 2.0));
        assert!(approx(r.rhs, 2.0 * 0.75));
    }

    #[test]
    fn ottaviani_vacuous_when_no_small_increments() {
        let r = ottaviani_verify(&rademachers(2), 0.5, &VerifierConfig::default()).unwrap();
        assert!(r.vacuous && r.holds);
        assert_eq!(r.trace("M_lambda"), Some(f64::INFINITY));
    }

    #[test]
    fn ottaviani_single_step() {
        let seq = SumSequence::new(vec![HermitianOperator::diagonal(&[3.0, 0.5, -2.0, 0.0])]).unwrap();
        let r = ottaviani_verify(&seq, 1.0, &VerifierConfig::default()).unwrap();
        assert!(r.holds && !r.vacuous);
        assert!(approx(r.lhs, 0.25));
        assert!(approx(r.rhs, 0.5));
    }

    #[test]
    fn levy_skorohod_rademacher_pair() {
        let r = levy_skorohod_verify(&rademachers(2), 0.5, 0.5, &VerifierConfig::default()).unwrap();
        assert!(r.holds && r.invariants_ok(), "{r:#?}");
        assert!(approx(r.lhs, 0.5));
        // t_1 = {x_2 >= -1/4}: 1/2, t_2 = 1, so M = 2; P(s_2 > 1/4) = 1/4
        assert!(approx(r.trace("M_lambda").unwrap(), 2.0));
        assert!(approx(r.rhs, 0.5));
    }

    #[test]
    fn levy_skorohod_alpha_domain() {
        let cfg = VerifierConfig::default();
        for a in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(levy_skorohod_verify(&rademachers(2), 0.5, a, &cfg), Err(Error::BadAlpha(_))));
        }
    }

    #[test]
    fn strong_single_bernoulli() {
        let x = HermitianOperator::diagonal(&[0.0, 1.0]);
        let r = strong_symmetrization_verify(&[x], 0.5, &VerifierConfig::default()).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs, 0.0);
        assert!(approx(r.rhs, 0.5));
    }

    #[test]
    fn strong_constant() {
        let r = strong_symmetrization_verify(&[HermitianOperator::scalar(3, 2.5)], 0.3, &VerifierConfig::default()).unwrap();
        assert!(r.holds);
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn strong_engines_agree() {
        let x = HermitianOperator::new(
            CMatrix::from_row_slice(2, 2, &[C64::new(0.2, 0.0), C64::new(0.3, 0.4), C64::new(0.3, -0.4), C64::new(-1.0, 0.0)]),
            1e-12,
        )
        .unwrap();
        let y = HermitianOperator::diagonal(&[2.0, -0.5]);
        let fam = tensor_family(&[x, y], 256).unwrap();
        let cfg = VerifierConfig::default();
        for lambda in [-0.5, 0.1, 0.7, 1.4] {
            let a = strong_symmetrization_verify_with(fam.members(), lambda, &cfg, SymmetrizationEngine::JointEigenbasis)
                .unwrap();
            let b = strong_symmetrization_verify_with(fam.members(), lambda, &cfg, SymmetrizationEngine::DoubledMatrices)
                .unwrap();
            assert!(a.holds && b.holds && a.invariants_ok() && b.invariants_ok());
            assert!((a.lhs - b.lhs).abs() < 1e-9 && (a.rhs - b.rhs).abs() < 1e-9, "lambda {lambda}: {a:?} {b:?}");
        }
    }

    #[test]
    fn strong_noncommuting_pair_uses_doubled_matrices() {
        let x = HermitianOperator::diagonal(&[1.0, 0.0]);
        let y = HermitianOperator::new(
            CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
            1e-12,
        )
        .unwrap();
        let r = strong_symmetrization_verify(&[x, y], 0.5, &VerifierConfig::default()).unwrap();
        assert!(r.holds, "{r:#?}");
        assert!(r.notes.iter().any(|n| n.contains("doubled")));
    }

    #[test]
    fn weak_symmetrization_bernoulli() {
        let x = HermitianOperator::diagonal(&[0.0, 1.0]);
        let r = weak_symmetrization_verify(&x, 0.5, 1.0, &VerifierConfig::default()).unwrap();
        assert!(r.holds);
        assert_eq!(r.trace("tau(e_[lambda,inf)(x - m))"), Some(0.0));
        assert_eq!(r.trace("tau(e_[lambda,inf)(|x - m|))"), Some(0.5));
        assert_eq!(r.trace("tau(e_[lambda,inf)(|x^|))"), Some(0.5));
        assert_eq!(r.rhs, 2.0);
    }

    #[test]
    fn weak_symmetrization_constant() {
        let r = weak_symmetrization_verify(&HermitianOperator::scalar(2, -1.0), 0.25, 0.0, &VerifierConfig::default())
            .unwrap();
        assert!(r.holds);
        assert_eq!(r.trace("tau(e_[lambda,inf)(|x^|))"), Some(0.0));
        assert_eq!(r.trace("tau(e_[lambda,inf)(|x - m|))"), Some(0.0));
    }

    #[test]
    fn lp_symmetrization_examples() {
        let cfg = VerifierConfig::default();
        let r = lp_symmetrization_verify(&HermitianOperator::diagonal(&[-1.0, 1.0]), 0.0, 2.0, &cfg).unwrap();
        assert!(r.holds);
        assert!(approx(r.lhs, 1.0) && approx(r.trace("||x^||_p^p").unwrap(), 2.0) && approx(r.rhs, 4.0));

        let r = lp_symmetrization_verify(&HermitianOperator::scalar(3, 0.7), 0.7, 3.0, &cfg).unwrap();
        assert!(r.holds);
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));

        assert!(matches!(
            lp_symmetrization_verify(&HermitianOperator::scalar(2, 0.0), 0.0, 0.5, &cfg),
            Err(Error::BadExponent(_))
        ));
    }

    #[test]
    fn sequence_caches_independence() {
        let seq = rademachers(2);
        let opts = VerifierConfig::default().independence_options();
        let a = seq.independence(&opts).unwrap();
        let b = seq.independence(&opts).unwrap();
        assert_eq!(a, b);
        assert!(a.passed);
    }
}
