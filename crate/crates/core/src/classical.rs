//! Discrete classical random variables as commuting diagonal operators, and an
//! exact enumeration oracle for the maximal events.
//!
//! A variable whose probabilities are `num / den` becomes a diagonal matrix on
//! a slot of dimension `L = lcm(den)`, with outcome `j` repeated
//! `num_j L / den_j` times. Under `tr / L` its spectral projections then carry
//! exactly the outcome probabilities, and the tensor family of the slots is the
//! product probability space.

use serde::{Deserialize, Serialize};

use crate::independence::{tensor_family, TensorFamily};
use crate::maximal::{levy_skorohod_verify, levy_verify, strong_symmetrization_verify, SumSequence, VerifierConfig};
use crate::operator::BorelInterval;
use crate::report::InequalityReport;
use crate::serde_ext::ext_real;
use crate::{Error, HermitianOperator, Result};

/// Largest slot dimension (common denominator) per variable.
pub const SLOT_CAP: u64 = 64;

/// Tolerance for the oracle-versus-operator comparisons.
pub const AGREEMENT_TOL: f64 = 1e-12;

/// Outcomes `(value, num, den)`: the variable equals `value` with
/// probability `num / den`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteVariable {
    pub outcomes: Vec<(f64, u64, u64)>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm_capped(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

impl DiscreteVariable {
    pub fn new(outcomes: Vec<(f64, u64, u64)>) -> Result<Self> {
        let v = Self { outcomes };
        v.validate(0)?;
        Ok(v)
    }

    /// `±1` with probability one half each.
    pub fn rademacher() -> Self {
        Self { outcomes: vec![(1.0, 1, 2), (-1.0, 1, 2)] }
    }

    /// `1` with probability `num / den`, else `0`.
    pub fn bernoulli(num: u64, den: u64) -> Result<Self> {
        if num == 0 || num >= den {
            return Err(Error::BadVariable { variable: 0, reason: format!("success probability {num}/{den} not in (0,1)") });
        }
        Self::new(vec![(0.0, den - num, den), (1.0, num, den)])
    }

    fn validate(&self, index: usize) -> Result<()> {
        let bad = |reason: String| Error::BadVariable { variable: index, reason };
        if self.outcomes.is_empty() {
            return Err(bad("no outcomes".into()));
        }
        for &(v, num, den) in &self.outcomes {
            if !v.is_finite() {
                return Err(bad(format!("non-finite value {v}")));
            }
            if num == 0 || den == 0 {
                return Err(bad(format!("probability {num}/{den} is not positive")));
            }
        }
        let l = self.common_denominator().ok_or_else(|| bad("denominators overflow".into()))?;
        let total: u128 = self.outcomes.iter().map(|&(_, num, den)| num as u128 * (l / den) as u128).sum();
        if total != l as u128 {
            return Err(bad(format!("probabilities sum to {total}/{l}")));
        }
        Ok(())
    }

    fn common_denominator(&self) -> Option<u64> {
        self.outcomes.iter().try_fold(1u64, |acc, &(_, _, den)| lcm_capped(acc, den))
    }

    /// Slot dimension `lcm(den)`; `NonUniformizable` above [`SLOT_CAP`].
    pub fn slot_dim(&self) -> Result<u64> {
        match self.common_denominator() {
            Some(l) if l <= SLOT_CAP => Ok(l),
            _ => Err(Error::NonUniformizable { variable: 0, cap: SLOT_CAP as usize }),
        }
    }

    /// Repetitions of each outcome on its slot.
    pub fn multiplicities(&self) -> Result<Vec<u64>> {
        let l = self.slot_dim()?;
        Ok(self.outcomes.iter().map(|&(_, num, den)| num * (l / den)).collect())
    }

    pub fn probability(&self, outcome: usize) -> f64 {
        let (_, num, den) = self.outcomes[outcome];
        num as f64 / den as f64
    }

    pub fn embed_diagonal(&self) -> Result<HermitianOperator> {
        let mult = self.multiplicities()?;
        let diag: Vec<f64> =
            self.outcomes.iter().zip(&mult).flat_map(|(&(v, _, _), &m)| std::iter::repeat_n(v, m as usize)).collect();
        Ok(HermitianOperator::diagonal(&diag))
    }

    /// `(value, count)` with equal values merged, sorted by value; counts are
    /// out of [`Self::slot_dim`].
    fn atoms(&self) -> Result<Vec<(f64, u64)>> {
        let mult = self.multiplicities()?;
        let mut atoms: Vec<(f64, u64)> = self.outcomes.iter().zip(mult).map(|(&(v, _, _), m)| (v, m)).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, u64)> = Vec::with_capacity(atoms.len());
        for (v, m) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => merged.push((v, m)),
            }
        }
        Ok(merged)
    }

    /// `X` and `-X` have the same law, compared exactly.
    pub fn is_symmetric(&self) -> Result<bool> {
        let atoms = self.atoms()?;
        Ok(atoms.iter().zip(atoms.iter().rev()).all(|(a, b)| a.0 == -b.0 && a.1 == b.1))
    }

    /// `sup { v : P(X >= v) >= 1/2 }`.
    pub fn median(&self) -> Result<f64> {
        let l = self.slot_dim()?;
        let mut tail = 0u64;
        for (v, m) in self.atoms()?.into_iter().rev() {
            tail += m;
            if 2 * tail >= l {
                return Ok(v);
            }
        }
        unreachable!("counts sum to the slot dimension")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalInstance {
    pub variables: Vec<DiscreteVariable>,
}

impl ClassicalInstance {
    pub fn new(variables: Vec<DiscreteVariable>) -> Result<Self> {
        let inst = Self { variables };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.variables.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for (i, v) in self.variables.iter().enumerate() {
            v.validate(i)?;
            v.slot_dim().map_err(|_| Error::NonUniformizable { variable: i, cap: SLOT_CAP as usize })?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    /// Number of outcome tuples.
    pub fn sample_space_size(&self) -> u128 {
        self.variables.iter().map(|v| v.outcomes.len() as u128).product()
    }

    /// Product of the slot dimensions: the common denominator of every event
    /// probability.
    pub fn total_weight(&self) -> Result<u128> {
        self.variables.iter().try_fold(1u128, |acc, v| Ok(acc * v.slot_dim()? as u128))
    }

    fn check_size(&self, size: u128, cap: u64) -> Result<()> {
        if size > cap as u128 {
            Err(Error::CapExceeded { size, cap })
        } else {
            Ok(())
        }
    }

    /// Visits every outcome tuple with its weight out of [`Self::total_weight`].
    fn for_each_path(&self, mut visit: impl FnMut(&[f64], u128)) -> Result<()> {
        let mults = self.variables.iter().map(DiscreteVariable::multiplicities).collect::<Result<Vec<_>>>()?;
        let n = self.variables.len();
        let mut idx = vec![0usize; n];
        let mut values = vec![0.0; n];
        loop {
            let mut w = 1u128;
            for k in 0..n {
                values[k] = self.variables[k].outcomes[idx[k]].0;
                w *= mults[k][idx[k]] as u128;
            }
            visit(&values, w);
            let mut k = n;
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < self.variables[k].outcomes.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

/// Variable `k` as a diagonal operator on slot `k`.
pub fn diagonal_embedding(inst: &ClassicalInstance, dim_cap: usize) -> Result<TensorFamily> {
    inst.validate()?;
    let locals = inst.variables.iter().map(DiscreteVariable::embed_diagonal).collect::<Result<Vec<_>>>()?;
    tensor_family(&locals, dim_cap)
}

/// Weight of the tuples satisfying `event`, and the total weight.
pub fn exact_event_count(inst: &ClassicalInstance, cap: u64, mut event: impl FnMut(&[f64]) -> bool) -> Result<(u128, u128)> {
    inst.validate()?;
    inst.check_size(inst.sample_space_size(), cap)?;
    let mut hit = 0u128;
    inst.for_each_path(|v, w| {
        if event(v) {
            hit += w;
        }
    })?;
    Ok((hit, inst.total_weight()?))
}

pub fn exact_event_probability(inst: &ClassicalInstance, cap: u64, event: impl FnMut(&[f64]) -> bool) -> Result<f64> {
    let (hit, total) = exact_event_count(inst, cap, event)?;
    Ok(hit as f64 / total as f64)
}

/// `S_1, ..., S_n`, summed in the same order as the operator partial sums.
pub fn partial_sums(values: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    values
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corollary {
    /// `P(max S_k > λ) <= 2 P(S_n > λ)`.
    Levy,
    /// `P(max |S_k| > λ) <= 2 P(|S_n| > λ)`.
    LevyAbs,
    /// `P(max S_k > λ) <= P(S_n > αλ) / min_k P(S_n - S_k >= -(1-α)λ)`.
    LevySkorohod,
    /// `P(max (X_k - med X_k) >= λ) <= 2 P(max (X_k - X_k') >= λ)`.
    StrongSymmetrization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub label: String,
    #[serde(with = "ext_real")]
    pub classical: f64,
    #[serde(with = "ext_real")]
    pub noncommutative: f64,
    #[serde(with = "ext_real")]
    pub deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub corollary: Corollary,
    #[serde(with = "ext_real")]
    pub lambda: f64,
    pub alpha: Option<f64>,
    #[serde(with = "ext_real")]
    pub classical_lhs: f64,
    #[serde(with = "ext_real")]
    pub classical_rhs: f64,
    /// Decided on integer weights, without tolerance.
    pub classical_holds: bool,
    pub classical_vacuous: bool,
    pub noncommutative: InequalityReport,
    pub agreements: Vec<Agreement>,
    pub agreement_ok: bool,
    pub holds: bool,
}

struct Agreements(Vec<Agreement>);

impl Agreements {
    fn push(&mut self, label: impl Into<String>, classical: f64, noncommutative: Option<f64>) {
        let nc = noncommutative.unwrap_or(f64::NAN);
        let deviation = if classical == nc { 0.0 } else { (classical - nc).abs() };
        self.0.push(Agreement {
            label: label.into(),
            classical,
            noncommutative: nc,
            deviation,
            passed: deviation <= AGREEMENT_TOL,
        });
    }
}

fn ratio(hit: u128, total: u128) -> f64 {
    hit as f64 / total as f64
}

/// Evaluates a classical corollary by exact enumeration and through the
/// operator verifier on the diagonal embedding, and compares the two.
pub fn classical_corollary_check(
    inst: &ClassicalInstance,
    corollary: Corollary,
    lambda: f64,
    alpha: Option<f64>,
    cfg: &VerifierConfig,
) -> Result<CorollaryReport> {
    inst.validate()?;
    let family = diagonal_embedding(inst, cfg.caps.dim_cap)?;
    let seq = SumSequence::new(family.members().to_vec())?;
    classical_corollary_check_on(inst, &seq, corollary, lambda, alpha, cfg)
}

/// [`classical_corollary_check`] with a caller-supplied sum sequence, so that
/// a threshold sweep shares its spectral data. `seq` must hold the increments
/// of [`diagonal_embedding`]; a mismatch is reported as `DimMismatch`.
pub fn classical_corollary_check_on(
    inst: &ClassicalInstance,
    seq: &SumSequence,
    corollary: Corollary,
    lambda: f64,
    alpha: Option<f64>,
    cfg: &VerifierConfig,
) -> Result<CorollaryReport> {
    inst.validate()?;
    let expected = usize::try_from(inst.total_weight()?).unwrap_or(usize::MAX);
    if seq.len() != inst.len() || seq.dim() != expected {
        return Err(Error::DimMismatch { expected, found: seq.dim() });
    }
    let cap = cfg.caps.enumeration_cap;
    if matches!(corollary, Corollary::Levy | Corollary::LevyAbs) {
        for (i, v) in inst.variables.iter().enumerate() {
            if !v.is_symmetric()? {
                return Err(Error::HypothesisFailed { hypothesis: format!("variable {} symmetric", i + 1), deviation: 1.0 });
            }
        }
    }
    let eps = cfg.tolerances.eps_bnd;
    let n = inst.len();
    let mut agree = Agreements(Vec::new());

    let (classical_lhs, classical_rhs, classical_holds, classical_vacuous, noncommutative) = match corollary {
        Corollary::Levy | Corollary::LevyAbs => {
            let above = BorelInterval::above(lambda);
            let nc = levy_verify(seq, lambda, cfg)?;
            let mut parts_p = vec![0u128; n];
            let mut parts_q = vec![0u128; n];
            let mut tails = [0u128; 3];
            let mut exceed = vec![[0u128; 3]; n];
            let mut maxima = [0u128; 3];
            inst.check_size(inst.sample_space_size(), cap)?;
            let total = inst.total_weight()?;
            inst.for_each_path(|v, w| {
                let s = partial_sums(v);
                let sn = s[n - 1];
                for (slot, val) in [sn, -sn, sn.abs()].into_iter().enumerate() {
                    if above.contains(val, eps) {
                        tails[slot] += w;
                    }
                }
                for (k, &x) in s.iter().enumerate() {
                    for (slot, val) in [x, -x, x.abs()].into_iter().enumerate() {
                        if above.contains(val, eps) {
                            exceed[k][slot] += w;
                        }
                    }
                }
                for (slot, f) in [|x: f64| x, |x: f64| -x, f64::abs].into_iter().enumerate() {
                    if let Some(k) = s.iter().position(|&x| above.contains(f(x), eps)) {
                        maxima[slot] += w;
                        match slot {
                            0 => parts_p[k] += w,
                            1 => parts_q[k] += w,
                            _ => {}
                        }
                    }
                }
            })?;
            let weighted_max = |slot: usize| {
                (0..n).map(|k| 0.5_f64.powi(k as i32) * ratio(exceed[k][slot], total)).fold(0.0, f64::max)
            };
            for k in 0..n {
                agree.push(format!("tau(p_{0}) = P(P_{0})", k + 1), ratio(parts_p[k], total), nc.trace(&format!("tau(p_{})", k + 1)));
            }
            agree.push("tau(p) = P(max S_k > lambda)", ratio(maxima[0], total), nc.trace("tau(p)"));
            agree.push(
                "tau(e_(lambda,inf)(s_n)) = P(S_n > lambda)",
                ratio(tails[0], total),
                nc.trace("tau(e_(lambda,inf)(s_n))"),
            );
            agree.push(
                "max_k 2^(1-k) tau(e_(lambda,inf)(s_k))",
                weighted_max(0),
                nc.trace("max_k 2^(1-k) tau(e_(lambda,inf)(s_k))"),
            );
            if corollary == Corollary::Levy {
                agree.push("noncommutative lhs", ratio(maxima[0], total), Some(nc.lhs));
                agree.push("noncommutative rhs", 2.0 * ratio(tails[0], total), Some(nc.rhs));
                (ratio(maxima[0], total), 2.0 * ratio(tails[0], total), maxima[0] <= 2 * tails[0], false, nc)
            } else {
                for k in 0..n {
                    agree.push(
                        format!("tau(q_{0}) = P(Q_{0})", k + 1),
                        ratio(parts_q[k], total),
                        nc.trace(&format!("tau(q_{})", k + 1)),
                    );
                }
                agree.push("tau(q) = P(max -S_k > lambda)", ratio(maxima[1], total), nc.trace("tau(q)"));
                agree.push("tau(p or q) = P(max |S_k| > lambda)", ratio(maxima[2], total), nc.trace("tau(p or q)"));
                agree.push(
                    "tau(e_(lambda,inf)(|s_n|)) = P(|S_n| > lambda)",
                    ratio(tails[2], total),
                    nc.trace("tau(e_(lambda,inf)(|s_n|))"),
                );
                agree.push(
                    "max_k 2^(1-k) tau(e_(lambda,inf)(|s_k|))",
                    weighted_max(2),
                    nc.trace("max_k 2^(1-k) tau(e_(lambda,inf)(|s_k|))"),
                );
                (ratio(maxima[2], total), 2.0 * ratio(tails[2], total), maxima[2] <= 2 * tails[2], false, nc)
            }
        }
        Corollary::LevySkorohod => {
            let alpha = alpha.ok_or(Error::BadAlpha(f64::NAN))?;
            let nc = levy_skorohod_verify(seq, lambda, alpha, cfg)?;
            let above = BorelInterval::above(lambda);
            let target = BorelInterval::above(alpha * lambda);
            let stay = BorelInterval::at_least(-(1.0 - alpha) * lambda);
            inst.check_size(inst.sample_space_size(), cap)?;
            let total = inst.total_weight()?;
            let mut parts = vec![0u128; n];
            let mut stays = vec![0u128; n];
            let mut maximum = 0u128;
            let mut tail = 0u128;
            inst.for_each_path(|v, w| {
                let s = partial_sums(v);
                let sn = s[n - 1];
                if target.contains(sn, eps) {
                    tail += w;
                }
                for (k, &x) in s.iter().enumerate() {
                    if stay.contains(sn - x, eps) {
                        stays[k] += w;
                    }
                }
                if let Some(k) = s.iter().position(|&x| above.contains(x, eps)) {
                    parts[k] += w;
                    maximum += w;
                }
            })?;
            let min_stay = stays.iter().copied().min().unwrap_or(0);
            for k in 0..n {
                agree.push(format!("tau(p_{0}) = P(P_{0})", k + 1), ratio(parts[k], total), nc.trace(&format!("tau(p_{})", k + 1)));
                agree.push(format!("tau(tp_{0}) = P(T_{0})", k + 1), ratio(stays[k], total), nc.trace(&format!("tau(tp_{})", k + 1)));
            }
            agree.push("tau(p) = P(max S_k > lambda)", ratio(maximum, total), nc.trace("tau(p)"));
            agree.push(
                "tau(e_(alpha lambda,inf)(s_n)) = P(S_n > alpha lambda)",
                ratio(tail, total),
                nc.trace("tau(e_(alpha lambda,inf)(s_n))"),
            );
            let vacuous = min_stay == 0;
            let rhs = if vacuous { f64::INFINITY } else { tail as f64 / min_stay as f64 };
            agree.push("M_lambda", if vacuous { f64::INFINITY } else { ratio(total, min_stay) }, nc.trace("M_lambda"));
            agree.push("noncommutative lhs", ratio(maximum, total), Some(nc.lhs));
            agree.push("noncommutative rhs", rhs, Some(nc.rhs));
            let holds = vacuous || maximum * min_stay <= total * tail;
            (ratio(maximum, total), rhs, holds, vacuous, nc)
        }
        Corollary::StrongSymmetrization => {
            let size = inst.sample_space_size();
            inst.check_size(size.saturating_mul(size), cap)?;
            let nc = strong_symmetrization_verify(seq.xs(), lambda, cfg)?;
            let medians = inst.variables.iter().map(DiscreteVariable::median).collect::<Result<Vec<_>>>()?;
            let upper = BorelInterval::at_least(lambda);
            let total = inst.total_weight()?;
            let mut paths: Vec<(Vec<f64>, u128)> = Vec::new();
            inst.for_each_path(|v, w| paths.push((v.to_vec(), w)))?;
            let mut parts = vec![0u128; n];
            let mut maximum = 0u128;
            for (v, w) in &paths {
                if let Some(k) = (0..n).position(|k| upper.contains(v[k] - medians[k], eps)) {
                    parts[k] += w;
                    maximum += w;
                }
            }
            let mut q = vec![0u128; n];
            let mut joined = 0u128;
            for (a, wa) in &paths {
                for (b, wb) in &paths {
                    let mut any = false;
                    for k in 0..n {
                        if upper.contains(a[k] - b[k], eps) {
                            q[k] += wa * wb;
                            any = true;
                        }
                    }
                    if any {
                        joined += wa * wb;
                    }
                }
            }
            let total2 = total * total;
            for k in 0..n {
                agree.push(format!("tau(p_{0}) = P(P_{0})", k + 1), ratio(parts[k], total), nc.trace(&format!("tau(p_{})", k + 1)));
                agree.push(
                    format!("tau(q_{0}) = P(X_{0} - X_{0}' >= lambda)", k + 1),
                    ratio(q[k], total2),
                    nc.trace(&format!("tau(q_{})", k + 1)),
                );
            }
            agree.push("tau(p) = P(max (X_k - med X_k) >= lambda)", ratio(maximum, total), nc.trace("tau(p)"));
            agree.push("tau(join q_k) = P(max (X_k - X_k') >= lambda)", ratio(joined, total2), nc.trace("tau(join q_k)"));
            agree.push("noncommutative rhs", 2.0 * ratio(joined, total2), Some(nc.rhs));
            (ratio(maximum, total), 2.0 * ratio(joined, total2), maximum * total <= 2 * joined, false, nc)
        }
    };
    let agreement_ok = agree.0.iter().all(|a| a.passed);
    let holds = classical_holds && noncommutative.holds && agreement_ok;
    Ok(CorollaryReport {
        corollary,
        lambda,
        alpha,
        classical_lhs,
        classical_rhs,
        classical_holds,
        classical_vacuous,
        noncommutative,
        agreements: agree.0,
        agreement_ok,
        holds,
    })
}
