//! Verifier output.

use serde::{Deserialize, Serialize};

use crate::serde_ext::ext_real;

/// A labelled numeric value, e.g. the trace of a witness projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub label: String,
    #[serde(with = "ext_real")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    #[serde(with = "ext_real")]
    pub deviation: f64,
    /// Accepted, but inside the warning band.
    pub warning: bool,
}

/// One displayed inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub label: String,
    #[serde(with = "ext_real")]
    pub lhs: f64,
    #[serde(with = "ext_real")]
    pub rhs: f64,
    #[serde(with = "ext_real")]
    pub slack: f64,
    pub passed: bool,
    /// The right-hand side is `+inf`; nothing was asserted.
    pub vacuous: bool,
}

/// A step of a proof checked on the constructed witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub label: String,
    pub passed: bool,
    #[serde(with = "ext_real")]
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub parameters: Vec<Trace>,
    pub hypothesis_checks: Vec<HypothesisCheck>,
    pub hypotheses_ok: bool,
    /// Left side of the headline inequality.
    #[serde(with = "ext_real")]
    pub lhs: f64,
    /// Right side of the headline inequality (`inf` when vacuous).
    #[serde(with = "ext_real")]
    pub rhs: f64,
    pub bounds: Vec<BoundCheck>,
    pub witness_traces: Vec<Trace>,
    pub internal_invariants: Vec<InvariantCheck>,
    pub holds: bool,
    /// Smallest `rhs - lhs` over the non-vacuous bounds.
    #[serde(with = "ext_real")]
    pub slack: f64,
    pub vacuous: bool,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl InequalityReport {
    pub fn trace(&self, label: &str) -> Option<f64> {
        self.witness_traces.iter().find(|t| t.label == label).map(|t| t.value)
    }

    pub fn bound(&self, label: &str) -> Option<&BoundCheck> {
        self.bounds.iter().find(|b| b.label == label)
    }

    pub fn invariants_ok(&self) -> bool {
        self.internal_invariants.iter().all(|c| c.passed)
    }

    pub fn failed_invariants(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.internal_invariants.iter().filter(|c| !c.passed)
    }
}

/// Accumulates checks and derives `holds`, `slack` and `vacuous`.
#[derive(Debug)]
pub(crate) struct ReportBuilder {
    report: InequalityReport,
    tol_check: f64,
}

impl ReportBuilder {
    pub fn new(name: &str, tol_check: f64) -> Self {
        Self {
            report: InequalityReport {
                name: name.to_string(),
                parameters: Vec::new(),
                hypothesis_checks: Vec::new(),
                hypotheses_ok: true,
                lhs: 0.0,
                rhs: 0.0,
                bounds: Vec::new(),
                witness_traces: Vec::new(),
                internal_invariants: Vec::new(),
                holds: false,
                slack: f64::INFINITY,
                vacuous: false,
                warnings: Vec::new(),
                notes: Vec::new(),
            },
            tol_check,
        }
    }

    pub fn tol_check(&self) -> f64 {
        self.tol_check
    }

    pub fn parameter(&mut self, label: &str, value: f64) -> &mut Self {
        self.report.parameters.push(Trace { label: label.into(), value });
        self
    }

    pub fn hypothesis(&mut self, check: HypothesisCheck) -> &mut Self {
        if check.warning {
            self.report
                .warnings
                .push(format!("hypothesis `{}` accepted with deviation {:e}", check.name, check.deviation));
        }
        self.report.hypotheses_ok &= check.passed;
        self.report.hypothesis_checks.push(check);
        self
    }

    /// Records `lhs <= rhs`; an infinite `rhs` is recorded as vacuous.
    pub fn bound(&mut self, label: &str, lhs: f64, rhs: f64) -> &mut Self {
        let vacuous = rhs == f64::INFINITY;
        let slack = rhs - lhs;
        let passed = vacuous || slack >= -self.tol_check;
        self.report.bounds.push(BoundCheck { label: label.into(), lhs, rhs, slack, passed, vacuous });
        self
    }

    pub fn trace(&mut self, label: impl Into<String>, value: f64) -> &mut Self {
        self.report.witness_traces.push(Trace { label: label.into(), value });
        self
    }

    pub fn invariant(&mut self, label: impl Into<String>, passed: bool, deviation: f64) -> &mut Self {
        self.report.internal_invariants.push(InvariantCheck { label: label.into(), passed, deviation });
        self
    }

    /// Records `lhs <= rhs + tol_check` as an internal invariant.
    pub fn invariant_le(&mut self, label: impl Into<String>, lhs: f64, rhs: f64) -> &mut Self {
        let excess = (lhs - rhs).max(0.0);
        let tol = self.tol_check;
        self.invariant(label, lhs <= rhs + tol, excess)
    }

    pub fn warning(&mut self, message: impl Into<String>) -> &mut Self {
        self.report.warnings.push(message.into());
        self
    }

    pub fn note(&mut self, message: impl Into<String>) -> &mut Self {
        self.report.notes.push(message.into());
        self
    }

    pub fn finish(mut self, lhs: f64, rhs: f64) -> InequalityReport {
        let r = &mut self.report;
        r.lhs = lhs;
        r.rhs = rhs;
        r.vacuous = r.bounds.iter().any(|b| b.vacuous);
        r.slack = r.bounds.iter().filter(|b| !b.vacuous).map(|b| b.slack).fold(f64::INFINITY, f64::min);
        r.holds = r.hypotheses_ok && r.bounds.iter().all(|b| b.passed);
        self.report
    }
}

/// Three-band hypothesis classification: accept, accept with warning, reject.
pub(crate) fn banded_check(name: &str, deviation: f64, accept: f64, warn: f64) -> HypothesisCheck {
    let passed = deviation < warn;
    HypothesisCheck { name: name.into(), passed, deviation, warning: passed && deviation >= accept }
}
