//! Four non-commuting 3x3 increments whose total is `2 * identity`.

use qprob_core::maximal::{levy_verify, SumSequence, VerifierConfig};
use qprob_core::operator::{max_abs, CMatrix, C64};
use qprob_core::report::InequalityReport;
use qprob_core::HermitianOperator;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const ROWS: [[[C64; 3]; 3]; 4] = [
    [[c(1., 0.), c(1., -1.), c(0., 0.)], [c(1., 1.), c(3., 0.), c(0., 1.)], [c(0., 0.), c(0., -1.), c(-1., 0.)]],
    [[c(0., 0.), c(-1., 0.), c(0., -1.)], [c(-1., 0.), c(1., 0.), c(0., 2.)], [c(0., 1.), c(0., -2.), c(3., 0.)]],
    [[c(3., 0.), c(0., 2.), c(1., 1.)], [c(0., -2.), c(-2., 0.), c(1., 0.)], [c(1., -1.), c(1., 0.), c(2., 0.)]],
    [[c(-2., 0.), c(0., -1.), c(-1., 0.)], [c(0., 1.), c(0., 0.), c(-1., -3.)], [c(-1., 0.), c(-1., 3.), c(-2., 0.)]],
];

pub fn remark_operators() -> Vec<HermitianOperator> {
    ROWS.iter()
        .map(|rows| {
            let flat: Vec<C64> = rows.iter().flatten().copied().collect();
            HermitianOperator::new(CMatrix::from_row_slice(3, 3, &flat), 1e-15).expect("entries are Hermitian")
        })
        .collect()
}

pub fn remark_example() -> SumSequence {
    SumSequence::new(remark_operators()).expect("four 3x3 increments")
}

/// Threshold used by the demo.
pub const DEMO_LAMBDA: f64 = 1.0;
const EXACT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemarkReport {
    /// Max entry of `s_4 - 2 * identity`.
    pub total_deviation: f64,
    /// `max_k` max entry of `s_k s_4 - s_4 s_k`.
    pub commutation_deviation: f64,
    /// Max entry of `x_1 x_2 - x_2 x_1`.
    pub commutator_x1_x2: f64,
    pub lambda: f64,
    /// Levy construction run with hypotheses recorded, not enforced.
    pub levy: InequalityReport,
    pub witnesses_orthogonal: bool,
    pub mechanics_ok: bool,
}

pub fn run_demo() -> Result<RemarkReport, HarnessError> {
    let seq = remark_example();
    let xs = seq.xs();
    let total = seq.total();
    let total_deviation = max_abs(&(total.matrix() - CMatrix::identity(3, 3).scale(2.0)));
    let commutation_deviation = seq
        .partial_sums()
        .iter()
        .map(|s| total.commutator_norm(s))
        .collect::<qprob_core::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let commutator_x1_x2 = xs[0].commutator_norm(&xs[1])?;

    let cfg = VerifierConfig { enforce_hypotheses: false, ..VerifierConfig::default() };
    let levy = levy_verify(&seq, DEMO_LAMBDA, &cfg)?;
    let witnesses_orthogonal = levy
        .internal_invariants
        .iter()
        .filter(|c| c.label.contains("pairwise orthogonal") || c.label.contains("is a projection"))
        .all(|c| c.passed);
    let mechanics_ok =
        total_deviation <= EXACT && commutation_deviation <= EXACT && commutator_x1_x2 > 0.5 && witnesses_orthogonal;
    Ok(RemarkReport {
        total_deviation,
        commutation_deviation,
        commutator_x1_x2,
        lambda: DEMO_LAMBDA,
        levy,
        witnesses_orthogonal,
        mechanics_ok,
    })
}
