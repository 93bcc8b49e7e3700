#![allow(dead_code)]

use qprob_core::operator::{CMatrix, C64};
use qprob_core::{HermitianOperator, Projection};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(d: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(d, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn hermitian_matrix(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = gaussian(d, d, rng);
    (&g + g.adjoint()).map(|z| z * 0.5)
}

pub fn hermitian(d: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    HermitianOperator::new(hermitian_matrix(d, rng), 1e-12).unwrap()
}

pub fn unitary(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    gaussian(d, d, rng).qr().q()
}

/// `u diag(values) u*` for a random unitary `u`.
pub fn with_spectrum(values: &[f64], rng: &mut ChaCha8Rng) -> HermitianOperator {
    let d = values.len();
    let u = unitary(d, rng);
    let diag = CMatrix::from_fn(d, d, |i, j| if i == j { C64::new(values[i], 0.0) } else { C64::new(0.0, 0.0) });
    conjugate(&diag, &u)
}

pub fn conjugate(m: &CMatrix, u: &CMatrix) -> HermitianOperator {
    let c = u * m * u.adjoint();
    let c = (&c + c.adjoint()).map(|z| z * 0.5);
    HermitianOperator::new(c, 1e-12).unwrap()
}

/// Orthogonal projection onto the column span of `cols` (assumed independent).
pub fn span_projection(cols: &CMatrix) -> Projection {
    let d = cols.nrows();
    if cols.ncols() == 0 {
        return Projection::zero(d);
    }
    let q = cols.clone().qr().q();
    let p = &q * q.adjoint();
    Projection::new((&p + p.adjoint()).map(|z| z * 0.5), 1e-9).unwrap()
}

pub fn random_projection(d: usize, rank: usize, rng: &mut ChaCha8Rng) -> Projection {
    span_projection(&gaussian(d, rank, rng))
}

/// Two projections whose ranges share a random subspace of dimension `common`.
pub fn overlapping_pair(d: usize, common: usize, extra_p: usize, extra_q: usize, rng: &mut ChaCha8Rng) -> (Projection, Projection) {
    let shared = gaussian(d, common, rng);
    let a = gaussian(d, extra_p, rng);
    let b = gaussian(d, extra_q, rng);
    let join = |x: &CMatrix, y: &CMatrix| {
        let mut m = CMatrix::zeros(d, x.ncols() + y.ncols());
        m.columns_mut(0, x.ncols()).copy_from(x);
        m.columns_mut(x.ncols(), y.ncols()).copy_from(y);
        m
    };
    (span_projection(&join(&shared, &a)), span_projection(&join(&shared, &b)))
}

/// Ascending eigenvalues straight from the dense solver.
pub fn sorted_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn normalized_trace(m: &CMatrix) -> C64 {
    m.trace() / m.nrows() as f64
}

/// Limit of `(pqp)^N` computed by repeated squaring, `N = 2^20`.
pub fn alternating_projection_limit(p: &CMatrix, q: &CMatrix) -> CMatrix {
    let mut m = p * q * p;
    for _ in 0..20 {
        let sq = &m * &m;
        m = (&sq + sq.adjoint()).map(|z| z * 0.5);
    }
    m
}
