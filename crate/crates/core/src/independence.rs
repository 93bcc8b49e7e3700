//! Independence: tensor families, the symmetrization doubling, and a
//! randomized falsifier for weak full independence.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::joint::diagonal_frame;
use crate::measure::TraceDistribution;
use crate::operator::{
    is_diagonal_matrix, matmul, max_abs, normalized_trace_of, normalized_trace_of_product, BorelInterval, CMatrix, HermitianOperator,
    Projection, SpectralResolution, C64, DEFAULT_TOL_CLUSTER,
};
use crate::report::{InequalityReport, ReportBuilder};
use crate::serde_ext::ext_real;
use crate::{Caps, Error, Result, Tolerances};

/// Operators placed on distinct slots of `C^{d_1} (x) ... (x) C^{d_n}`.
#[derive(Debug, Clone)]
pub struct TensorFamily {
    factor_dims: Vec<usize>,
    locals: Vec<HermitianOperator>,
    members: Vec<HermitianOperator>,
    product_dim: usize,
}

/// Places `xs[k]` on slot `k`.
pub fn tensor_family(xs: &[HermitianOperator], dim_cap: usize) -> Result<TensorFamily> {
    if xs.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let factor_dims: Vec<usize> = xs.iter().map(HermitianOperator::dim).collect();
    let product_dim = factor_dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&d| d <= dim_cap)
        .ok_or_else(|| Error::DimOverflow {
            dim: factor_dims.iter().fold(1usize, |a, &d| a.saturating_mul(d)),
            cap: dim_cap,
        })?;
    let members = xs
        .iter()
        .enumerate()
        .map(|(k, x)| x.embed(&factor_dims, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(TensorFamily { factor_dims, locals: xs.to_vec(), members, product_dim })
}

impl TensorFamily {
    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    /// The factors before embedding.
    pub fn locals(&self) -> &[HermitianOperator] {
        &self.locals
    }

    pub fn members(&self) -> &[HermitianOperator] {
        &self.members
    }

    pub fn product_dim(&self) -> usize {
        self.product_dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `s_k = x_1 + ... + x_k`.
    pub fn partial_sums(&self) -> Vec<HermitianOperator> {
        let mut acc = HermitianOperator::zero(self.product_dim);
        self.members
            .iter()
            .map(|m| {
                acc = &acc + m;
                acc.clone()
            })
            .collect()
    }

    /// Largest commutator between members on distinct slots.
    pub fn max_slot_commutator(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.members.len() {
            for j in i + 1..self.members.len() {
                let c = self.members[i].commutator_norm(&self.members[j]).expect("members share the product dim");
                worst = worst.max(c);
            }
        }
        worst
    }
}

/// Spectral data of `x^ = x (x) 1 - 1 (x) x` read off the resolution of `x`:
/// on `P_i (x) P_j` the difference acts as `lambda_i - lambda_j`, so nothing
/// of size `d^2` has to be diagonalized.
#[derive(Debug, Clone)]
pub struct DifferenceSpectrum {
    res: SpectralResolution,
}

impl DifferenceSpectrum {
    pub fn new(res: SpectralResolution) -> Self {
        Self { res }
    }

    pub fn of(x: &HermitianOperator) -> Result<Self> {
        Ok(Self::new(x.resolution()?))
    }

    pub fn local(&self) -> &SpectralResolution {
        &self.res
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        let n = self.res.len();
        let ev = self.res.eigenvalues();
        (0..n).flat_map(move |i| {
            (0..n).map(move |j| (i, j, ev[i] - ev[j], self.res.weight(i) * self.res.weight(j)))
        })
    }

    pub fn distribution(&self) -> TraceDistribution {
        TraceDistribution::from_weighted(self.pairs().map(|(_, _, v, w)| (v, w)).collect(), DEFAULT_TOL_CLUSTER)
    }

    pub fn abs_distribution(&self) -> TraceDistribution {
        TraceDistribution::from_weighted(self.pairs().map(|(_, _, v, w)| (v.abs(), w)).collect(), DEFAULT_TOL_CLUSTER)
    }

    /// `tau(e_B(x^))`.
    pub fn trace_in(&self, interval: &BorelInterval, eps_bnd: f64) -> f64 {
        self.pairs().filter(|p| interval.contains(p.2, eps_bnd)).map(|p| p.3).sum()
    }

    /// `tau(e_B(|x^|))`.
    pub fn abs_trace_in(&self, interval: &BorelInterval, eps_bnd: f64) -> f64 {
        self.pairs().filter(|p| interval.contains(p.2.abs(), eps_bnd)).map(|p| p.3).sum()
    }

    /// `||x^||_p^p`.
    pub fn lp_power(&self, p: f64) -> f64 {
        self.pairs().map(|(_, _, v, w)| w * v.abs().powf(p)).sum()
    }

    /// `e_B(x^)` on `C^d (x) C^d`, as `sum_i P_i (x) (sum_{j: l_i - l_j in B} P_j)`.
    pub fn projection(&self, interval: &BorelInterval, eps_bnd: f64) -> Projection {
        let d = self.res.dim();
        let ev = self.res.eigenvalues();
        let mut mat = CMatrix::zeros(d * d, d * d);
        for (i, pi) in self.res.projectors().iter().enumerate() {
            let mut partner = CMatrix::zeros(d, d);
            let mut any = false;
            for (j, pj) in self.res.projectors().iter().enumerate() {
                if interval.contains(ev[i] - ev[j], eps_bnd) {
                    partner += pj.matrix();
                    any = true;
                }
            }
            if any {
                mat += pi.matrix().kronecker(&partner);
            }
        }
        Projection::from_matrix_unchecked(mat)
    }
}

/// `x (x) 1`, `1 (x) x` and their difference on `C^d (x) C^d` with the product
/// trace.
#[derive(Debug, Clone)]
pub struct DoubledVariable {
    pub bar_x: HermitianOperator,
    pub bar_x_prime: HermitianOperator,
    pub hat_x: HermitianOperator,
    spectrum: DifferenceSpectrum,
}

/// Fails with `DimOverflow` when `d^2` exceeds `dim_cap`.
pub fn double(x: &HermitianOperator, dim_cap: usize) -> Result<DoubledVariable> {
    let d = x.dim();
    let dim = d.saturating_mul(d);
    if dim > dim_cap {
        return Err(Error::DimOverflow { dim, cap: dim_cap });
    }
    let dims = [d, d];
    let bar_x = x.embed(&dims, 0)?;
    let bar_x_prime = x.embed(&dims, 1)?;
    let hat_x = &bar_x - &bar_x_prime;
    Ok(DoubledVariable { bar_x, bar_x_prime, hat_x, spectrum: DifferenceSpectrum::of(x)? })
}

impl DoubledVariable {
    pub fn spectrum(&self) -> &DifferenceSpectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.bar_x.dim()
    }

    /// Largest `|tau(x_bar^k) - tau(x_bar'^k)|` for `k <= max_moment`.
    pub fn moment_deviation(&self, max_moment: usize) -> f64 {
        let mut a = self.bar_x.matrix().clone();
        let mut b = self.bar_x_prime.matrix().clone();
        let mut worst = 0.0_f64;
        for k in 1..=max_moment {
            if k > 1 {
                a = &a * self.bar_x.matrix();
                b = &b * self.bar_x_prime.matrix();
            }
            worst = worst.max((normalized_trace_of(&a) - normalized_trace_of(&b)).norm());
        }
        worst
    }
}

/// The flip `e_i (x) e_j -> e_j (x) e_i` on `C^d (x) C^d`.
pub fn swap_unitary(d: usize) -> CMatrix {
    let mut f = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    f
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndependenceOptions {
    pub max_word_len: usize,
    pub n_words: usize,
    pub seed: u64,
    pub tol_indep: f64,
}

impl Default for IndependenceOptions {
    fn default() -> Self {
        let caps = Caps::default();
        Self {
            max_word_len: caps.max_word_len,
            n_words: caps.n_words,
            seed: 0,
            tol_indep: Tolerances::default().tol_indep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDeviation {
    /// 1-based index of the first variable in the right block.
    pub split: usize,
    #[serde(with = "ext_real")]
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    #[serde(with = "ext_real")]
    pub max_deviation: f64,
    pub split_deviations: Vec<SplitDeviation>,
    pub word_length: usize,
    pub samples_per_split: usize,
    pub passed: bool,
    pub note: String,
}

const SAMPLED_NOTE: &str = "randomized falsifier: a pass is sampled evidence, not a proof";

/// Lower estimate of the operator norm: power iteration on `a* a`, floored by
/// the largest column norm.
pub(crate) fn operator_norm_estimate(a: &CMatrix) -> f64 {
    let d = a.ncols();
    if is_diagonal_matrix(a) {
        return a.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let col_max = (0..d).map(|j| a.column(j).norm()).fold(0.0, f64::max);
    if col_max == 0.0 {
        return 0.0;
    }
    let mut v = DVector::from_fn(d, |i, _| C64::new((i as f64 + 1.0).sin() + 1.5, (0.7 * i as f64).cos()));
    v /= C64::new(v.norm(), 0.0);
    let mut estimate = 0.0_f64;
    for _ in 0..60 {
        let w = a.adjoint() * (a * &v);
        let n = w.norm();
        if n == 0.0 {
            break;
        }
        estimate = n.sqrt();
        v = w / C64::new(n, 0.0);
    }
    estimate.max(col_max)
}

/// Words below this norm count as zero and are not rescaled.
const VANISHING_WORD: f64 = 1e-8;

/// `|tau(ab) - tau(a) tau(b)| / (||a|| ||b||)`.
pub fn factorization_defect(a: &CMatrix, b: &CMatrix) -> f64 {
    let raw = (normalized_trace_of_product(a, b) - normalized_trace_of(a) * normalized_trace_of(b)).norm();
    let (na, nb) = (operator_norm_estimate(a), operator_norm_estimate(b));
    if na < VANISHING_WORD || nb < VANISHING_WORD {
        raw
    } else {
        raw / (na * nb)
    }
}

/// A sampled word: a dense matrix, or the diagonal of a diagonal one.
#[derive(Clone)]
enum Word {
    Dense(CMatrix),
    Diagonal(DVector<C64>),
}

impl Word {
    fn times(&self, other: &Self) -> Self {
        match (self, other) {
            (Self::Diagonal(a), Self::Diagonal(b)) => Self::Diagonal(a.component_mul(b)),
            _ => Self::Dense(matmul(&self.dense(), &other.dense())),
        }
    }

    fn dense(&self) -> CMatrix {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Diagonal(v) => CMatrix::from_diagonal(v),
        }
    }
}

fn word_defect(a: &Word, b: &Word) -> f64 {
    match (a, b) {
        (Word::Diagonal(a), Word::Diagonal(b)) => {
            let d = a.len() as f64;
            let raw = (a.component_mul(b).sum() / d - (a.sum() / d) * (b.sum() / d)).norm();
            let norm = |v: &DVector<C64>| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let (na, nb) = (norm(a), norm(b));
            if na < VANISHING_WORD || nb < VANISHING_WORD {
                raw
            } else {
                raw / (na * nb)
            }
        }
        _ => factorization_defect(&a.dense(), &b.dense()),
    }
}

struct Generators {
    letters: Vec<Word>,
}

impl Generators {
    /// Each variable scaled to unit norm, plus all of its eigenprojections.
    fn new(block: &[HermitianOperator]) -> Result<Self> {
        let mut letters = Vec::new();
        for x in block {
            let res = x.resolution()?;
            let norm = res.norm();
            if norm > 0.0 {
                letters.push(x.matrix().map(|z| z / norm));
            }
            letters.extend(res.projectors().iter().map(|p| p.matrix().clone()));
        }
        let letters = letters
            .into_iter()
            .map(|m| if is_diagonal_matrix(&m) { Word::Diagonal(m.diagonal()) } else { Word::Dense(m) })
            .collect();
        Ok(Self { letters })
    }

    fn word(&self, rng: &mut ChaCha8Rng, max_len: usize) -> Word {
        let len = rng.random_range(1..=max_len);
        let mut w = self.letters[rng.random_range(0..self.letters.len())].clone();
        for _ in 1..len {
            w = w.times(&self.letters[rng.random_range(0..self.letters.len())]);
        }
        w
    }
}

/// For every split `1 < j <= n`, samples words `a` in `x_1..x_{j-1}` (and their
/// spectral projections) and `b` in `x_j..x_n`, and records the largest
/// normalized `|tau(ab) - tau(a) tau(b)|`. Commuting families are sampled in
/// a common eigenbasis.
pub fn weak_full_independence_test(members: &[HermitianOperator], opts: &IndependenceOptions) -> Result<IndependenceReport> {
    let first = members.first().ok_or(Error::EmptyFamily)?;
    if let Some(bad) = members.iter().find(|m| m.dim() != first.dim()) {
        return Err(Error::DimMismatch { expected: first.dim(), found: bad.dim() });
    }
    let dense_members = members.len() > 1 && !members.iter().all(HermitianOperator::is_diagonal);
    let frame = if dense_members { diagonal_frame(members) } else { None };
    let members = frame.as_ref().map_or(members, |(_, diag)| diag.as_slice());
    let max_len = opts.max_word_len.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut split_deviations = Vec::new();
    for split in 2..=members.len() {
        let left = Generators::new(&members[..split - 1])?;
        let right = Generators::new(&members[split - 1..])?;
        let mut worst = 0.0_f64;
        for _ in 0..opts.n_words {
            let a = left.word(&mut rng, max_len);
            let b = right.word(&mut rng, max_len);
            worst = worst.max(word_defect(&a, &b));
        }
        split_deviations.push(SplitDeviation { split, deviation: worst });
    }
    let max_deviation = split_deviations.iter().map(|s| s.deviation).fold(0.0, f64::max);
    Ok(IndependenceReport {
        max_deviation,
        split_deviations,
        word_length: max_len,
        samples_per_split: opts.n_words,
        passed: max_deviation < opts.tol_indep,
        note: SAMPLED_NOTE.into(),
    })
}

/// Checks that the sum of the (symmetric) members is symmetric, through odd
/// moments and through the distribution.
pub fn sum_symmetry_check(family: &TensorFamily, max_moment: usize, tol: &Tolerances) -> Result<InequalityReport> {
    let sym_tol = tol.tol_indep;
    for (index, m) in family.members().iter().enumerate() {
        let deviation = TraceDistribution::from_resolution(&m.resolution()?).symmetry_deviation();
        if deviation > sym_tol {
            return Err(Error::NotSymmetric { index, deviation });
        }
    }
    let sum = family.partial_sums().pop().expect("families are nonempty");
    let res = sum.resolution()?;
    let scale = res.norm().max(1.0);

    let mut b = ReportBuilder::new("sum_symmetry", tol.tol_check);
    b.parameter("max_moment", max_moment as f64);
    let mut power = sum.matrix().clone();
    let mut worst = 0.0_f64;
    for k in 1..=max_moment {
        if k > 1 {
            power = &power * sum.matrix();
        }
        let m = normalized_trace_of(&power).re;
        // tau((-s)^k) = (-1)^k tau(s^k)
        let mirrored = if k % 2 == 0 { m } else { -m };
        let dev = (m - mirrored).abs() / scale.powi(k as i32);
        b.trace(format!("tau(s^{k})"), m);
        worst = worst.max(dev);
    }
    let dist_dev = TraceDistribution::from_resolution(&res).symmetry_deviation();
    b.trace("distribution_symmetry_deviation", dist_dev);
    b.bound("normalized moment deviation <= tol", worst, sym_tol);
    b.bound("distribution deviation <= tol", dist_dev, sym_tol);
    Ok(b.finish(worst, sym_tol))
}

/// Max entry of `x_bar - F x_bar' F` for the flip `F`.
pub fn swap_defect(doubled: &DoubledVariable) -> f64 {
    let d = (doubled.dim() as f64).sqrt().round() as usize;
    let f = swap_unitary(d);
    max_abs(&(doubled.bar_x.matrix() - &f * doubled.bar_x_prime.matrix() * &f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    fn diag(v: &[f64]) -> HermitianOperator {
        HermitianOperator::diagonal(v)
    }

    #[test]
    fn tensor_family_of_two_rademachers() {
        let z = diag(&[1.0, -1.0]);
        let fam = tensor_family(&[z.clone(), z], 256).unwrap();
        assert_eq!(fam.product_dim(), 4);
        assert_eq!(fam.members()[0], diag(&[1.0, 1.0, -1.0, -1.0]));
        assert_eq!(fam.members()[1], diag(&[1.0, -1.0, 1.0, -1.0]));
        let m = fam.members();
        assert_eq!(m[0].product_trace(&m[1]), m[0].trace() * m[1].trace());
        assert_eq!(fam.max_slot_commutator(), 0.0);
    }

    #[test]
    fn single_member_family() {
        let x = diag(&[0.5, 2.0, -1.0]);
        let fam = tensor_family(std::slice::from_ref(&x), 256).unwrap();
        assert_eq!(fam.members(), &[x]);
    }

    #[test]
    fn tensor_family_errors() {
        assert!(matches!(tensor_family(&[], 256), Err(Error::EmptyFamily)));
        let big = diag(&[0.0; 10]);
        assert!(matches!(tensor_family(&[big.clone(), big.clone(), big], 256), Err(Error::DimOverflow { .. })));
    }

    #[test]
    fn doubling_a_bernoulli() {
        let dv = double(&diag(&[0.0, 1.0]), 256).unwrap();
        let atoms = dv.spectrum().distribution().atoms().to_vec();
        assert_eq!(
            atoms,
            vec![
                Atom { value: -1.0, weight: 0.25 },
                Atom { value: 0.0, weight: 0.5 },
                Atom { value: 1.0, weight: 0.25 }
            ]
        );
        let direct = crate::measure::distribution(&dv.hat_x).unwrap();
        assert!(direct.matches(&dv.spectrum().distribution(), 1e-15));
        assert!(direct.is_symmetric(1e-15));
    }

    #[test]
    fn doubling_zero_and_overflow() {
        let dv = double(&HermitianOperator::zero(3), 256).unwrap();
        assert_eq!(dv.hat_x, HermitianOperator::zero(9));
        assert!(matches!(double(&HermitianOperator::zero(17), 256), Err(Error::DimOverflow { dim: 289, cap: 256 })));
    }

    #[test]
    fn doubled_copies_commute_and_swap() {
        let x = HermitianOperator::new(
            CMatrix::from_row_slice(2, 2, &[C64::new(0.3, 0.0), C64::new(1.0, -2.0), C64::new(1.0, 2.0), C64::new(-1.0, 0.0)]),
            1e-12,
        )
        .unwrap();
        let dv = double(&x, 256).unwrap();
        assert!(dv.bar_x.commutator_norm(&dv.bar_x_prime).unwrap() < 1e-14);
        assert!(dv.moment_deviation(8) < 1e-12);
        assert!(swap_defect(&dv) < 1e-15);
    }

    #[test]
    fn structured_projection_matches_direct_diagonalization() {
        let x = HermitianOperator::new(
            CMatrix::from_row_slice(
                3,
                3,
                &[
                    C64::new(1.0, 0.0),
                    C64::new(0.5, 0.5),
                    C64::new(0.0, 0.0),
                    C64::new(0.5, -0.5),
                    C64::new(-0.2, 0.0),
                    C64::new(0.3, 0.0),
                    C64::new(0.0, 0.0),
                    C64::new(0.3, 0.0),
                    C64::new(2.0, 0.0),
                ],
            ),
            1e-12,
        )
        .unwrap();
        let dv = double(&x, 256).unwrap();
        let direct = dv.hat_x.resolution().unwrap();
        for t in [-1.0, 0.0, 0.4, 1.3] {
            let b = BorelInterval::at_least(t);
            let p = dv.spectrum().projection(&b, 1e-9);
            let q = direct.projection(&b, 1e-9);
            assert!(max_abs(&(p.matrix() - q.matrix())) < 1e-9, "t = {t}");
            assert!((dv.spectrum().trace_in(&b, 1e-9) - direct.trace_in(&b, 1e-9)).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_family_passes_independence() {
        let a = HermitianOperator::new(
            CMatrix::from_row_slice(2, 2, &[C64::new(0.2, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(-0.7, 0.0)]),
            1e-12,
        )
        .unwrap();
        let b = HermitianOperator::new(
            CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.4, 0.3), C64::new(0.4, -0.3), C64::new(0.5, 0.0)]),
            1e-12,
        )
        .unwrap();
        let fam = tensor_family(&[a, b], 256).unwrap();
        let rep = weak_full_independence_test(fam.members(), &IndependenceOptions::default()).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.max_deviation < 1e-10);
        assert_eq!(rep.split_deviations.len(), 1);
    }

    #[test]
    fn same_slot_copies_fail_independence() {
        let x = diag(&[0.0, 1.0]);
        assert_eq!(x.product_trace(&x), 0.5);
        assert_eq!(x.trace() * x.trace(), 0.25);
        let rep = weak_full_independence_test(&[x.clone(), x], &IndependenceOptions::default()).unwrap();
        assert!(!rep.passed);
    }

    #[test]
    fn unit_word_has_no_defect() {
        let b = diag(&[3.0, -1.0, 0.5]);
        assert_eq!(factorization_defect(&CMatrix::identity(3, 3), b.matrix()), 0.0);
    }

    #[test]
    fn independence_test_is_deterministic() {
        let x = diag(&[0.0, 1.0]);
        let y = diag(&[1.0, 0.0]);
        let opts = IndependenceOptions { seed: 42, ..Default::default() };
        let a = weak_full_independence_test(&[x.clone(), y.clone()], &opts).unwrap();
        let b = weak_full_independence_test(&[x, y], &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sum_symmetry_examples() {
        let t = Tolerances::default();
        let z = diag(&[1.0, -1.0]);
        let fam = tensor_family(&[z.clone(), z.clone()], 256).unwrap();
        let rep = sum_symmetry_check(&fam, 8, &t).unwrap();
        assert!(rep.holds);
        let sum = fam.partial_sums().pop().unwrap();
        let dist = crate::measure::distribution(&sum).unwrap();
        assert_eq!(
            dist.atoms(),
            &[
                Atom { value: -2.0, weight: 0.25 },
                Atom { value: 0.0, weight: 0.5 },
                Atom { value: 2.0, weight: 0.25 }
            ]
        );

        let single = tensor_family(&[z], 256).unwrap();
        assert!(sum_symmetry_check(&single, 5, &t).unwrap().holds);

        let bad = tensor_family(&[diag(&[0.0, 1.0])], 256).unwrap();
        assert!(matches!(sum_symmetry_check(&bad, 3, &t), Err(Error::NotSymmetric { index: 0, .. })));
    }
}
