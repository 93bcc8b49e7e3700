//! Seeded instance generators.

use qprob_core::classical::{ClassicalInstance, DiscreteVariable};
use qprob_core::independence::tensor_family;
use qprob_core::operator::{CMatrix, C64};
use qprob_core::{Caps, Error, HermitianOperator, Projection, Result};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::remark::remark_operators;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    RandomHermitian,
    SymmetricSpectrum,
    TensorSymmetricFamily,
    DiagonalClassical,
    RemarkExample,
}

impl std::str::FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.replace('-', "_").as_str() {
            "random_hermitian" => Ok(Self::RandomHermitian),
            "symmetric_spectrum" => Ok(Self::SymmetricSpectrum),
            "tensor_symmetric_family" => Ok(Self::TensorSymmetricFamily),
            "diagonal_classical" => Ok(Self::DiagonalClassical),
            "remark_example" => Ok(Self::RemarkExample),
            other => Err(format!("unknown generator kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    /// Matrix dimension (first entry) or one dimension per tensor slot.
    pub dims: Vec<usize>,
    /// Number of classical variables; ignored by the operator kinds.
    #[serde(default)]
    pub n_vars: usize,
    pub seed: u64,
    /// Members are shifted by seeded constants drawn from `[-shift, shift]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    /// Classical variables are drawn symmetric.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub symmetric: bool,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, dims: Vec<usize>, seed: u64) -> Self {
        Self { kind, dims, n_vars: 0, seed, shift: None, symmetric: false }
    }
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// QR of a complex Gaussian matrix, with the phases of `R`'s diagonal moved
/// into `Q`.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let (mut q, r) = g.qr().unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn conjugate(u: &CMatrix, eigenvalues: &[f64]) -> HermitianOperator {
    let d = eigenvalues.len();
    let diag = CMatrix::from_fn(d, d, |i, j| if i == j { C64::new(eigenvalues[i], 0.0) } else { C64::new(0.0, 0.0) });
    HermitianOperator::new(u * diag * u.adjoint(), 1e-9).expect("unitary conjugates of real diagonals are Hermitian")
}

/// `(G + G*) / 2` for a complex Gaussian `G`.
pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> HermitianOperator {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    HermitianOperator::new((&g + g.adjoint()).map(|z| z * 0.5), 1e-9).expect("symmetrized matrices are Hermitian")
}

/// `u diag(v) u*` with `v` drawn from the given sampler.
pub fn random_with_spectrum(eigenvalues: &[f64], rng: &mut impl Rng) -> HermitianOperator {
    let u = random_unitary(eigenvalues.len(), rng);
    conjugate(&u, eigenvalues)
}

/// Random positive semidefinite operator with eigenvalues in `[0, 3)`, some
/// of them repeated.
pub fn random_positive(d: usize, rng: &mut impl Rng) -> HermitianOperator {
    let mut v: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..3.0)).collect();
    if d > 1 && rng.random_bool(0.5) {
        v[1] = v[0];
    }
    random_with_spectrum(&v, rng)
}

/// Orthogonal projection of the given rank onto a random subspace.
pub fn random_projection(d: usize, rank: usize, rng: &mut impl Rng) -> Projection {
    let u = random_unitary(d, rng);
    let block = u.columns(0, rank.min(d)).into_owned();
    Projection::new(&block * block.adjoint(), 1e-9).expect("isometry ranges are projections")
}

/// Half the mass of magnitude levels: a grid (ties, exact endpoint hits) or a
/// continuous draw.
fn magnitudes(count: usize, rng: &mut impl Rng) -> Vec<f64> {
    const GRID: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
    let on_grid = rng.random_bool(0.5);
    (0..count)
        .map(|_| if on_grid { *GRID.choose(rng).expect("grid is nonempty") } else { rng.random_range(0.2..2.0) })
        .collect()
}

/// `u diag(±mu_1, ..., ±mu_m [, 0]) u*`.
pub fn symmetric_spectrum(d: usize, rng: &mut impl Rng) -> HermitianOperator {
    let mut v = Vec::with_capacity(d);
    for mu in magnitudes(d / 2, rng) {
        v.push(mu);
        v.push(-mu);
    }
    if d % 2 == 1 {
        v.push(0.0);
    }
    random_with_spectrum(&v, rng)
}

fn symmetric_variable(rng: &mut impl Rng) -> DiscreteVariable {
    let v = f64::from(rng.random_range(1..=4u8)) / 2.0;
    if rng.random_bool(0.5) {
        DiscreteVariable { outcomes: vec![(-v, 1, 2), (v, 1, 2)] }
    } else {
        DiscreteVariable { outcomes: vec![(-v, 1, 3), (0.0, 1, 3), (v, 1, 3)] }
    }
}

fn general_variable(rng: &mut impl Rng) -> DiscreteVariable {
    let shape = rng.random_range(0..3);
    let mut value = || f64::from(rng.random_range(-4..=4i8)) / 2.0;
    let outcomes = match shape {
        0 => vec![(value(), 1, 2), (value(), 1, 2)],
        1 => vec![(value(), 1, 3), (value(), 2, 3)],
        _ => vec![(value(), 1, 3), (value(), 1, 3), (value(), 1, 3)],
    };
    DiscreteVariable { outcomes }
}

/// Variables on slots of dimension 2 or 3 with half-integer values.
pub fn diagonal_classical(n: usize, symmetric: bool, rng: &mut impl Rng) -> ClassicalInstance {
    let variables = (0..n).map(|_| if symmetric { symmetric_variable(rng) } else { general_variable(rng) }).collect();
    ClassicalInstance::new(variables).expect("generated variables are valid")
}

fn shifted(ops: Vec<HermitianOperator>, shift: Option<f64>, rng: &mut impl Rng) -> Vec<HermitianOperator> {
    match shift {
        Some(s) if s > 0.0 => ops.into_iter().map(|x| x.shift(-rng.random_range(-s..=s))).collect(),
        _ => ops,
    }
}

fn first_dim(spec: &GeneratorSpec) -> Result<usize> {
    match spec.dims.first() {
        Some(&d) if d > 0 => Ok(d),
        _ => Err(Error::EmptyMatrix),
    }
}

pub fn generate(spec: &GeneratorSpec, caps: &Caps) -> Result<Instance> {
    let mut rng = rng_from(spec.seed);
    match spec.kind {
        GeneratorKind::RandomHermitian => {
            let d = first_dim(spec)?;
            check_dim(d, caps)?;
            let x = random_hermitian(d, &mut rng);
            Ok(Instance::Operators { operators: shifted(vec![x], spec.shift, &mut rng), factor_dims: None })
        }
        GeneratorKind::SymmetricSpectrum => {
            let d = first_dim(spec)?;
            check_dim(d, caps)?;
            Ok(Instance::Operators { operators: vec![symmetric_spectrum(d, &mut rng)], factor_dims: None })
        }
        GeneratorKind::TensorSymmetricFamily => {
            if spec.dims.is_empty() || spec.dims.contains(&0) {
                return Err(Error::EmptyMatrix);
            }
            let product = spec.dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).unwrap_or(usize::MAX);
            check_dim(product, caps)?;
            let locals: Vec<HermitianOperator> = spec.dims.iter().map(|&d| symmetric_spectrum(d, &mut rng)).collect();
            let locals = shifted(locals, spec.shift, &mut rng);
            Ok(Instance::Operators { operators: locals, factor_dims: Some(spec.dims.clone()) })
        }
        GeneratorKind::DiagonalClassical => {
            let n = spec.n_vars.max(1);
            let inst = diagonal_classical(n, spec.symmetric, &mut rng);
            Ok(Instance::Classical(inst))
        }
        GeneratorKind::RemarkExample => Ok(Instance::Operators { operators: remark_operators(), factor_dims: None }),
    }
}

fn check_dim(d: usize, caps: &Caps) -> Result<()> {
    if d > caps.dim_cap {
        Err(Error::DimOverflow { dim: d, cap: caps.dim_cap })
    } else {
        Ok(())
    }
}

/// Tensor family members of a generated family instance.
pub fn family_members(locals: &[HermitianOperator], caps: &Caps) -> Result<Vec<HermitianOperator>> {
    Ok(tensor_family(locals, caps.dim_cap)?.members().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qprob_core::measure::is_symmetric;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = rng_from(3);
        for d in [1, 2, 5, 9] {
            let u = random_unitary(d, &mut rng);
            let defect = (u.adjoint() * &u - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(defect < 1e-12);
        }
    }

    #[test]
    fn symmetric_spectrum_is_symmetric() {
        let spec = GeneratorSpec::new(GeneratorKind::SymmetricSpectrum, vec![4], 7);
        let Instance::Operators { operators, .. } = generate(&spec, &Caps::default()).unwrap() else {
            panic!("operator instance expected")
        };
        assert!(is_symmetric(&operators[0], 1e-9).unwrap());
        let mut rng = rng_from(11);
        for d in 1..8 {
            assert!(is_symmetric(&symmetric_spectrum(d, &mut rng), 1e-9).unwrap());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let caps = Caps::default();
        for kind in [
            GeneratorKind::RandomHermitian,
            GeneratorKind::SymmetricSpectrum,
            GeneratorKind::TensorSymmetricFamily,
            GeneratorKind::DiagonalClassical,
        ] {
            let mut spec = GeneratorSpec::new(kind, vec![2, 3], 99);
            spec.n_vars = 3;
            assert_eq!(generate(&spec, &caps).unwrap(), generate(&spec, &caps).unwrap());
        }
    }

    #[test]
    fn oversized_family_overflows() {
        let spec = GeneratorSpec::new(GeneratorKind::TensorSymmetricFamily, vec![3, 3, 3, 3, 3, 3], 1);
        assert!(matches!(generate(&spec, &Caps::default()), Err(Error::DimOverflow { dim: 729, cap: 256 })));
    }

    #[test]
    fn classical_variables_are_small() {
        let mut rng = rng_from(5);
        for _ in 0..50 {
            let inst = diagonal_classical(4, rng.random_bool(0.5), &mut rng);
            assert!(inst.total_weight().unwrap() <= 81);
            assert!(inst.sample_space_size() <= 81);
        }
        let sym = diagonal_classical(3, true, &mut rng);
        assert!(sym.variables.iter().all(|v| v.is_symmetric().unwrap()));
    }
}
