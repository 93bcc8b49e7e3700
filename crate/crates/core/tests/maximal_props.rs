mod common;

use common::*;
use proptest::prelude::*;
use qprob_core::classical::{classical_corollary_check, ClassicalInstance, Corollary, DiscreteVariable};
use qprob_core::independence::tensor_family;
use qprob_core::lattice::is_subprojection;
use qprob_core::maximal::{
    levy_skorohod_verify, levy_verify, levy_witnesses, ottaviani_verify, strong_symmetrization_verify, SumSequence,
    VerifierConfig,
};
use qprob_core::operator::{max_abs, spectral_projection};
use qprob_core::{BorelInterval, HermitianOperator};

/// A symmetric tensor family: slot `k` carries `u diag(±mu) u*`.
fn symmetric_family(seed: u64, dims: &[usize]) -> SumSequence {
    let mut r = rng(seed);
    let locals: Vec<HermitianOperator> = dims
        .iter()
        .map(|&d| {
            let mu: Vec<f64> = (0..d / 2).map(|i| 0.5 + ((seed >> (3 * i)) % 4) as f64 * 0.5).collect();
            let mut spectrum: Vec<f64> = mu.iter().flat_map(|m| [*m, -m]).collect();
            if d % 2 == 1 {
                spectrum.push(0.0);
            }
            with_spectrum(&spectrum, &mut r)
        })
        .collect();
    SumSequence::new(tensor_family(&locals, 256).unwrap().members().to_vec()).unwrap()
}

fn shifted_family(seed: u64, dims: &[usize]) -> Vec<HermitianOperator> {
    let mut r = rng(seed);
    let locals: Vec<HermitianOperator> = dims.iter().map(|&d| hermitian(d, &mut r)).collect();
    tensor_family(&locals, 256).unwrap().members().to_vec()
}

/// `#{eigenvalues of m > t} / d` straight from the solver.
fn tail_above(x: &HermitianOperator, t: f64) -> f64 {
    let v = sorted_eigenvalues(x.matrix());
    v.iter().filter(|e| **e > t + 1e-9).count() as f64 / v.len() as f64
}

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn levy_holds_with_witnesses_checked_externally(seed in any::<u64>(), dims in dims_strategy(), lambda in 0.1f64..3.0) {
        let seq = symmetric_family(seed, &dims);
        let cfg = VerifierConfig::default();
        let report = levy_verify(&seq, lambda, &cfg).unwrap();
        prop_assert!(report.hypotheses_ok && report.holds && report.invariants_ok());
        prop_assert!(report.slack >= -1e-9);

        let total = seq.total();
        prop_assert!((report.rhs - 2.0 * tail_above(total, lambda)).abs() <= 1e-12);
        let lower = seq.partial_sums().iter().enumerate().map(|(k, s)| 0.5f64.powi(k as i32) * tail_above(s, lambda)).fold(0.0, f64::max);
        prop_assert!(lower <= report.lhs + 1e-9);

        let w = levy_witnesses(&seq, lambda, &cfg).unwrap();
        for i in 0..w.p_parts.len() {
            for j in i + 1..w.p_parts.len() {
                prop_assert!(max_abs(&(w.p_parts[i].matrix() * w.p_parts[j].matrix())) <= 1e-9);
            }
        }
        let target = spectral_projection(total, &BorelInterval::above(lambda), 1e-9).unwrap();
        for f in &w.f {
            prop_assert!(is_subprojection(f, &target, 1e-9).unwrap());
        }
        let tau_p_perp = 1.0 - w.p_total.trace();
        for (k, r) in w.r.iter().enumerate() {
            prop_assert!(tau_p_perp <= 1.0 - 0.5f64.powi(k as i32) * (1.0 - r.trace()) + 1e-9);
        }
    }

    #[test]
    fn levy_sides_are_monotone_in_lambda(seed in any::<u64>(), dims in dims_strategy()) {
        let seq = symmetric_family(seed, &dims);
        let cfg = VerifierConfig::default();
        let mut last = (f64::INFINITY, f64::INFINITY);
        for lambda in [0.25, 0.5, 1.0, 1.5, 2.5, 4.0] {
            let r = levy_verify(&seq, lambda, &cfg).unwrap();
            prop_assert!(r.lhs <= last.0 + 1e-12 && r.rhs <= last.1 + 1e-12);
            last = (r.lhs, r.rhs);
        }
    }

    #[test]
    fn general_verifiers_hold_on_tensor_families(seed in any::<u64>(), dims in dims_strategy(), lambda in 0.2f64..3.0, alpha in 0.05f64..0.95) {
        let xs = shifted_family(seed, &dims);
        let seq = SumSequence::new(xs.clone()).unwrap();
        let cfg = VerifierConfig::default();
        for r in [
            ottaviani_verify(&seq, lambda, &cfg).unwrap(),
            levy_skorohod_verify(&seq, lambda, alpha, &cfg).unwrap(),
            strong_symmetrization_verify(&xs, lambda, &cfg).unwrap(),
        ] {
            prop_assert!(r.holds, "{} failed: {:?}", r.name, r.bounds);
            prop_assert!(r.invariants_ok(), "{}: {:?}", r.name, r.failed_invariants().collect::<Vec<_>>());
        }
    }
}

/// `(P(max_k S_k > λ), P(S_n > λ))` by walking every path.
fn enumerate_levy(vars: &[DiscreteVariable], lambda: f64) -> (f64, f64) {
    let mut paths = vec![(0.0, 1.0, false)];
    for v in vars {
        paths = paths
            .into_iter()
            .flat_map(|(s, w, hit)| {
                v.outcomes.iter().map(move |&(x, num, den)| {
                    let s2 = s + x;
                    (s2, w * num as f64 / den as f64, hit || s2 > lambda)
                })
            })
            .collect();
    }
    let max_event = paths.iter().filter(|p| p.2).map(|p| p.1).sum();
    let tail = paths.iter().filter(|p| p.0 > lambda).map(|p| p.1).sum();
    (max_event, tail)
}

fn symmetric_variable(seed: u64) -> DiscreteVariable {
    let a = 0.5 + (seed % 4) as f64 * 0.5;
    let b = 0.5 + (seed / 4 % 4) as f64 * 0.5;
    let num = 1 + seed % 3;
    DiscreteVariable::new(vec![(a, num, 8), (-a, num, 8), (b, 4 - num, 8), (-b, 4 - num, 8)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classical_levy_matches_path_enumeration(seeds in prop::collection::vec(0u64..48, 1..=3), lambda in 0.1f64..4.0) {
        let vars: Vec<DiscreteVariable> = seeds.iter().map(|s| symmetric_variable(*s)).collect();
        let inst = ClassicalInstance::new(vars.clone()).unwrap();
        let (max_event, tail) = enumerate_levy(&vars, lambda);
        let mut cfg = VerifierConfig::default();
        cfg.caps.dim_cap = 512;
        let report = classical_corollary_check(&inst, Corollary::Levy, lambda, None, &cfg).unwrap();
        prop_assert!(report.holds && report.agreement_ok);
        prop_assert!((report.classical_lhs - max_event).abs() <= 1e-12);
        prop_assert!((report.classical_rhs - 2.0 * tail).abs() <= 1e-12);
        prop_assert!((report.noncommutative.lhs - max_event).abs() <= 1e-12);
        prop_assert!(max_event <= 2.0 * tail + 1e-12);
    }
}

#[test]
fn three_rademachers_at_one_and_a_half() {
    let vars = vec![DiscreteVariable::rademacher(); 3];
    let (max_event, tail) = enumerate_levy(&vars, 1.5);
    assert_eq!((max_event, tail), (0.25, 0.125));
    let inst = ClassicalInstance::new(vars).unwrap();
    let abs = classical_corollary_check(&inst, Corollary::LevyAbs, 1.5, None, &VerifierConfig::default()).unwrap();
    // |S_1| = 1, |S_2| in {0, 2}, so max |S_k| > 1.5 iff |S_2| = 2 or |S_3| = 3
    assert_eq!(abs.classical_lhs, 0.5);
    assert_eq!(abs.classical_rhs, 0.5);
    assert!(abs.holds);
}
