mod common;

use common::*;
use proptest::prelude::*;
use qprob_core::independence::double;
use qprob_core::measure::{chebyshev_check, is_symmetric, median, median_property_check};
use qprob_core::operator::C64;
use qprob_core::{HermitianOperator, Tolerances};

/// `sup { t : #{eigenvalues >= t} >= d/2 }` on distinct eigenvalues.
fn sup_median(x: &HermitianOperator) -> f64 {
    let v = sorted_eigenvalues(x.matrix());
    let d = v.len();
    v[d - d.div_ceil(2)]
}

fn variance(m: &qprob_core::operator::CMatrix) -> f64 {
    let mean = normalized_trace(m).re;
    normalized_trace(&(m * m)).re - mean * mean
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn median_matches_sorted_eigenvalues(seed in any::<u64>(), d in 1usize..=16) {
        let x = hermitian(d, &mut rng(seed));
        prop_assert!((median(&x).unwrap() - sup_median(&x)).abs() <= 1e-9);
        let tol = Tolerances::default();
        for p in [1.0, 2.0, 4.0] {
            let r = median_property_check(&x, p, &tol).unwrap();
            prop_assert!(r.all_pass);
            prop_assert!(r.tail_at_median >= 0.5 - 1e-12 && r.cdf_at_median >= 0.5 - 1e-12);
            prop_assert!(r.lp_bound_slack >= -1e-12 && r.variance_bound_slack >= -1e-12 && r.tail_bound_slack >= -1e-12);
        }
    }

    #[test]
    fn chebyshev_holds_and_is_monotone(seed in any::<u64>(), d in 1usize..=16) {
        let x = hermitian(d, &mut rng(seed));
        let tol = Tolerances::default();
        for p in [1.0, 2.0, 4.0] {
            let mut last = (f64::INFINITY, f64::INFINITY);
            for t in [0.25, 1.0, 2.5] {
                let r = chebyshev_check(&x, t, p, &tol).unwrap();
                prop_assert!(r.holds && r.slack >= -1e-9);
                prop_assert!(r.lhs <= last.0 + 1e-15 && r.rhs <= last.1 + 1e-15);
                last = (r.lhs, r.rhs);
            }
        }
    }

    #[test]
    fn symmetry_is_unitarily_invariant(seed in any::<u64>(), half in 1usize..=6, odd in any::<bool>()) {
        let mut r = rng(seed);
        let mut spectrum: Vec<f64> = (0..half).map(|i| 0.5 + i as f64 * 0.75).collect();
        spectrum.extend(spectrum.clone().iter().map(|v| -v));
        if odd {
            spectrum.push(0.0);
        }
        let x = with_spectrum(&spectrum, &mut r);
        let u = unitary(x.dim(), &mut r);
        let y = conjugate(x.matrix(), &u);
        prop_assert!(is_symmetric(&x, 1e-9).unwrap());
        prop_assert!(is_symmetric(&y, 1e-9).unwrap());
        let shifted = y.shift(0.3);
        prop_assert!(!is_symmetric(&shifted, 1e-9).unwrap());
        prop_assert!(!is_symmetric(&conjugate(shifted.matrix(), &u), 1e-9).unwrap());
    }

    #[test]
    fn doubling_identities(seed in any::<u64>(), d in 1usize..=6) {
        let x = hermitian(d, &mut rng(seed));
        let doubled = double(&x, 256).unwrap();
        let h = doubled.hat_x.matrix();
        let l2 = normalized_trace(&(h * h)).re;
        prop_assert!((l2 - 2.0 * variance(x.matrix())).abs() <= 1e-9);
        prop_assert!(is_symmetric(&doubled.hat_x, 1e-9).unwrap());
        prop_assert!((median(&doubled.bar_x).unwrap() - median(&doubled.bar_x_prime).unwrap()).abs() <= 1e-12);
        let commutator = doubled.bar_x.commutator_norm(&doubled.bar_x_prime).unwrap();
        prop_assert!(commutator <= 1e-12);
    }
}

#[test]
fn median_of_two_point_spectrum_is_the_upper_atom() {
    assert_eq!(median(&HermitianOperator::diagonal(&[-1.0, 1.0])).unwrap(), 1.0);
    let rows = vec![vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]];
    let flip = HermitianOperator::from_rows(&rows, 1e-12).unwrap();
    assert!((median(&flip).unwrap() - 1.0).abs() < 1e-12);
    assert!(is_symmetric(&flip, 1e-9).unwrap());
}
