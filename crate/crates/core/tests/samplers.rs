mod common;

use common::*;
use meanlab_core::order::{
    chaotic_cmp, loewner_cmp, near_order_cmp, profile_relations, ToleranceProfile,
};
use meanlab_core::sampling::*;
use proptest::prelude::*;

fn tol() -> ToleranceProfile {
    ToleranceProfile::new(1e-8, true).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replay_is_bit_exact(seed in any::<u64>(), dim in 1usize..=8) {
        let s = spec(seed, dim, 0.1, 10.0);
        prop_assert_eq!(random_hpd(&s).unwrap(), random_hpd(&s).unwrap());
        prop_assert_eq!(random_near_ordered_pair(&s).unwrap(), random_near_ordered_pair(&s).unwrap());
        prop_assert_eq!(random_tuple(&s, 3).unwrap(), random_tuple(&s, 3).unwrap());
        prop_assert_eq!(random_weights(&s, 3).unwrap(), random_weights(&s, 3).unwrap());
        prop_assert_eq!(s.for_trial(9), s.for_trial(9));
        prop_assert_ne!(s.for_trial(9).seed, s.for_trial(10).seed);
    }

    #[test]
    fn hpd_spectrum_in_range(seed in any::<u64>(), dim in 1usize..=16, lo in 0.01f64..1.0, width in 1.0f64..1e4) {
        let hi = lo * width;
        let a = random_hpd(&spec(seed, dim, lo, hi)).unwrap();
        for l in eigenvalues_ref(a.matrix()) {
            prop_assert!(l >= lo * (1.0 - 1e-12) && l <= hi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn constructed_relations_hold(seed in any::<u64>(), dim in 1usize..=8) {
        let s = spec(seed, dim, 0.2, 5.0);
        let (a, b) = random_loewner_pair(&s).unwrap();
        prop_assert!(profile_relations(&a, &b, &tol()).unwrap().chain_violations().is_empty());
        prop_assert!(loewner_cmp(&a, &b, &tol()).unwrap().holds);
        let (a, b) = random_chaotic_pair(&s).unwrap();
        prop_assert!(chaotic_cmp(&a, &b, &tol()).unwrap().holds);
        let (a, b, c) = near_ordered_pair_with_factor(&s).unwrap();
        let v = near_order_cmp(&a, &b, &tol()).unwrap();
        prop_assert!(v.holds);
        prop_assert!((v.margin - (c.min_eigenvalue() - 1.0)).abs() < 1e-8 * c.operator_norm());
    }

    #[test]
    fn commuting_family_commutes(seed in any::<u64>(), dim in 1usize..=8, n in 1usize..=5) {
        let f = random_commuting_family(&spec(seed, dim, 0.1, 10.0), n).unwrap();
        for x in f.iter() {
            for y in f.iter() {
                let comm = x.matrix() * y.matrix() - y.matrix() * x.matrix();
                prop_assert!(comm.norm() <= 1e-12 * x.operator_norm() * y.operator_norm());
            }
        }
    }

    #[test]
    fn weights_are_normalized(seed in any::<u64>(), n in 1usize..=8) {
        let w = random_weights(&spec(seed, 2, 1.0, 1.0), n).unwrap();
        prop_assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        prop_assert!(w.as_slice().iter().all(|&x| x > 0.0));
    }
}

#[test]
fn near_ordered_pairs_witness_loewner_failures() {
    let mut failures = 0;
    for trial in 0..1000u64 {
        let s = spec(2024, 2 + (trial % 7) as usize, 0.5, 8.0).for_trial(trial);
        let (a, b) = random_near_ordered_pair(&s).unwrap();
        assert!(near_order_cmp(&a, &b, &tol()).unwrap().holds);
        if !loewner_cmp(&a, &b, &tol()).unwrap().holds {
            failures += 1;
        }
    }
    assert!(failures > 0);
}

#[test]
fn chaotic_but_not_loewner_pairs_occur() {
    let found = (0..1000u64).any(|trial| {
        let (a, b) = random_chaotic_pair(&spec(7, 3, 0.5, 8.0).for_trial(trial)).unwrap();
        !loewner_cmp(&a, &b, &tol()).unwrap().holds
    });
    assert!(found);
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(SamplerSpec::new(0, 0, (1.0, 2.0), 1).is_err());
    assert!(SamplerSpec::new(0, 17, (1.0, 2.0), 1).is_err());
    assert!(SamplerSpec::new(0, 2, (0.0, 2.0), 1).is_err());
    assert!(SamplerSpec::new(0, 2, (3.0, 2.0), 1).is_err());
}
