mod common;

use common::*;
use meanlab_core::hpd::{congruence, CMatrix};
use meanlab_core::pair::*;
use meanlab_core::sampling::{random_commuting_family, random_invertible, random_unordered_pair};
use meanlab_core::{Error, HpdMatrix};
use proptest::prelude::*;

fn pair(seed: u64, dim: usize) -> (HpdMatrix, HpdMatrix) {
    random_unordered_pair(&spec(seed, dim, 0.1, 10.0)).unwrap()
}

fn thompson_ref(a: &HpdMatrix, b: &HpdMatrix) -> f64 {
    let si = inv(&sqrt_db(a.matrix()));
    let ev = eigenvalues_ref(&(&si * b.matrix() * &si));
    ev[0].ln().abs().max(ev[ev.len() - 1].ln().abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn geometric_mean_matches_reference(seed in any::<u64>(), dim in 1usize..=6) {
        let (a, b) = pair(seed, dim);
        let g = geometric(&a, &b).unwrap();
        prop_assert!(rel_diff(g.matrix(), &geometric_ref(a.matrix(), b.matrix())) < 1e-10);
        // Riccati equation X A^{-1} X = B
        let riccati = g.matrix() * inv(a.matrix()) * g.matrix();
        prop_assert!(rel_diff(&riccati, b.matrix()) < 1e-10);
        // symmetric in its arguments
        prop_assert!(rel_diff(geometric(&b, &a).unwrap().matrix(), g.matrix()) < 1e-10);
    }

    #[test]
    fn inverse_geometric_mean_two_ways(seed in any::<u64>(), dim in 1usize..=6) {
        let (a, b) = pair(seed, dim);
        let closed = inverse_geometric_mean(&a, &b).unwrap();
        let via_mean = metric_geometric(&a.inv().unwrap(), &b, 0.5).unwrap();
        prop_assert!(rel_diff(closed.matrix(), via_mean.matrix()) < 1e-10);
        prop_assert!(rel_diff(closed.matrix(), &geometric_ref(&inv(a.matrix()), b.matrix())) < 1e-10);
    }

    #[test]
    fn spectral_geometric_definition(seed in any::<u64>(), dim in 1usize..=6, t in -1.0f64..2.0) {
        let (a, b) = pair(seed, dim);
        let cc = geometric_ref(&inv(a.matrix()), b.matrix());
        let ct = hpd(cc).pow(t).unwrap();
        let reference = ct.matrix() * a.matrix() * ct.matrix();
        let s = spectral_geometric(&a, &b, t).unwrap();
        prop_assert!(rel_diff(s.matrix(), &reference) < 1e-9);
    }

    #[test]
    fn wasserstein_matches_square_form(seed in any::<u64>(), dim in 1usize..=6, t in 0.0f64..=1.0) {
        let (a, b) = pair(seed, dim);
        // A^{-1/2} ((1-t) A + t (A^{1/2} B A^{1/2})^{1/2})^2 A^{-1/2}
        let s = sqrt_db(a.matrix());
        let si = inv(&s);
        let inner = a.matrix() * c(1.0 - t) + sqrt_db(&(&s * b.matrix() * &s)) * c(t);
        let reference = &si * &inner * &inner * &si;
        let w = wasserstein_mean(&a, &b, t).unwrap();
        prop_assert!(rel_diff(w.matrix(), &reference) < 1e-9);
        let poly = wasserstein_mean_polynomial(&a, &b, t).unwrap();
        prop_assert!(rel_diff(poly.matrix(), w.matrix()) < 1e-10);
    }

    #[test]
    fn fidelity_and_bures(seed in any::<u64>(), dim in 1usize..=6) {
        let (a, b) = pair(seed, dim);
        let sa = sqrt_db(a.matrix());
        let f_ref = sqrt_db(&(&sa * b.matrix() * &sa));
        let f = fidelity(&a, &b).unwrap();
        prop_assert!(rel_diff(f.matrix(), &f_ref) < 1e-10);
        let d2 = a.as_hermitian().trace() + b.as_hermitian().trace() - 2.0 * f_ref.trace().re;
        let d = bures_wasserstein_distance(&a, &b).unwrap();
        prop_assert!((d * d - d2).abs() < 1e-9 * (1.0 + d2));
        prop_assert!(bures_wasserstein_distance(&a, &a).unwrap() < 1e-6);
    }

    #[test]
    fn thompson_matches_reference(seed in any::<u64>(), dim in 1usize..=6) {
        let (a, b) = pair(seed, dim);
        let d = thompson_distance(&a, &b).unwrap();
        prop_assert!((d - thompson_ref(&a, &b)).abs() < 1e-10);
        prop_assert!((thompson_distance(&b, &a).unwrap() - d).abs() < 1e-10);
        let sm = spectral_semimetric(&a, &b).unwrap();
        let cc = hpd(geometric_ref(&inv(a.matrix()), b.matrix()));
        prop_assert!((sm - 2.0 * cc.log().operator_norm().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn thompson_invariances(seed in any::<u64>(), dim in 1usize..=5) {
        let (a, b) = pair(seed, dim);
        let d = thompson_distance(&a, &b).unwrap();
        let di = thompson_distance(&a.inv().unwrap(), &b.inv().unwrap()).unwrap();
        prop_assert!((d - di).abs() <= 1e-9);
        let m = random_invertible(&spec(seed ^ 0x55, dim, 0.5, 2.0)).unwrap();
        let dm = thompson_distance(&congruence(&m, &a).unwrap(), &congruence(&m, &b).unwrap()).unwrap();
        prop_assert!((d - dm).abs() <= 1e-9);
    }

    #[test]
    fn thompson_sum_contraction(seed in any::<u64>(), dim in 1usize..=5) {
        let (a, b) = pair(seed, dim);
        let (cm, dm) = pair(seed.wrapping_add(1), dim);
        let sum_ab = HpdMatrix::new(a.as_hermitian().add(b.as_hermitian()).unwrap()).unwrap();
        let sum_cd = HpdMatrix::new(cm.as_hermitian().add(dm.as_hermitian()).unwrap()).unwrap();
        let lhs = thompson_distance(&sum_ab, &sum_cd).unwrap();
        let rhs = thompson_distance(&a, &cm).unwrap().max(thompson_distance(&b, &dm).unwrap());
        prop_assert!(lhs <= rhs + 1e-10);
    }

    #[test]
    fn thompson_power_contraction(seed in any::<u64>(), dim in 1usize..=5, t in 0.0f64..=1.0) {
        let (a, b) = pair(seed, dim);
        let lhs = thompson_distance(&a.pow(t).unwrap(), &b.pow(t).unwrap()).unwrap();
        prop_assert!(lhs <= t * thompson_distance(&a, &b).unwrap() + 1e-10);
    }

    #[test]
    fn geodesic_convexity(seed in any::<u64>(), dim in 1usize..=5, s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        let (a, b) = pair(seed, dim);
        let (cm, dm) = pair(seed.wrapping_add(7), dim);
        let lhs = thompson_distance(
            &metric_geometric(&a, &b, s).unwrap(),
            &metric_geometric(&cm, &dm, t).unwrap(),
        )
        .unwrap();
        let (dac, dbd) = (thompson_distance(&a, &cm).unwrap(), thompson_distance(&b, &dm).unwrap());
        let via_ab = (1.0 - t) * dac + t * dbd + (s - t).abs() * thompson_distance(&a, &b).unwrap();
        let via_cd = (1.0 - s) * dac + s * dbd + (s - t).abs() * thompson_distance(&cm, &dm).unwrap();
        prop_assert!(lhs <= via_ab + 1e-9);
        prop_assert!(lhs <= via_cd + 1e-9);
    }

    #[test]
    fn geometric_congruence_invariance(seed in any::<u64>(), dim in 1usize..=5, t in -1.0f64..2.0) {
        let (a, b) = pair(seed, dim);
        let m = random_invertible(&spec(seed ^ 0xabc, dim, 0.5, 2.0)).unwrap();
        let lhs = congruence(&m, &metric_geometric(&a, &b, t).unwrap()).unwrap();
        let rhs = metric_geometric(&congruence(&m, &a).unwrap(), &congruence(&m, &b).unwrap(), t).unwrap();
        prop_assert!(rel_diff(lhs.matrix(), rhs.matrix()) < 1e-9);
    }

    #[test]
    fn commuting_collapse(seed in any::<u64>(), dim in 1usize..=5, t in 0.0f64..=1.0) {
        let fam = random_commuting_family(&spec(seed, dim, 0.1, 10.0), 2).unwrap();
        let (a, b) = (&fam.items()[0], &fam.items()[1]);
        let at = a.pow(1.0 - t).unwrap();
        let bt = b.pow(t).unwrap();
        let reference: CMatrix = at.matrix() * bt.matrix();
        prop_assert!(rel_diff(metric_geometric(a, b, t).unwrap().matrix(), &reference) < 1e-10);
        prop_assert!(rel_diff(spectral_geometric(a, b, t).unwrap().matrix(), &reference) < 1e-10);
    }

    #[test]
    fn endpoints(seed in any::<u64>(), dim in 1usize..=6) {
        let (a, b) = pair(seed, dim);
        for mean in [spectral_geometric, wasserstein_mean, metric_geometric] {
            prop_assert!(rel_diff(mean(&a, &b, 0.0).unwrap().matrix(), a.matrix()) < 1e-11);
            prop_assert!(rel_diff(mean(&a, &b, 1.0).unwrap().matrix(), b.matrix()) < 1e-11);
        }
    }
}

#[test]
fn wasserstein_outside_unit_interval() {
    let a = HpdMatrix::diagonal(&[1.0, 4.0]).unwrap();
    let b = HpdMatrix::diagonal(&[9.0, 16.0]).unwrap();
    // C = diag(3, 2): 1 - t + t c must stay positive
    assert!(wasserstein_mean(&a, &b, -0.4).is_ok());
    assert!(matches!(wasserstein_mean(&a, &b, -0.5), Err(Error::Domain(_))));
    let w = wasserstein_mean(&a, &b, 1.5).unwrap();
    let d = HpdMatrix::diagonal(&[16.0, 25.0]).unwrap();
    assert!(rel_diff(w.matrix(), d.matrix()) < 1e-12);
}

#[test]
fn distances_vanish_on_equal_inputs() {
    let (a, _) = pair(3, 4);
    assert!(thompson_distance(&a, &a).unwrap() < 1e-12);
    assert!(spectral_semimetric(&a, &a).unwrap() < 1e-12);
}
