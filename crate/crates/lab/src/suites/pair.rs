//! Two-variable suites: Thompson metric, near-order characterizations and
//! the pair means.

use meanlab_core::hpd::congruence;
use meanlab_core::order::{near_order_cmp, profile_relations, OrderVerdict, Relation};
use meanlab_core::pair::{
    fidelity, inverse_geometric_mean, metric_geometric, spectral_geometric, thompson_distance,
    wasserstein_mean,
};
use meanlab_core::sampling::{
    hermitian_with, random_chaotic_pair, random_hpd, random_invertible, random_loewner_pair,
    random_near_ordered_pair, random_unordered_pair,
};
use meanlab_core::{Error, HermitianMatrix, HpdMatrix};

use super::{gate, Property, Trial};
use crate::error::LabResult;

fn near(trial: &Trial<'_>, a: &HpdMatrix, b: &HpdMatrix) -> LabResult<OrderVerdict> {
    Ok(near_order_cmp(a, b, &trial.tol)?)
}

pub(super) const THOMPSON: &[Property] = &[
    gate("inversion invariance"),
    gate("congruence invariance"),
    gate("sum contraction"),
    gate("power contraction"),
    gate("metric geometric mean continuity"),
];

pub(super) fn thompson_lemma(trial: &mut Trial<'_>) -> LabResult<()> {
    let (a, b) = random_unordered_pair(&trial.spec)?;
    let (c, d) = random_unordered_pair(&trial.sub_spec(1))?;
    let m = random_invertible(&trial.sub_spec(2).with_range(0.5, 2.0))?;
    for (name, x) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
        trial.input(name, x);
    }
    let dab = thompson_distance(&a, &b)?;
    let scale = 1e-9 * dab.max(1.0);

    let dinv = thompson_distance(&a.inv()?, &b.inv()?)?;
    trial.bound("inversion invariance", (dinv - dab).abs(), 0.0, scale);
    let dcong = thompson_distance(&congruence(&m, &a)?, &congruence(&m, &b)?)?;
    trial.bound("congruence invariance", (dcong - dab).abs(), 0.0, scale);

    let (dac, dbd) = (thompson_distance(&a, &c)?, thompson_distance(&b, &d)?);
    let ab_sum = HpdMatrix::new(a.as_hermitian().add(b.as_hermitian())?)?;
    let cd_sum = HpdMatrix::new(c.as_hermitian().add(d.as_hermitian())?)?;
    trial.bound("sum contraction", thompson_distance(&ab_sum, &cd_sum)?, dac.max(dbd), 1e-10);

    let t = trial.draw_real(0.0, 1.0);
    trial.param("t", t);
    let dpow = thompson_distance(&a.pow(t)?, &b.pow(t)?)?;
    trial.bound("power contraction", dpow, t * dab, 1e-10);

    let s = trial.draw_real(0.0, 1.0);
    trial.param("s", s);
    let lhs = thompson_distance(&metric_geometric(&a, &b, s)?, &metric_geometric(&c, &d, t)?)?;
    let dcd = thompson_distance(&c, &d)?;
    let via_ab = (1.0 - t) * dac + t * dbd + (s - t).abs() * dab;
    let via_cd = (1.0 - s) * dac + s * dbd + (s - t).abs() * dcd;
    trial.bound("metric geometric mean continuity", lhs, via_ab.min(via_cd), 1e-9);
    Ok(())
}

pub(super) const EQUIVALENCE: &[Property] = &[
    gate("seven conditions agree"),
    gate("antisymmetry"),
];

pub(super) fn equivalence_7way(trial: &mut Trial<'_>) -> LabResult<()> {
    let (a, b) = if trial.index % 2 == 0 {
        random_near_ordered_pair(&trial.spec)?
    } else {
        random_unordered_pair(&trial.spec)?
    };
    trial.input("A", &a);
    trial.input("B", &b);
    let eps = trial.tol.effective(&a, &b);
    let sp = spectral_geometric(&a, &b, 0.5)?;
    let wa = wasserstein_mean(&a, &b, 0.5)?;
    let margins = [
        near(trial, &a, &b)?.margin,
        inverse_geometric_mean(&a, &b)?.min_eigenvalue() - 1.0,
        1.0 - metric_geometric(&a, &b.inv()?, 0.5)?.max_eigenvalue(),
        near(trial, &a, &sp)?.margin,
        near(trial, &sp, &b)?.margin,
        near(trial, &a, &wa)?.margin,
        near(trial, &wa, &b)?.margin,
    ];
    let expected = margins[0] >= -eps;
    trial.check("seven conditions agree", margins.iter().all(|m| (*m >= -eps) == expected));

    // near-equal pair B' = C A C with C = I + εH, ‖H‖ = 1
    let log_eps = trial.draw_real(-14.0, -4.0);
    let h = hermitian_with(&mut trial.spec.rng("antisymmetry"), a.dim(), 1.0)?;
    let c = HpdMatrix::new(HermitianMatrix::identity(a.dim()).add(&h.scale(10f64.powf(log_eps)))?)?;
    let b2 = congruence(c.matrix(), &a)?;
    let (ab, ba) = (near(trial, &a, &b2)?, near(trial, &b2, &a)?);
    if ab.holds && ba.holds {
        let diff = a.as_hermitian().sub(b2.as_hermitian())?.operator_norm()?;
        trial.bound("antisymmetry", diff, 1e-6 * a.operator_norm(), 0.0);
    } else {
        trial.vacuous("antisymmetry");
    }
    Ok(())
}

const PARAMETER_GRID: [f64; 7] = [-0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5];

/// `A ◇_t B`, or `None` outside its domain.
fn wasserstein_opt(a: &HpdMatrix, b: &HpdMatrix, t: f64) -> LabResult<Option<HpdMatrix>> {
    match wasserstein_mean(a, b, t) {
        Ok(m) => Ok(Some(m)),
        Err(Error::Domain(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

type PairMean = fn(&HpdMatrix, &HpdMatrix, f64) -> LabResult<Option<HpdMatrix>>;

fn spectral_opt(a: &HpdMatrix, b: &HpdMatrix, t: f64) -> LabResult<Option<HpdMatrix>> {
    Ok(Some(spectral_geometric(a, b, t)?))
}

pub(super) const MONO_SP_WASS: &[Property] = &[
    gate("forward: spectral geometric"),
    gate("forward: Wasserstein"),
    gate("iff: spectral geometric"),
    gate("iff: Wasserstein"),
];

pub(super) fn mono_sp_wass(trial: &mut Trial<'_>) -> LabResult<()> {
    let (a, b) = random_near_ordered_pair(&trial.spec)?;
    let (ua, ub) = random_unordered_pair(&trial.sub_spec(1))?;
    for (name, x) in [("A", &a), ("B", &b), ("U", &ua), ("V", &ub)] {
        trial.input(name, x);
    }
    let means: [(&str, &str, PairMean); 2] = [
        ("forward: spectral geometric", "iff: spectral geometric", spectral_opt),
        ("forward: Wasserstein", "iff: Wasserstein", wasserstein_opt),
    ];
    for (forward, iff, mean) in means {
        let on_ordered: Vec<_> = PARAMETER_GRID.iter().map(|&t| mean(&a, &b, t)).collect::<LabResult<_>>()?;
        let on_unordered: Vec<_> = PARAMETER_GRID.iter().map(|&t| mean(&ua, &ub, t)).collect::<LabResult<_>>()?;
        let base = near(trial, &ua, &ub)?;
        for i in 0..PARAMETER_GRID.len() {
            for j in i + 1..PARAMETER_GRID.len() {
                match (&on_ordered[i], &on_ordered[j]) {
                    (Some(x), Some(y)) => {
                        let v = near(trial, x, y)?;
                        trial.verdict(forward, &v);
                    }
                    _ => trial.vacuous(forward),
                }
                match (&on_unordered[i], &on_unordered[j]) {
                    (Some(x), Some(y)) => {
                        let v = near(trial, x, y)?;
                        let consistent = v.holds == base.holds || v.is_boundary() || base.is_boundary();
                        trial.check(iff, consistent);
                    }
                    _ => trial.vacuous(iff),
                }
            }
        }
    }
    Ok(())
}

pub(super) const IN_BETWEENNESS: &[Property] = &[
    gate("A ⪯ spectral geometric mean"),
    gate("spectral geometric mean ⪯ B"),
    gate("A ⪯ Wasserstein mean"),
    gate("Wasserstein mean ⪯ B"),
    gate("metric geometric mean between Loewner-ordered endpoints"),
];

pub(super) fn in_betweenness(trial: &mut Trial<'_>) -> LabResult<()> {
    let (a, b) = random_near_ordered_pair(&trial.spec)?;
    let (la, lb) = random_loewner_pair(&trial.sub_spec(1))?;
    for (name, x) in [("A", &a), ("B", &b), ("LA", &la), ("LB", &lb)] {
        trial.input(name, x);
    }
    for t in [0.25, 0.5, 0.75] {
        let sp = spectral_geometric(&a, &b, t)?;
        let wa = wasserstein_mean(&a, &b, t)?;
        let v = near(trial, &a, &sp)?;
        trial.verdict("A ⪯ spectral geometric mean", &v);
        let v = near(trial, &sp, &b)?;
        trial.verdict("spectral geometric mean ⪯ B", &v);
        let v = near(trial, &a, &wa)?;
        trial.verdict("A ⪯ Wasserstein mean", &v);
        let v = near(trial, &wa, &b)?;
        trial.verdict("Wasserstein mean ⪯ B", &v);
        let g = metric_geometric(&la, &lb, t)?;
        let lower = Relation::Loewner.compare(&la, &g, &trial.tol)?;
        let upper = Relation::Loewner.compare(&g, &lb, &trial.tol)?;
        let worst = if lower.margin < upper.margin { lower } else { upper };
        trial.verdict("metric geometric mean between Loewner-ordered endpoints", &worst);
    }
    Ok(())
}

pub(super) const NEAR_SP_WASS: &[Property] = &[
    gate("spectral geometric ⪯ Wasserstein"),
    gate("congruence by A^1/2 preserves it"),
    gate("Loewner pair gives unit lower bound"),
];

pub(super) fn near_sp_wass(trial: &mut Trial<'_>) -> LabResult<()> {
    let (a, b) = random_unordered_pair(&trial.spec)?;
    let (la, lb) = random_loewner_pair(&trial.sub_spec(1))?;
    for (name, x) in [("A", &a), ("B", &b), ("LA", &la), ("LB", &lb)] {
        trial.input(name, x);
    }
    let ah = a.sqrt()?;
    for k in 1..=9 {
        let t = k as f64 / 10.0;
        let sp = spectral_geometric(&a, &b, t)?;
        let wa = wasserstein_mean(&a, &b, t)?;
        let v = near(trial, &sp, &wa)?;
        trial.verdict("spectral geometric ⪯ Wasserstein", &v);
    }
    for t in [0.25, 0.5, 0.75] {
        let lhs = congruence(ah.matrix(), &spectral_geometric(&a, &b, t)?)?;
        let rhs = congruence(ah.matrix(), &wasserstein_mean(&a, &b, t)?)?;
        let v = near(trial, &lhs, &rhs)?;
        trial.verdict("congruence by A^1/2 preserves it", &v);
    }
    let w = wasserstein_mean(&la.inv()?, &lb, 0.5)?;
    trial.bound("Loewner pair gives unit lower bound", 1.0, w.min_eigenvalue(), 1e-8);
    Ok(())
}

pub(super) const FIDELITY: &[Property] = &[
    gate("near-order preserved by powers p >= 1"),
    gate("near-order reversed by powers p <= -1"),
    gate("fidelity doubling from below"),
    gate("fidelity doubling from above"),
];

pub(super) fn fidelity_recursion(trial: &mut Trial<'_>) -> LabResult<()> {
    let (a, b) = random_near_ordered_pair(&trial.spec.with_range(0.3, 3.0))?;
    trial.input("A", &a);
    trial.input("B", &b);
    for p in [1.0, 1.5, 2.0, 3.0] {
        let v = near(trial, &a.pow(p)?, &b.pow(p)?)?;
        trial.verdict("near-order preserved by powers p >= 1", &v);
    }
    for p in [-1.0, -2.0] {
        let v = near(trial, &b.pow(p)?, &a.pow(p)?)?;
        trial.verdict("near-order reversed by powers p <= -1", &v);
    }

    // B >= I makes A^{1/2} ⪯ F(A, B) likely
    let fa = random_hpd(&trial.sub_spec(1).with_range(0.5, 2.0))?;
    let fb = random_hpd(&trial.sub_spec(2).with_range(1.0, 3.0))?;
    trial.input("FA", &fa);
    trial.input("FB", &fb);
    if near(trial, &fa.sqrt()?, &fidelity(&fa, &fb)?)?.holds {
        for n in 1..=3 {
            let lhs = fa.pow(2f64.powi(n - 1))?;
            let rhs = fidelity(&fa.pow(2f64.powi(n))?, &fb)?;
            let v = near(trial, &lhs, &rhs)?;
            trial.verdict("fidelity doubling from below", &v);
        }
    } else {
        trial.vacuous("fidelity doubling from below");
    }

    // A <= I makes F(B, A) ⪯ B^{1/2} likely
    let ga = random_hpd(&trial.sub_spec(3).with_range(0.3, 1.0))?;
    let gb = random_hpd(&trial.sub_spec(4).with_range(0.5, 2.0))?;
    trial.input("GA", &ga);
    trial.input("GB", &gb);
    if near(trial, &fidelity(&gb, &ga)?, &gb.sqrt()?)?.holds {
        for n in 1..=3 {
            let lhs = fidelity(&gb.pow(2f64.powi(n))?, &ga)?;
            let rhs = gb.pow(2f64.powi(n - 1))?;
            let v = near(trial, &lhs, &rhs)?;
            trial.verdict("fidelity doubling from above", &v);
        }
    } else {
        trial.vacuous("fidelity doubling from above");
    }
    Ok(())
}

pub(super) const RELATION_CHAIN: &[Property] = &[
    gate("sampled relation holds"),
    gate("loewner ⟹ chaotic"),
    gate("chaotic ⟹ near"),
    gate("near ⟹ eigen-entrywise"),
    gate("eigen-entrywise ⟹ weak-log-majorization"),
];

pub(super) fn relation_chain(trial: &mut Trial<'_>) -> LabResult<()> {
    let sampler = trial.index % 4;
    let (a, b) = match sampler {
        0 => random_loewner_pair(&trial.spec)?,
        1 => random_chaotic_pair(&trial.spec)?,
        2 => random_near_ordered_pair(&trial.spec)?,
        _ => random_unordered_pair(&trial.spec)?,
    };
    trial.input("A", &a);
    trial.input("B", &b);
    trial.param("sampler", sampler);
    let profile = profile_relations(&a, &b, &trial.tol)?;
    match sampler {
        0 => trial.verdict("sampled relation holds", &profile.loewner),
        1 => trial.verdict("sampled relation holds", &profile.chaotic),
        2 => trial.verdict("sampled relation holds", &profile.near),
        _ => trial.vacuous("sampled relation holds"),
    }
    for (k, link) in RELATION_CHAIN[1..].iter().enumerate() {
        let (ante, cons) = (profile.verdict(Relation::CHAIN[k]), profile.verdict(Relation::CHAIN[k + 1]));
        if ante.holds && !ante.is_boundary() {
            trial.verdict(link.name, cons);
        } else {
            trial.vacuous(link.name);
        }
    }
    Ok(())
}
