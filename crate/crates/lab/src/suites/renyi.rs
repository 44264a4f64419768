//! Rényi power mean suites.

use meanlab_core::asymptotics::{renyi_zero_limit_study, RenyiHypothesis, StudyOptions};
use meanlab_core::hpd::{congruence, log_det};
use meanlab_core::multi::{log_euclidean, quasi_arithmetic, renyi_power_mean, MatrixTuple, WeightVector};
use meanlab_core::order::{loewner_cmp, near_order_cmp};
use meanlab_core::sampling::{random_commuting_family, random_tuple, random_unitary, random_weights};
use meanlab_core::HpdMatrix;

use super::multi::{draw_instance, rel_diff};
use super::{gate, Property, Trial};
use crate::error::LabResult;

/// `(t, z)` pairs exercised by the suites.
pub const RENYI_PARAMETERS: [(f64, f64); 4] = [(0.0, 0.5), (0.2, 0.6), (0.5, 0.75), (0.7, 1.0)];

/// Exponents `p` for powered tuples.
pub const POWER_GRID: [f64; 3] = [0.2, 0.1, 0.05];

const ITERATION_BUDGET: usize = 200;

fn draw_parameters(trial: &mut Trial<'_>) -> (f64, f64) {
    let (t, z) = trial.choose(&RENYI_PARAMETERS);
    trial.param("t", t);
    trial.param("z", z);
    (t, z)
}

fn solve(trial: &Trial<'_>, t: f64, z: f64, w: &WeightVector, a: &MatrixTuple) -> LabResult<HpdMatrix> {
    Ok(renyi_power_mean(t, z, w, a, trial.solver)?.0)
}

pub(super) const PROPERTIES: &[Property] = &[
    gate("converges within 200 iterations"),
    gate("commuting family gives quasi(1-t)"),
    gate("homogeneity"),
    gate("permutation invariance"),
    gate("repetition invariance"),
    gate("unitary covariance"),
    gate("inverse tuple dominates inverse"),
    gate("norm bound for t >= 1/2"),
];

pub(super) fn renyi_properties(trial: &mut Trial<'_>) -> LabResult<()> {
    let (t, z) = draw_parameters(trial);
    let (w, a) = draw_instance(trial, 1, 4)?;
    let (x, trace) = renyi_power_mean(t, z, &w, &a, trial.solver)?;
    let ok = trace.converged
        && trace.iterations <= ITERATION_BUDGET
        && trace.last_residual() <= trial.solver.residual_tol;
    trial.record(
        "converges within 200 iterations",
        ITERATION_BUDGET as f64 - trace.iterations as f64,
        ok,
    );

    let fam = random_commuting_family(&trial.sub_spec(1), a.len())?;
    trial.input_tuple("C", &fam);
    let d = rel_diff(&solve(trial, t, z, &w, &fam)?, &quasi_arithmetic(1.0 - t, &w, &fam)?);
    trial.bound("commuting family gives quasi(1-t)", d, 1e-8, 0.0);

    for c in [0.1, 7.0] {
        let d = rel_diff(&solve(trial, t, z, &w, &a.scaled(c)?)?, &x.scale(c)?);
        trial.bound("homogeneity", d, 1e-9, 0.0);
    }
    let sigma: Vec<usize> = (0..a.len()).rev().collect();
    let d = rel_diff(&solve(trial, t, z, &w.permuted(&sigma)?, &a.permuted(&sigma)?)?, &x);
    trial.bound("permutation invariance", d, 1e-9, 0.0);
    for k in [2, 3] {
        let d = rel_diff(&solve(trial, t, z, &w.repeated(k)?, &a.repeated(k)?)?, &x);
        trial.bound("repetition invariance", d, 1e-9, 0.0);
    }
    let u = random_unitary(&trial.sub_spec(2))?;
    let d = rel_diff(&solve(trial, t, z, &w, &a.congruence(&u)?)?, &congruence(&u, &x)?);
    trial.bound("unitary covariance", d, 1e-9, 0.0);

    let y = solve(trial, t, z, &w, &a.inverted()?)?;
    let v = loewner_cmp(&x.inv()?, &y, &trial.tol)?;
    trial.verdict("inverse tuple dominates inverse", &v);

    if t >= 0.5 {
        let bound: f64 = w.as_slice().iter().zip(a.iter()).map(|(wj, aj)| wj * aj.operator_norm()).sum();
        trial.bound("norm bound for t >= 1/2", x.operator_norm(), bound, 1e-8);
    } else {
        trial.vacuous("norm bound for t >= 1/2");
    }
    Ok(())
}

pub(super) const LOGDET: &[Property] = &[
    gate("log det dominates weighted log dets"),
    gate("equality on constant tuples"),
];

pub(super) fn renyi_logdet(trial: &mut Trial<'_>) -> LabResult<()> {
    let (t, z) = draw_parameters(trial);
    let (w, a) = draw_instance(trial, 1, 4)?;
    let x = solve(trial, t, z, &w, &a)?;
    let rhs: f64 = w.as_slice().iter().zip(a.iter()).map(|(wj, aj)| wj * log_det(aj)).sum();
    trial.bound("log det dominates weighted log dets", rhs, log_det(&x), 1e-8);

    let c = MatrixTuple::constant(a.items()[0].clone(), a.len())?;
    let xc = solve(trial, t, z, &w, &c)?;
    trial.bound(
        "equality on constant tuples",
        (log_det(&xc) - log_det(&a.items()[0])).abs(),
        1e-6,
        0.0,
    );
    Ok(())
}

/// A tuple whose spectra all lie in `(lo, 1]` (even trials) or `[1, hi)`.
fn hypothesis_instance(trial: &mut Trial<'_>) -> LabResult<(RenyiHypothesis, WeightVector, MatrixTuple)> {
    let (lo, hi) = trial.spec.spectrum_range;
    let (hyp, spec) = if trial.index % 2 == 0 {
        (RenyiHypothesis::BelowIdentity, trial.spec.with_range(lo.min(0.5), 1.0))
    } else {
        (RenyiHypothesis::AboveIdentity, trial.spec.with_range(1.0, hi.max(2.0)))
    };
    let n = trial.draw_count(1, 4);
    let w = random_weights(&spec, n)?;
    let a = random_tuple(&spec, n)?;
    trial.input_weights(&w);
    trial.input_tuple("A", &a);
    trial.param("hypothesis", format!("{hyp:?}"));
    Ok((hyp, w, a))
}

pub(super) const QUASI: &[Property] = &[
    gate("below identity: mean ≤ I"),
    gate("below identity: root ⪯ quasi(1-t)"),
    gate("above identity: I ≤ mean"),
    gate("above identity: quasi(1-t) ⪯ root"),
    gate("above identity: log-euclidean ⪯ root"),
];

pub(super) fn renyi_quasi(trial: &mut Trial<'_>) -> LabResult<()> {
    let (t, z) = draw_parameters(trial);
    let (hyp, w, a) = hypothesis_instance(trial)?;
    let id = HpdMatrix::identity(a.dim());
    for p in std::iter::once(1.0).chain(POWER_GRID) {
        let ap = a.powered(p)?;
        let x = solve(trial, t, z, &w, &ap)?;
        let root = x.pow(1.0 / (1.0 - t))?;
        let q = quasi_arithmetic(1.0 - t, &w, &ap)?;
        match hyp {
            RenyiHypothesis::BelowIdentity => {
                let side = loewner_cmp(&x, &id, &trial.tol)?;
                trial.verdict("below identity: mean ≤ I", &side);
                if side.holds {
                    let v = near_order_cmp(&root, &q, &trial.tol)?;
                    trial.verdict("below identity: root ⪯ quasi(1-t)", &v);
                } else {
                    trial.vacuous("below identity: root ⪯ quasi(1-t)");
                }
            }
            RenyiHypothesis::AboveIdentity => {
                let side = loewner_cmp(&id, &x, &trial.tol)?;
                trial.verdict("above identity: I ≤ mean", &side);
                if side.holds {
                    let v = near_order_cmp(&q, &root, &trial.tol)?;
                    trial.verdict("above identity: quasi(1-t) ⪯ root", &v);
                    let v = near_order_cmp(&log_euclidean(&w, &ap)?, &root, &trial.tol)?;
                    trial.verdict("above identity: log-euclidean ⪯ root", &v);
                } else {
                    trial.vacuous("above identity: quasi(1-t) ⪯ root");
                    trial.vacuous("above identity: log-euclidean ⪯ root");
                }
            }
        }
    }
    Ok(())
}

pub(super) const LE: &[Property] = &[
    gate("negative side ⪯ positive side"),
    gate("positive side ⪯ quasi(p) of powered tuple"),
    gate("log-euclidean ⪯ quasi(p) of powered tuple"),
    gate("quasi(-p) of powered tuple ⪯ negative side"),
    gate("quasi(-p) of powered tuple ⪯ log-euclidean"),
];

pub(super) fn renyi_le(trial: &mut Trial<'_>) -> LabResult<()> {
    let (t, z) = draw_parameters(trial);
    let (hyp, w, a) = hypothesis_instance(trial)?;
    let opts = StudyOptions {
        solver: trial.solver.clone(),
        tolerance: trial.tol,
        include_negative: false,
    };
    let study = renyi_zero_limit_study(t, z, &w, &a, &POWER_GRID, Some(hyp), &opts)?;
    for nv in study.verdicts() {
        trial.verdict(&nv.name, &nv.verdict);
    }
    let skipped: &[&str] = match hyp {
        RenyiHypothesis::BelowIdentity => &LE_ABOVE_ONLY,
        RenyiHypothesis::AboveIdentity => &LE_BELOW_ONLY,
    };
    for name in skipped {
        trial.vacuous(name);
    }
    if let Some(last) = study.rows.last() {
        trial.summarize("max distance to log-euclidean at smallest p", last.distance, true);
    }
    Ok(())
}

const LE_BELOW_ONLY: [&str; 2] = [
    "positive side ⪯ quasi(p) of powered tuple",
    "log-euclidean ⪯ quasi(p) of powered tuple",
];
const LE_ABOVE_ONLY: [&str; 2] = [
    "quasi(-p) of powered tuple ⪯ negative side",
    "quasi(-p) of powered tuple ⪯ log-euclidean",
];
