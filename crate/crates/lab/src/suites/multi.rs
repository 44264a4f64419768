//! Multi-variable suites: power-mean chains, log-Euclidean bounds, Karcher
//! mean and Wasserstein barycenter.

use meanlab_core::asymptotics::{qp_le_convergence_study, StudyOptions};
use meanlab_core::multi::{
    arithmetic_mean, harmonic_mean, karcher_mean, log_euclidean, quasi_arithmetic,
    wasserstein_barycenter, MatrixTuple, WeightVector,
};
use meanlab_core::order::{loewner_cmp, near_order_cmp, weak_log_majorization_cmp, OrderVerdict};
use meanlab_core::pair::wasserstein_mean;
use meanlab_core::sampling::{random_loewner_pair, random_tuple, random_weights};
use meanlab_core::HpdMatrix;

use super::{gate, observe, Property, Trial};
use crate::error::LabResult;

pub(super) fn rel_diff(x: &HpdMatrix, y: &HpdMatrix) -> f64 {
    (x.matrix() - y.matrix()).norm() / y.matrix().norm().max(f64::MIN_POSITIVE)
}

/// Weights and a tuple of `n` matrices from the trial spec.
pub(super) fn draw_instance(trial: &mut Trial<'_>, n_lo: usize, n_hi: usize) -> LabResult<(WeightVector, MatrixTuple)> {
    let n = trial.draw_count(n_lo, n_hi);
    let w = random_weights(&trial.spec, n)?;
    let a = random_tuple(&trial.spec, n)?;
    trial.input_weights(&w);
    trial.input_tuple("A", &a);
    Ok((w, a))
}

fn near(trial: &Trial<'_>, a: &HpdMatrix, b: &HpdMatrix) -> LabResult<OrderVerdict> {
    Ok(near_order_cmp(a, b, &trial.tol)?)
}

fn loewner(trial: &Trial<'_>, a: &HpdMatrix, b: &HpdMatrix) -> LabResult<OrderVerdict> {
    Ok(loewner_cmp(a, b, &trial.tol)?)
}

pub(super) const KIM18: &[Property] = &[
    gate("quasi(-t) ≤ quasi(-s)"),
    gate("quasi(-s) ≤ harmonic"),
    gate("harmonic ≤ arithmetic"),
    gate("arithmetic ≤ quasi(s)"),
    gate("quasi(s) ≤ quasi(t)"),
];

pub(super) fn kim18_chain(trial: &mut Trial<'_>) -> LabResult<()> {
    let (w, a) = draw_instance(trial, 2, 5)?;
    let (x, y) = (trial.draw_real(1.0, 3.0), trial.draw_real(1.0, 3.0));
    let (s, t) = (x.min(y), x.max(y));
    trial.param("s", s);
    trial.param("t", t);
    let chain = [
        quasi_arithmetic(-t, &w, &a)?,
        quasi_arithmetic(-s, &w, &a)?,
        harmonic_mean(&w, &a)?,
        arithmetic_mean(&w, &a)?,
        quasi_arithmetic(s, &w, &a)?,
        quasi_arithmetic(t, &w, &a)?,
    ];
    for (k, link) in KIM18.iter().enumerate() {
        let v = loewner(trial, &chain[k], &chain[k + 1])?;
        trial.verdict(link.name, &v);
    }
    Ok(())
}

pub(super) const MONO_VARIABLES: &[Property] = &[
    gate("positive exponents"),
    gate("negative exponents"),
];

pub(super) fn mono_variables(trial: &mut Trial<'_>) -> LabResult<()> {
    let n = trial.draw_count(1, 5);
    let pairs = (0..n)
        .map(|j| random_loewner_pair(&trial.sub_spec(j as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let a = MatrixTuple::new(pairs.iter().map(|p| p.0.clone()).collect())?;
    let b = MatrixTuple::new(pairs.iter().map(|p| p.1.clone()).collect())?;
    let w = random_weights(&trial.spec, n)?;
    trial.input_weights(&w);
    trial.input_tuple("A", &a);
    trial.input_tuple("B", &b);
    for p in [-1.0, -0.5, -0.25, 0.25, 0.5, 1.0] {
        let v = near(trial, &quasi_arithmetic(p, &w, &a)?, &quasi_arithmetic(p, &w, &b)?)?;
        let name = if p > 0.0 { "positive exponents" } else { "negative exponents" };
        trial.verdict(name, &v);
    }
    Ok(())
}

pub(super) const PARAMETER_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.8, 1.0];

pub(super) const MONO_PARAMETERS: &[Property] = &[
    gate("harmonic ⪯ quasi(-q)"),
    gate("quasi(-q) ⪯ quasi(-p)"),
    gate("quasi(-p) ⪯ log-euclidean"),
    gate("log-euclidean ⪯ quasi(p)"),
    gate("quasi(p) ⪯ quasi(q)"),
    gate("quasi(q) ⪯ arithmetic"),
    gate("constant tuple margins vanish"),
];

fn parameter_chain(trial: &mut Trial<'_>, w: &WeightVector, a: &MatrixTuple) -> LabResult<Vec<Vec<OrderVerdict>>> {
    let pos: Vec<_> = PARAMETER_GRID.iter().map(|&p| quasi_arithmetic(p, w, a)).collect::<Result<_, _>>()?;
    let neg: Vec<_> = PARAMETER_GRID.iter().map(|&p| quasi_arithmetic(-p, w, a)).collect::<Result<_, _>>()?;
    let (h, le, ar) = (harmonic_mean(w, a)?, log_euclidean(w, a)?, arithmetic_mean(w, a)?);
    let mut out = Vec::new();
    for i in 0..PARAMETER_GRID.len() {
        for j in i..PARAMETER_GRID.len() {
            let chain = [&h, &neg[j], &neg[i], &le, &pos[i], &pos[j], &ar];
            out.push(
                chain
                    .windows(2)
                    .map(|c| near(trial, c[0], c[1]))
                    .collect::<LabResult<_>>()?,
            );
        }
    }
    Ok(out)
}

pub(super) fn mono_parameters(trial: &mut Trial<'_>) -> LabResult<()> {
    let (w, a) = draw_instance(trial, 2, 5)?;
    for links in parameter_chain(trial, &w, &a)? {
        for (k, v) in links.iter().enumerate() {
            trial.verdict(MONO_PARAMETERS[k].name, v);
        }
    }
    let constant = MatrixTuple::constant(a.items()[0].clone(), a.len())?;
    for links in parameter_chain(trial, &w, &constant)? {
        for v in links {
            trial.bound("constant tuple margins vanish", v.margin.abs(), 0.0, 1e-10);
        }
    }
    Ok(())
}

pub(super) const MIXED_CHAIN: &[Property] = &[
    gate("quasi(-q) ≤ quasi(-p)"),
    gate("quasi(-p) ≤ harmonic"),
    gate("harmonic ⪯ quasi(-1/p)"),
    gate("quasi(-1/p) ⪯ quasi(-1/q)"),
    gate("quasi(-1/q) ⪯ log-euclidean"),
    gate("log-euclidean ⪯ quasi(1/q)"),
    gate("quasi(1/q) ⪯ quasi(1/p)"),
    gate("quasi(1/p) ⪯ arithmetic"),
    gate("quasi(1/p) ≤ arithmetic for p <= 2"),
    observe("quasi(1/p) ≤ arithmetic for p > 2"),
    gate("arithmetic ≤ quasi(p)"),
    gate("quasi(p) ≤ quasi(q)"),
];

pub(super) fn mixed_chain(trial: &mut Trial<'_>) -> LabResult<()> {
    let (w, a) = draw_instance(trial, 2, 5)?;
    let (x, y) = (trial.draw_real(1.0, 3.0), trial.draw_real(1.0, 3.0));
    let (p, q) = (x.min(y), x.max(y));
    trial.param("p", p);
    trial.param("q", q);
    let qa = |r: f64| quasi_arithmetic(r, &w, &a);
    let (h, le, ar) = (harmonic_mean(&w, &a)?, log_euclidean(&w, &a)?, arithmetic_mean(&w, &a)?);
    let (qmq, qmp, qmip, qmiq) = (qa(-q)?, qa(-p)?, qa(-1.0 / p)?, qa(-1.0 / q)?);
    let (qiq, qip, qp, qq) = (qa(1.0 / q)?, qa(1.0 / p)?, qa(p)?, qa(q)?);

    let v = loewner(trial, &qmq, &qmp)?;
    trial.verdict("quasi(-q) ≤ quasi(-p)", &v);
    let v = loewner(trial, &qmp, &h)?;
    trial.verdict("quasi(-p) ≤ harmonic", &v);
    let near_links = [
        ("harmonic ⪯ quasi(-1/p)", &h, &qmip),
        ("quasi(-1/p) ⪯ quasi(-1/q)", &qmip, &qmiq),
        ("quasi(-1/q) ⪯ log-euclidean", &qmiq, &le),
        ("log-euclidean ⪯ quasi(1/q)", &le, &qiq),
        ("quasi(1/q) ⪯ quasi(1/p)", &qiq, &qip),
        ("quasi(1/p) ⪯ arithmetic", &qip, &ar),
    ];
    for (name, x, y) in near_links {
        let v = near(trial, x, y)?;
        trial.verdict(name, &v);
    }
    let v = loewner(trial, &qip, &ar)?;
    if p <= 2.0 {
        trial.verdict("quasi(1/p) ≤ arithmetic for p <= 2", &v);
        trial.vacuous("quasi(1/p) ≤ arithmetic for p > 2");
    } else {
        trial.vacuous("quasi(1/p) ≤ arithmetic for p <= 2");
        trial.verdict("quasi(1/p) ≤ arithmetic for p > 2", &v);
    }
    let v = loewner(trial, &ar, &qp)?;
    trial.verdict("arithmetic ≤ quasi(p)", &v);
    let v = loewner(trial, &qp, &qq)?;
    trial.verdict("quasi(p) ≤ quasi(q)", &v);
    Ok(())
}

pub(super) const LE_NEAR: &[Property] = &[
    gate("harmonic ⪯ log-euclidean"),
    gate("log-euclidean ⪯ arithmetic"),
    gate("log-euclidean ⪯ quasi(p)"),
    gate("quasi(-p) ⪯ log-euclidean"),
    gate("quasi(p) ⪯ quasi(previous p)"),
    gate("quasi(-previous p) ⪯ quasi(-p)"),
];

pub(super) const LIMIT_GRID: [f64; 4] = [0.5, 0.1, 0.01, 0.001];

pub(super) fn le_near(trial: &mut Trial<'_>) -> LabResult<()> {
    let (w, a) = draw_instance(trial, 1, 5)?;
    let le = log_euclidean(&w, &a)?;
    let v = near(trial, &harmonic_mean(&w, &a)?, &le)?;
    trial.verdict("harmonic ⪯ log-euclidean", &v);
    let v = near(trial, &le, &arithmetic_mean(&w, &a)?)?;
    trial.verdict("log-euclidean ⪯ arithmetic", &v);
    let opts = StudyOptions {
        solver: trial.solver.clone(),
        tolerance: trial.tol,
        include_negative: false,
    };
    let study = qp_le_convergence_study(&w, &a, &LIMIT_GRID, &opts)?;
    for nv in study.verdicts() {
        trial.verdict(&nv.name, &nv.verdict);
    }
    Ok(())
}

pub(super) const CARTAN_LE_WASS: &[Property] = &[
    gate("Karcher residual within solver tolerance"),
    gate("Karcher ≺log log-euclidean"),
    gate("log-euclidean ≺wlog barycenter"),
    gate("barycenter ≤ arithmetic"),
    gate("two-point barycenter equals Wasserstein mean"),
];

pub(super) fn cartan_le_wass(trial: &mut Trial<'_>) -> LabResult<()> {
    let (w, a) = draw_instance(trial, 2, 5)?;
    let (k, trace) = karcher_mean(&w, &a, trial.solver)?;
    trial.bound(
        "Karcher residual within solver tolerance",
        trace.last_residual(),
        trial.solver.residual_tol,
        0.0,
    );
    let le = log_euclidean(&w, &a)?;
    let v = weak_log_majorization_cmp(&k, &le, &trial.tol, true)?;
    trial.verdict("Karcher ≺log log-euclidean", &v);
    let (om, _) = wasserstein_barycenter(&w, &a, trial.solver)?;
    let v = weak_log_majorization_cmp(&le, &om, &trial.tol, false)?;
    trial.verdict("log-euclidean ≺wlog barycenter", &v);
    let v = loewner(trial, &om, &arithmetic_mean(&w, &a)?)?;
    trial.verdict("barycenter ≤ arithmetic", &v);

    let t = trial.draw_real(0.05, 0.95);
    trial.param("t", t);
    let pair = MatrixTuple::new(a.items()[..2].to_vec())?;
    let (om2, _) = wasserstein_barycenter(&WeightVector::pair(t)?, &pair, trial.solver)?;
    let d = rel_diff(&om2, &wasserstein_mean(&a.items()[0], &a.items()[1], t)?);
    trial.bound("two-point barycenter equals Wasserstein mean", d, 1e-8, 0.0);
    Ok(())
}
