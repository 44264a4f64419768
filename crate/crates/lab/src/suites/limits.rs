//! Lie-Trotter suite.

use meanlab_core::asymptotics::{lie_trotter_limit_study, MultiMean, StudyOptions};
use meanlab_core::sampling::{random_curves, random_weights};

use super::{gate, Property, Trial};
use crate::error::LabResult;

pub const LIE_TROTTER_GRID: [f64; 4] = [0.02, 0.01, 0.005, 0.0025];

/// Means whose Lie-Trotter convergence is checked.
pub const LIE_TROTTER_MEANS: [MultiMean; 4] = [
    MultiMean::Arithmetic,
    MultiMean::Harmonic,
    MultiMean::Quasi { p: 0.5 },
    MultiMean::Quasi { p: -0.5 },
];

pub(super) const LIE_TROTTER: &[Property] = &[
    gate("estimated order within [0.7, 1.3]"),
    gate("terminal error at most 5e-3"),
    gate("harmonic ⪯ mean"),
    gate("mean ⪯ arithmetic"),
    gate("error sandwiched by arithmetic and harmonic"),
];

pub(super) fn lie_trotter(trial: &mut Trial<'_>) -> LabResult<()> {
    let n = trial.draw_count(2, 4);
    let w = random_weights(&trial.spec, n)?;
    let curves = random_curves(&trial.spec, n, 0.5, 2.0)?;
    trial.input_weights(&w);
    for (j, c) in curves.iter().enumerate() {
        trial.input(&format!("expH{j}"), &c.eval(1.0)?);
    }
    let opts = StudyOptions {
        solver: trial.solver.clone(),
        tolerance: trial.tol,
        include_negative: false,
    };
    let mut errors = Vec::new();
    for mean in &LIE_TROTTER_MEANS {
        let study = lie_trotter_limit_study(mean, &w, &curves, &LIE_TROTTER_GRID, &opts)?;
        match study.estimated_order {
            Some(order) => {
                let slack = 0.3 - (order - 1.0).abs();
                trial.record("estimated order within [0.7, 1.3]", slack, slack >= 0.0);
                trial.summarize("min estimated order", order, false);
                trial.summarize("max estimated order", order, true);
            }
            None => trial.vacuous("estimated order within [0.7, 1.3]"),
        }
        let terminal = *study.distances().last().expect("non-empty grid");
        trial.bound("terminal error at most 5e-3", terminal, 5e-3, 0.0);
        trial.summarize("max terminal error", terminal, true);
        for nv in study.verdicts() {
            trial.verdict(&nv.name, &nv.verdict);
        }
        errors.push(study.distances());
    }
    for e in &errors[2..] {
        for (k, x) in e.iter().enumerate() {
            trial.bound(
                "error sandwiched by arithmetic and harmonic",
                *x,
                errors[0][k].max(errors[1][k]),
                1e-6,
            );
        }
    }
    Ok(())
}
