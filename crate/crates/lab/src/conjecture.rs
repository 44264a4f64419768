//! Randomized search for counterexamples to `LE(ω; 𝔸) ⪯ Ω(ω; 𝔸)`, the
//! near-order comparison of the log-Euclidean mean with the Wasserstein
//! barycenter.
//!
//! Every trial records the margin `λ_min(LE^{-1} # Ω) − 1`. The outcome is
//! data: negative margins are reported and dumped for replay, not treated as
//! failures.

use std::path::Path;
use std::time::Instant;

use meanlab_core::multi::{log_euclidean, wasserstein_barycenter, MatrixTuple, SolverConfig, WeightVector};
use meanlab_core::order::{near_order_cmp, OrderVerdict, ToleranceProfile};
use meanlab_core::sampling::{random_tuple, random_weights, SamplerSpec, MAX_SAMPLER_DIM};
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::error::{LabError, LabResult};
use crate::report::{ReportBody, RunInfo, SuiteReport, Tally, TrialId, SCHEMA_VERSION};
use crate::suites::{instance_stem, Instance};

pub const CONJECTURE_NAME: &str = "conjecture-le-omega";
const PROPERTY: &str = "log-euclidean ⪯ barycenter";

#[derive(Clone, Debug, PartialEq)]
pub struct ConjectureConfig {
    pub seed: u64,
    pub trials: u64,
    pub dims: (usize, usize),
    pub tuple_sizes: (usize, usize),
    pub spectrum_range: (f64, f64),
    pub tolerance: ToleranceProfile,
    pub solver: SolverConfig,
    /// Negative-margin instances kept in memory for dumping.
    pub max_instances: usize,
}

impl ConjectureConfig {
    pub fn new(seed: u64, trials: u64) -> LabResult<Self> {
        Ok(Self {
            seed,
            trials,
            dims: (2, 6),
            tuple_sizes: (2, 8),
            spectrum_range: (0.1, 10.0),
            tolerance: ToleranceProfile::new(1e-8, true)?,
            solver: SolverConfig::default(),
            max_instances: 16,
        })
    }

    pub fn validate(&self) -> LabResult<()> {
        let (lo, hi) = self.dims;
        if lo == 0 || lo > hi || hi > MAX_SAMPLER_DIM {
            return Err(LabError::Usage(format!("dimension range {lo}..{hi} is invalid")));
        }
        let (nlo, nhi) = self.tuple_sizes;
        if nlo < 2 || nlo > nhi || nhi > 8 {
            return Err(LabError::Usage(format!("tuple sizes {nlo}..{nhi} must lie within 2..8")));
        }
        if self.trials == 0 {
            return Err(LabError::Usage("at least one trial is required".into()));
        }
        SamplerSpec::new(self.seed, lo, self.spectrum_range, 1)?;
        Ok(())
    }
}

/// The near-order verdict of `LE ⪯ Ω`.
pub fn le_omega_verdict(
    w: &WeightVector,
    a: &MatrixTuple,
    solver: &SolverConfig,
    tol: &ToleranceProfile,
) -> meanlab_core::Result<OrderVerdict> {
    let le = log_euclidean(w, a)?;
    let (om, _) = wasserstein_barycenter(w, a, solver)?;
    near_order_cmp(&le, &om, tol)
}

#[derive(Clone, Debug)]
pub struct ConjectureOutcome {
    pub report: SuiteReport,
    /// The trial with the smallest margin.
    pub minimum: Option<Instance>,
    /// Trials with margin below `−tolerance`, at most `max_instances`.
    pub negatives: Vec<Instance>,
}

impl ConjectureOutcome {
    pub fn minimum_margin(&self) -> Option<f64> {
        self.report.body.summary.get("minimum_margin").and_then(Value::as_f64)
    }
}

fn instance(stem: String, trial: u64, seed: u64, w: &WeightVector, a: &MatrixTuple, margin: f64, solver_tol: f64) -> Instance {
    let mut params = Map::new();
    params.insert("weights".into(), json!(w.as_slice()));
    params.insert("margin".into(), json!(margin));
    params.insert("solver_tolerance".into(), json!(solver_tol));
    Instance {
        stem,
        trial,
        trial_seed: seed,
        matrices: a.iter().enumerate().map(|(j, m)| (format!("A{j}"), m.clone())).collect(),
        params,
    }
}

pub fn conjecture_search_le_omega(cfg: &ConjectureConfig) -> LabResult<ConjectureOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let base = SamplerSpec::new(cfg.seed, cfg.dims.0, cfg.spectrum_range, cfg.trials as usize)?;
    let mut tally = Tally::default();
    tally.declare(PROPERTY, false);
    let mut skipped = 0u64;
    let mut minimum: Option<Instance> = None;
    let mut min_margin = f64::INFINITY;
    let mut negatives = Vec::new();
    let mut negative_count = 0u64;
    for index in 0..cfg.trials {
        let spec = base.for_trial(index);
        let mut params = spec.rng("params");
        let spec = spec.with_dim(params.random_range(cfg.dims.0..=cfg.dims.1));
        let n = params.random_range(cfg.tuple_sizes.0..=cfg.tuple_sizes.1);
        let w = random_weights(&spec, n)?;
        let a = random_tuple(&spec, n)?;
        let verdict = match le_omega_verdict(&w, &a, &cfg.solver, &cfg.tolerance) {
            Ok(v) => v,
            Err(e) if e.is_numerical() => {
                log::warn!("trial {index}: barycenter solver failed: {e}");
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let stem = instance_stem(CONJECTURE_NAME, cfg.seed, index);
        let id = TrialId {
            index,
            seed: spec.seed,
            stem: stem.clone(),
        };
        let (margin, holds) = (verdict.margin, verdict.holds);
        tally.record(&id, PROPERTY, false, Some(margin), holds);
        let make = || instance(stem.clone(), index, spec.seed, &w, &a, margin, cfg.solver.residual_tol);
        if margin < min_margin {
            min_margin = margin;
            minimum = Some(make());
        }
        if !holds {
            negative_count += 1;
            if negatives.len() < cfg.max_instances {
                negatives.push(make());
            }
        }
    }
    let mut summary = Map::new();
    if let Some(m) = &minimum {
        summary.insert("minimum_margin".into(), json!(min_margin));
        summary.insert("minimum_trial".into(), json!(m.trial));
        summary.insert("minimum_stem".into(), json!(m.stem));
    }
    summary.insert("negative_trials".into(), json!(negative_count));
    summary.insert("solver_failures".into(), json!(skipped));
    let body = ReportBody {
        schema_version: SCHEMA_VERSION,
        suite: CONJECTURE_NAME.to_owned(),
        seed: cfg.seed,
        trials: cfg.trials,
        dims: cfg.dims,
        spectrum_range: cfg.spectrum_range,
        tolerance: cfg.tolerance,
        solver_tolerance: cfg.solver.residual_tol,
        properties: tally.into_records(),
        summary,
    };
    Ok(ConjectureOutcome {
        report: SuiteReport {
            body,
            run: RunInfo {
                wall_clock_seconds: started.elapsed().as_secs_f64(),
                library_version: env!("CARGO_PKG_VERSION").to_owned(),
            },
        },
        minimum,
        negatives,
    })
}

/// Recomputes the margin of a dumped instance.
pub fn replay(path: &Path, tol: &ToleranceProfile) -> LabResult<(Instance, f64)> {
    let inst = Instance::load(path)?;
    let weights: Vec<f64> = serde_json::from_value(
        inst.params
            .get("weights")
            .cloned()
            .ok_or_else(|| LabError::Usage(format!("{}: no weights", path.display())))?,
    )?;
    let w = WeightVector::new(weights)?;
    let a = MatrixTuple::new(inst.matrices.iter().map(|(_, m)| m.clone()).collect())?;
    let solver = match inst.param("solver_tolerance") {
        Ok(t) => SolverConfig::new(t, SolverConfig::default().max_iter)?,
        Err(_) => SolverConfig::default(),
    };
    let margin = le_omega_verdict(&w, &a, &solver, tol)?.margin;
    Ok((inst, margin))
}
