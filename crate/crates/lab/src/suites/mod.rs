//! Named verification suites.
//!
//! Each suite draws seeded trials and checks the statements of one theorem
//! family, recording a signed margin per property per trial. The registry
//! below is the documentation table: suite name, the result it exercises,
//! and the properties it reports.

mod limits;
mod multi;
mod pair;
mod renyi;

use std::path::{Path, PathBuf};
use std::time::Instant;

use meanlab_core::multi::{MatrixTuple, SolverConfig, WeightVector};
use meanlab_core::order::{OrderVerdict, ToleranceProfile};
use meanlab_core::sampling::{SamplerSpec, MAX_SAMPLER_DIM};
use meanlab_core::HpdMatrix;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Map, Value};

use crate::error::{LabError, LabResult};
use crate::matfile::MatrixFile;
use crate::report::{ReportBody, RunInfo, SuiteReport, Tally, TrialId, SCHEMA_VERSION};

/// One property a suite reports.
#[derive(Clone, Copy, Debug)]
pub struct Property {
    pub name: &'static str,
    /// Non-gating properties are recorded as data and never fail a run.
    pub gating: bool,
}

const fn gate(name: &'static str) -> Property {
    Property { name, gating: true }
}

const fn observe(name: &'static str) -> Property {
    Property { name, gating: false }
}

type SuiteFn = fn(&mut Trial<'_>) -> LabResult<()>;

#[derive(Clone, Copy)]
pub struct SuiteInfo {
    pub name: &'static str,
    /// The result the suite exercises.
    pub theorem: &'static str,
    pub properties: &'static [Property],
    run: SuiteFn,
}

impl std::fmt::Debug for SuiteInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SuiteInfo")
            .field("name", &self.name)
            .field("theorem", &self.theorem)
            .finish()
    }
}

pub const SUITES: [SuiteInfo; 18] = [
    SuiteInfo {
        name: "thompson-lemma",
        theorem: "Thompson metric: invariance under inversion and congruence, contraction under sums and powers",
        properties: pair::THOMPSON,
        run: pair::thompson_lemma,
    },
    SuiteInfo {
        name: "equivalence-7way",
        theorem: "Seven equivalent characterizations of the near-order, and its antisymmetry",
        properties: pair::EQUIVALENCE,
        run: pair::equivalence_7way,
    },
    SuiteInfo {
        name: "mono-sp-wass",
        theorem: "A ⪯ B iff the spectral geometric (or Wasserstein) mean is near-order monotone in its parameter",
        properties: pair::MONO_SP_WASS,
        run: pair::mono_sp_wass,
    },
    SuiteInfo {
        name: "in-betweenness",
        theorem: "In-betweenness of the spectral geometric and Wasserstein means for the near-order",
        properties: pair::IN_BETWEENNESS,
        run: pair::in_betweenness,
    },
    SuiteInfo {
        name: "near-sp-wass",
        theorem: "Spectral geometric mean ⪯ Wasserstein mean, with its congruence and Loewner corollaries",
        properties: pair::NEAR_SP_WASS,
        run: pair::near_sp_wass,
    },
    SuiteInfo {
        name: "fidelity-recursion",
        theorem: "Near-order monotonicity of powers and the doubling recursion for the operator fidelity",
        properties: pair::FIDELITY,
        run: pair::fidelity_recursion,
    },
    SuiteInfo {
        name: "relation-chain",
        theorem: "Loewner ⟹ chaotic ⟹ near ⟹ eigenvalue-entrywise ⟹ weak log-majorization",
        properties: pair::RELATION_CHAIN,
        run: pair::relation_chain,
    },
    SuiteInfo {
        name: "kim18-chain",
        theorem: "Loewner chain of power means outside the unit interval",
        properties: multi::KIM18,
        run: multi::kim18_chain,
    },
    SuiteInfo {
        name: "mono-variables",
        theorem: "Quasi-arithmetic means are near-order monotone in the variables",
        properties: multi::MONO_VARIABLES,
        run: multi::mono_variables,
    },
    SuiteInfo {
        name: "mono-parameters",
        theorem: "Quasi-arithmetic means are near-order monotone in the parameter on [-1, 1]",
        properties: multi::MONO_PARAMETERS,
        run: multi::mono_parameters,
    },
    SuiteInfo {
        name: "mixed-chain",
        theorem: "Mixed Loewner and near-order chain of power means for exponents 1 <= p <= q",
        properties: multi::MIXED_CHAIN,
        run: multi::mixed_chain,
    },
    SuiteInfo {
        name: "renyi-properties",
        theorem: "Rényi power mean: convergence, commuting reduction, homogeneity, symmetry, inversion, norm bound",
        properties: renyi::PROPERTIES,
        run: renyi::renyi_properties,
    },
    SuiteInfo {
        name: "renyi-logdet",
        theorem: "Determinant of the Rényi power mean dominates the weighted geometric mean of determinants",
        properties: renyi::LOGDET,
        run: renyi::renyi_logdet,
    },
    SuiteInfo {
        name: "renyi-quasi",
        theorem: "Rényi power mean against the quasi-arithmetic and log-Euclidean means below and above the identity",
        properties: renyi::QUASI,
        run: renyi::renyi_quasi,
    },
    SuiteInfo {
        name: "renyi-le",
        theorem: "Two-sided limit of Rényi power means of powered tuples and its log-Euclidean bounds",
        properties: renyi::LE,
        run: renyi::renyi_le,
    },
    SuiteInfo {
        name: "le-near",
        theorem: "Harmonic ⪯ log-Euclidean ⪯ arithmetic, and quasi-arithmetic means converge monotonically to log-Euclidean",
        properties: multi::LE_NEAR,
        run: multi::le_near,
    },
    SuiteInfo {
        name: "lie-trotter",
        theorem: "Means between harmonic and arithmetic for the near-order are multivariable Lie-Trotter means",
        properties: limits::LIE_TROTTER,
        run: limits::lie_trotter,
    },
    SuiteInfo {
        name: "cartan-le-wass",
        theorem: "Karcher mean, log-Euclidean mean and Wasserstein barycenter: log-majorization and Loewner bounds",
        properties: multi::CARTAN_LE_WASS,
        run: multi::cartan_le_wass,
    },
];

pub fn find_suite(name: &str) -> LabResult<&'static SuiteInfo> {
    SUITES.iter().find(|s| s.name == name).ok_or_else(|| {
        let names: Vec<_> = SUITES.iter().map(|s| s.name).collect();
        LabError::Usage(format!("unknown suite `{name}`; known: {}", names.join(", ")))
    })
}

/// Parameters of a suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: u64,
    pub dims: (usize, usize),
    pub spectrum_range: (f64, f64),
    pub tolerance: ToleranceProfile,
    pub solver: SolverConfig,
    /// Failing instances kept in memory for dumping.
    pub max_instances: usize,
}

impl SuiteConfig {
    pub fn new(seed: u64, trials: u64, dims: (usize, usize)) -> LabResult<Self> {
        let cfg = Self {
            seed,
            trials,
            dims,
            spectrum_range: (0.1, 10.0),
            tolerance: ToleranceProfile::new(1e-8, true)?,
            solver: SolverConfig::default(),
            max_instances: 8,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tolerance(mut self, psd_margin: f64) -> LabResult<Self> {
        self.tolerance = ToleranceProfile::new(psd_margin, true)?;
        Ok(self)
    }

    pub fn with_solver_tolerance(mut self, residual_tol: f64) -> LabResult<Self> {
        self.solver = SolverConfig::new(residual_tol, self.solver.max_iter)?;
        Ok(self)
    }

    pub fn with_spectrum_range(mut self, lo: f64, hi: f64) -> LabResult<Self> {
        self.spectrum_range = (lo, hi);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> LabResult<()> {
        let (lo, hi) = self.dims;
        if lo == 0 || lo > hi || hi > MAX_SAMPLER_DIM {
            return Err(LabError::Usage(format!(
                "dimension range {lo}..{hi} must lie within 1..{MAX_SAMPLER_DIM}"
            )));
        }
        if self.trials == 0 {
            return Err(LabError::Usage("at least one trial is required".into()));
        }
        SamplerSpec::new(self.seed, lo, self.spectrum_range, 1)?;
        Ok(())
    }

    pub(crate) fn base_spec(&self) -> SamplerSpec {
        SamplerSpec {
            seed: self.seed,
            dim: self.dims.0,
            spectrum_range: self.spectrum_range,
            count: self.trials as usize,
        }
    }
}

/// Inputs of a trial, kept for replay when the trial fails.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub stem: String,
    pub trial: u64,
    pub trial_seed: u64,
    pub matrices: Vec<(String, HpdMatrix)>,
    pub params: Map<String, Value>,
}

impl Instance {
    /// Writes one MatrixFile per matrix plus `<stem>-instance.json`
    /// listing them with the scalar parameters; returns the instance path.
    pub fn dump(&self, dir: &Path) -> LabResult<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
        let mut files = Vec::new();
        for (name, m) in &self.matrices {
            let file = format!("{}-{}.json", self.stem, name);
            MatrixFile::from_hpd(m, Some(name)).write(&dir.join(&file))?;
            files.push(json!({ "name": name, "file": file }));
        }
        let meta = json!({
            "stem": self.stem,
            "trial": self.trial,
            "trial_seed": self.trial_seed,
            "params": self.params,
            "matrices": files,
        });
        let path = dir.join(format!("{}-instance.json", self.stem));
        let text = serde_json::to_string_pretty(&meta)? + "\n";
        std::fs::write(&path, text).map_err(|e| LabError::io(&path, e))?;
        Ok(path)
    }

    /// Loads an instance written by [`Instance::dump`].
    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        let meta: Value = serde_json::from_str(&text)?;
        let bad = |what: &str| LabError::Usage(format!("{}: missing or invalid `{what}`", path.display()));
        let dir = path.parent().unwrap_or(Path::new("."));
        let matrices = meta["matrices"]
            .as_array()
            .ok_or_else(|| bad("matrices"))?
            .iter()
            .map(|m| {
                let name = m["name"].as_str().ok_or_else(|| bad("matrices.name"))?;
                let file = m["file"].as_str().ok_or_else(|| bad("matrices.file"))?;
                Ok((name.to_owned(), MatrixFile::read(&dir.join(file))?.to_hpd()?))
            })
            .collect::<LabResult<_>>()?;
        Ok(Self {
            stem: meta["stem"].as_str().ok_or_else(|| bad("stem"))?.to_owned(),
            trial: meta["trial"].as_u64().ok_or_else(|| bad("trial"))?,
            trial_seed: meta["trial_seed"].as_u64().ok_or_else(|| bad("trial_seed"))?,
            matrices,
            params: meta["params"].as_object().cloned().unwrap_or_default(),
        })
    }

    pub fn matrix(&self, name: &str) -> LabResult<&HpdMatrix> {
        self.matrices
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| LabError::Usage(format!("instance has no matrix `{name}`")))
    }

    pub fn param(&self, name: &str) -> LabResult<f64> {
        self.params
            .get(name)
            .and_then(Value::as_f64)
            .ok_or_else(|| LabError::Usage(format!("instance has no parameter `{name}`")))
    }
}

/// State handed to a suite for one trial.
pub struct Trial<'a> {
    pub index: u64,
    /// Spec for this trial, dimension already drawn.
    pub spec: SamplerSpec,
    pub tol: ToleranceProfile,
    pub solver: &'a SolverConfig,
    id: TrialId,
    tally: &'a mut Tally,
    summary: &'a mut Map<String, Value>,
    params: ChaCha20Rng,
    inputs: Vec<(String, HpdMatrix)>,
    values: Map<String, Value>,
}

impl Trial<'_> {
    fn gating(&self, name: &str) -> bool {
        let r = self.tally.records().iter().find(|r| r.name == name);
        debug_assert!(r.is_some(), "property `{name}` is not declared by its suite");
        r.is_none_or(|r| r.gating)
    }

    /// Records a margin; the property holds iff `ok`.
    pub fn record(&mut self, name: &str, margin: f64, ok: bool) {
        let gating = self.gating(name);
        self.tally.record(&self.id, name, gating, Some(margin), ok);
    }

    pub fn verdict(&mut self, name: &str, v: &OrderVerdict) {
        self.record(name, v.margin, v.holds);
    }

    /// `lhs <= rhs + slack`, margin `rhs - lhs`.
    pub fn bound(&mut self, name: &str, lhs: f64, rhs: f64, slack: f64) {
        let m = rhs - lhs;
        self.record(name, m, m >= -slack);
    }

    /// Boolean property without a meaningful margin.
    pub fn check(&mut self, name: &str, ok: bool) {
        let gating = self.gating(name);
        self.tally.record(&self.id, name, gating, None, ok);
    }

    pub fn vacuous(&mut self, name: &str) {
        let gating = self.gating(name);
        self.tally.vacuous(name, gating);
    }

    /// Registers an input for replay.
    pub fn input(&mut self, name: &str, m: &HpdMatrix) {
        self.inputs.push((name.to_owned(), m.clone()));
    }

    pub fn input_tuple(&mut self, prefix: &str, a: &MatrixTuple) {
        for (j, m) in a.iter().enumerate() {
            self.input(&format!("{prefix}{j}"), m);
        }
    }

    pub fn param(&mut self, name: &str, value: impl Into<Value>) {
        self.values.insert(name.to_owned(), value.into());
    }

    pub fn input_weights(&mut self, w: &WeightVector) {
        self.param("weights", w.as_slice().to_vec());
    }

    /// Uniform draw from `lo..=hi` on this trial's parameter stream.
    pub fn draw_count(&mut self, lo: usize, hi: usize) -> usize {
        self.params.random_range(lo..=hi)
    }

    pub fn draw_real(&mut self, lo: f64, hi: f64) -> f64 {
        self.params.random_range(lo..=hi)
    }

    pub fn choose<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.params.random_range(0..items.len())]
    }

    /// Sampler spec for a sub-instance, distinct per `label`.
    pub fn sub_spec(&self, label: u64) -> SamplerSpec {
        self.spec.for_trial(label)
    }

    /// Folds `value` into a summary entry with `min` or `max`.
    pub fn summarize(&mut self, key: &str, value: f64, keep_max: bool) {
        let entry = self.summary.entry(key.to_owned()).or_insert(Value::Null);
        let current = entry.as_f64();
        let next = match current {
            Some(c) if keep_max => c.max(value),
            Some(c) => c.min(value),
            None => value,
        };
        *entry = json!(next);
    }
}

/// A finished suite run.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub report: SuiteReport,
    /// Inputs of the first failing trials, at most `max_instances`.
    pub instances: Vec<Instance>,
}

pub fn instance_stem(suite: &str, seed: u64, trial: u64) -> String {
    format!("{suite}-s{seed}-t{trial}")
}

/// Runs `suite` for `cfg.trials` seeded trials. Trials are merged in index
/// order, so the report body depends only on the inputs.
pub fn run_verification_suite(suite: &str, cfg: &SuiteConfig) -> LabResult<SuiteOutcome> {
    let info = find_suite(suite)?;
    cfg.validate()?;
    let started = Instant::now();
    let base = cfg.base_spec();
    let mut tally = Tally::default();
    for p in info.properties {
        tally.declare(p.name, p.gating);
    }
    let mut summary = Map::new();
    let mut instances = Vec::new();
    for index in 0..cfg.trials {
        let spec = base.for_trial(index);
        let dim = spec.rng("dim").random_range(cfg.dims.0..=cfg.dims.1);
        let spec = spec.with_dim(dim);
        let stem = instance_stem(info.name, cfg.seed, index);
        let mut trial = Trial {
            index,
            spec,
            tol: cfg.tolerance,
            solver: &cfg.solver,
            id: TrialId {
                index,
                seed: spec.seed,
                stem: stem.clone(),
            },
            params: spec.rng("params"),
            tally: &mut tally,
            summary: &mut summary,
            inputs: Vec::new(),
            values: Map::new(),
        };
        (info.run)(&mut trial)?;
        let (inputs, values) = (std::mem::take(&mut trial.inputs), std::mem::take(&mut trial.values));
        if tally.take_trial_failure() && instances.len() < cfg.max_instances {
            log::warn!("{suite}: trial {index} failed");
            instances.push(Instance {
                stem,
                trial: index,
                trial_seed: spec.seed,
                matrices: inputs,
                params: values,
            });
        }
    }
    let body = ReportBody {
        schema_version: SCHEMA_VERSION,
        suite: info.name.to_owned(),
        seed: cfg.seed,
        trials: cfg.trials,
        dims: cfg.dims,
        spectrum_range: cfg.spectrum_range,
        tolerance: cfg.tolerance,
        solver_tolerance: cfg.solver.residual_tol,
        properties: tally.into_records(),
        summary,
    };
    Ok(SuiteOutcome {
        report: SuiteReport {
            body,
            run: RunInfo {
                wall_clock_seconds: started.elapsed().as_secs_f64(),
                library_version: env!("CARGO_PKG_VERSION").to_owned(),
            },
        },
        instances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique_and_documented() {
        for (i, s) in SUITES.iter().enumerate() {
            assert!(!s.theorem.is_empty() && !s.properties.is_empty(), "{}", s.name);
            assert!(SUITES[i + 1..].iter().all(|t| t.name != s.name));
            let mut names: Vec<_> = s.properties.iter().map(|p| p.name).collect();
            names.sort_unstable();
            names.dedup();
            assert_eq!(names.len(), s.properties.len(), "{}", s.name);
        }
    }

    #[test]
    fn every_suite_reports_exactly_its_declared_properties() {
        for s in &SUITES {
            let cfg = SuiteConfig::new(3, 3, (2, 3)).unwrap();
            let out = run_verification_suite(s.name, &cfg).unwrap();
            let reported: Vec<_> = out.report.body.properties.iter().map(|p| p.name.as_str()).collect();
            let declared: Vec<_> = s.properties.iter().map(|p| p.name).collect();
            assert_eq!(reported, declared, "{}", s.name);
            assert!(
                out.report.body.properties.iter().any(|p| p.trials > p.vacuous),
                "{} exercised nothing",
                s.name
            );
        }
    }

    #[test]
    fn unknown_suite_is_a_usage_error() {
        let cfg = SuiteConfig::new(0, 1, (2, 2)).unwrap();
        let err = run_verification_suite("no-such-suite", &cfg).unwrap_err();
        assert!(matches!(err, LabError::Usage(_)));
    }

    #[test]
    fn bad_config_is_rejected() {
        assert!(SuiteConfig::new(0, 0, (2, 2)).is_err());
        assert!(SuiteConfig::new(0, 1, (3, 2)).is_err());
        assert!(SuiteConfig::new(0, 1, (0, 2)).is_err());
        assert!(SuiteConfig::new(0, 1, (2, 17)).is_err());
    }
}
