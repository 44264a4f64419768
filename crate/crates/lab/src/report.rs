//! Suite reports.
//!
//! A report splits into a `body`, which is a pure function of the suite,
//! seed, trial count and tolerances, and a `run` section with wall-clock
//! time and the library version. Replaying a run reproduces the body byte
//! for byte.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use meanlab_core::order::ToleranceProfile;

use crate::error::{ExitStatus, LabResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Where to find the inputs of a failing (or extreme) trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRef {
    pub trial: u64,
    pub trial_seed: u64,
    /// File stem under the dump directory, e.g. `relation-chain-s7-t12`.
    pub stem: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub name: String,
    /// Properties that do not gate are recorded as data.
    pub gating: bool,
    pub trials: u64,
    pub failures: u64,
    /// Trials where the property was not applicable (hypothesis false,
    /// outside a domain).
    pub vacuous: u64,
    pub worst_margin: Option<f64>,
    pub worst_trial: Option<u64>,
    pub first_failure: Option<WitnessRef>,
}

impl PropertyRecord {
    pub fn new(name: &str, gating: bool) -> Self {
        Self {
            name: name.to_owned(),
            gating,
            trials: 0,
            failures: 0,
            vacuous: 0,
            worst_margin: None,
            worst_trial: None,
            first_failure: None,
        }
    }

    pub fn passed(&self) -> bool {
        !self.gating || self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub trials: u64,
    pub dims: (usize, usize),
    pub spectrum_range: (f64, f64),
    pub tolerance: ToleranceProfile,
    pub solver_tolerance: f64,
    pub properties: Vec<PropertyRecord>,
    /// Suite-specific summary values.
    pub summary: Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub wall_clock_seconds: f64,
    pub library_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub body: ReportBody,
    pub run: RunInfo,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.body.properties.iter().all(PropertyRecord::passed)
    }

    pub fn failures(&self) -> u64 {
        self.body
            .properties
            .iter()
            .filter(|p| p.gating)
            .map(|p| p.failures)
            .sum()
    }

    pub fn property(&self, name: &str) -> Option<&PropertyRecord> {
        self.body.properties.iter().find(|p| p.name == name)
    }

    pub fn exit_status(&self) -> ExitStatus {
        if self.passed() {
            ExitStatus::Pass
        } else {
            ExitStatus::PropertyFailed
        }
    }

    pub fn body_json(&self) -> LabResult<String> {
        Ok(serde_json::to_string_pretty(&self.body)?)
    }

    pub fn to_json(&self) -> LabResult<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Accumulates property outcomes in first-seen order.
#[derive(Debug, Default)]
pub struct Tally {
    records: Vec<PropertyRecord>,
    failed_this_trial: bool,
}

pub(crate) struct TrialId {
    pub index: u64,
    pub seed: u64,
    pub stem: String,
}

impl Tally {
    fn record_mut(&mut self, name: &str, gating: bool) -> &mut PropertyRecord {
        match self.records.iter().position(|r| r.name == name) {
            Some(i) => &mut self.records[i],
            None => {
                self.records.push(PropertyRecord::new(name, gating));
                self.records.last_mut().expect("just pushed")
            }
        }
    }

    /// Declares a property so that it appears in the report even if no trial
    /// reaches it.
    pub fn declare(&mut self, name: &str, gating: bool) {
        self.record_mut(name, gating);
    }

    pub(crate) fn record(&mut self, trial: &TrialId, name: &str, gating: bool, margin: Option<f64>, ok: bool) {
        let r = self.record_mut(name, gating);
        r.trials += 1;
        if let Some(m) = margin {
            if r.worst_margin.is_none_or(|w| m < w) {
                r.worst_margin = Some(m);
                r.worst_trial = Some(trial.index);
            }
        }
        if !ok {
            r.failures += 1;
            if r.first_failure.is_none() {
                r.first_failure = Some(WitnessRef {
                    trial: trial.index,
                    trial_seed: trial.seed,
                    stem: trial.stem.clone(),
                });
            }
            if gating {
                self.failed_this_trial = true;
            }
        }
    }

    pub(crate) fn vacuous(&mut self, name: &str, gating: bool) {
        let r = self.record_mut(name, gating);
        r.trials += 1;
        r.vacuous += 1;
    }

    pub(crate) fn take_trial_failure(&mut self) -> bool {
        std::mem::take(&mut self.failed_this_trial)
    }

    pub fn into_records(self) -> Vec<PropertyRecord> {
        self.records
    }

    pub fn records(&self) -> &[PropertyRecord] {
        &self.records
    }
}
