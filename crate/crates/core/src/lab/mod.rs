//! Experiment orchestration: scenario contexts at escalating precision,
//! the command verbs and their JSON reports.

mod commands;
mod report;
mod scenario;
mod suites;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

pub use commands::{cmd_build, cmd_nbtest, cmd_ramify, cmd_rhov, cmd_verify};
pub use report::{error_json, ReportDoc, Verdict};
pub use scenario::{ExtensionSection, FieldSection, RunSection, Scenario};
pub use suites::{sweep, Suite, SuiteCheck, SuiteOutcome, SweepRun};

use crate::error::{Error, Result};
use crate::galois::ExtensionField;
use crate::localfield::GroundField;
use crate::ramification::{compute_filtration, RamificationData};

/// Environment variable holding the default precision cap.
pub const PRECISION_CAP_ENV: &str = "NBVAL_PRECISION_CAP";
pub const DEFAULT_PRECISION_CAP: i64 = 1024;
pub const DEFAULT_TRIALS: u64 = 100;

/// A scenario built at one working precision.
#[derive(Debug)]
pub struct Context {
    pub k: GroundField,
    pub n: ExtensionField,
    pub data: RamificationData,
}

impl Context {
    pub fn build(scenario: &Scenario, precision: i64) -> Result<Self> {
        let k = GroundField::new(scenario.ground_spec(precision))?;
        let n = ExtensionField::build(&k, &scenario.extension.layers)?;
        let data = compute_filtration(&n)?;
        Ok(Context { k, n, data })
    }

    pub fn precision(&self) -> i64 {
        self.k.precision()
    }
}

/// A scenario with its contexts, rebuilt at doubled precision on demand.
#[derive(Debug)]
pub struct Lab {
    scenario: Scenario,
    cap: i64,
    cache: Mutex<BTreeMap<i64, Arc<Context>>>,
}

/// The cap from `NBVAL_PRECISION_CAP`, if set and valid.
pub fn env_precision_cap() -> Result<Option<i64>> {
    match std::env::var(PRECISION_CAP_ENV) {
        Ok(s) => s
            .trim()
            .parse::<i64>()
            .ok()
            .filter(|&c| c > 0)
            .map(Some)
            .ok_or_else(|| Error::InvalidInput(format!("{PRECISION_CAP_ENV}={s:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

impl Lab {
    /// Build the base context. The precision cap is taken from `cap`, then
    /// the scenario's `[run]` section, then the environment, then the
    /// default.
    pub fn new(scenario: Scenario, cap: Option<i64>) -> Result<Self> {
        let base = scenario.base_precision();
        let cap = match cap.or(scenario.run.precision_cap) {
            Some(c) => c,
            None => env_precision_cap()?.unwrap_or(DEFAULT_PRECISION_CAP),
        }
        .max(base);
        let lab = Lab { scenario, cap, cache: Mutex::new(BTreeMap::new()) };
        lab.context(base)?;
        Ok(lab)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn cap(&self) -> i64 {
        self.cap
    }

    pub fn base(&self) -> Arc<Context> {
        self.context(self.scenario.base_precision()).expect("base context is built on construction")
    }

    pub fn context(&self, precision: i64) -> Result<Arc<Context>> {
        if let Some(c) = self.cache.lock().expect("context cache").get(&precision) {
            return Ok(c.clone());
        }
        let ctx = Arc::new(Context::build(&self.scenario, precision)?);
        Ok(self.cache.lock().expect("context cache").entry(precision).or_insert(ctx).clone())
    }

    /// Working precisions tried in order: the base, doubled up to the cap.
    pub fn ladder(&self) -> Vec<i64> {
        let mut out = vec![self.scenario.base_precision()];
        while *out.last().unwrap() < self.cap {
            out.push((out.last().unwrap() * 2).min(self.cap));
        }
        out
    }

    /// Run `f` at increasing precision until it stops reporting an
    /// inconclusive result; returns the value and the precision used.
    pub fn escalate<T>(&self, f: impl Fn(&Context) -> Result<T>) -> Result<(T, i64)> {
        let mut last = None;
        for prec in self.ladder() {
            let ctx = self.context(prec)?;
            match f(&ctx) {
                Err(e) if e.is_inconclusive() => last = Some(e),
                other => return other.map(|v| (v, prec)),
            }
        }
        Err(last.expect("ladder is nonempty"))
    }
}
