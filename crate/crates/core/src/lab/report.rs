use serde::Serialize;
use serde_json::Value;

use super::scenario::Scenario;
use crate::error::Error;
use crate::ramification::RamificationData;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    /// Failure dominates inconclusive, which dominates pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        self.max(other)
    }

    pub fn from_error(e: &Error) -> Verdict {
        if e.is_inconclusive() {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    }
}

/// Self-contained JSON evidence for one verb run.
#[derive(Clone, Debug, Serialize)]
pub struct ReportDoc {
    pub tool: &'static str,
    pub version: &'static str,
    pub verb: String,
    pub scenario: Scenario,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramification: Option<RamificationData>,
    pub payload: Value,
    pub verdict: Verdict,
    /// Base working precision; individual claims carry their own.
    pub precision: i64,
    pub precision_cap: i64,
    pub notes: Vec<String>,
    pub wall_time_seconds: f64,
}

impl ReportDoc {
    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report as JSON with the wall-time field removed, for
    /// reproducibility comparisons.
    pub fn without_wall_time(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("report is an object").remove("wall_time_seconds");
        v
    }
}

/// JSON for an invalid-input failure, printed in place of a report.
pub fn error_json(verb: &str, e: &Error) -> String {
    serde_json::to_string_pretty(&serde_json::json!({
        "tool": "nbval",
        "version": env!("CARGO_PKG_VERSION"),
        "verb": verb,
        "error": e.to_string(),
        "exit_code": e.exit_code(),
    }))
    .expect("error serializes")
}
