//! Structured JSON reports.

use serde::Serialize;
use serde_json::Value;

use crate::scene::SCENE_VERSION;
use crate::tolerance::{FixedTolerances, RunConfig};

/// Every tolerance and parameter in effect for a run.
#[derive(Clone, Debug, Serialize)]
pub struct ReportConfig {
    pub run: RunConfig,
    pub fixed: FixedTolerances,
}

/// Output of one command. Wall-clock timing is kept out of the report so
/// that reruns are byte-identical; the binary prints it on stderr.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub scene_version: u32,
    pub config: ReportConfig,
    /// `None` for commands that compute without checking.
    pub passed: Option<bool>,
    pub results: Value,
}

impl Report {
    pub fn new(command: &str, run: &RunConfig, passed: Option<bool>, results: Value) -> Self {
        Self {
            command: command.to_owned(),
            scene_version: SCENE_VERSION,
            config: ReportConfig {
                run: run.clone(),
                fixed: FixedTolerances::current(),
            },
            passed,
            results,
        }
    }

    /// 0 on success, 2 when a check failed.
    pub fn exit_code(&self) -> i32 {
        if self.passed == Some(false) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize to JSON");
        s.push('\n');
        s
    }
}
