//! Machine-readable reports for the command line: one record per command
//! run, with per-item status lines, counterexamples, timings, and optional
//! serialized artifacts (objects, morphisms, subobjects).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::colimit::VerificationReport;
use crate::suites::SuiteOutcome;

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub status: String,
    pub seed: u64,
    pub items: Vec<ReportItem>,
    pub counterexamples: Vec<String>,
    pub artifacts: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Serialize)]
pub struct ReportItem {
    pub id: String,
    pub status: String,
    pub detail: String,
    pub millis: u128,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64) -> Report {
        Report {
            command: command.into(),
            status: "pass".into(),
            seed,
            items: Vec::new(),
            counterexamples: Vec::new(),
            artifacts: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, id: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.push_timed(id, passed, detail, 0)
    }

    pub fn push_timed(
        &mut self,
        id: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
        millis: u128,
    ) {
        let detail = detail.into();
        if !passed {
            self.status = "fail".into();
            self.counterexamples.push(detail.clone());
        }
        self.items.push(ReportItem {
            id: id.into(),
            status: if passed { "pass" } else { "fail" }.into(),
            detail,
            millis,
        });
    }

    pub fn push_outcome(&mut self, outcome: &SuiteOutcome) {
        self.push_timed(
            outcome.id.clone(),
            outcome.passed,
            outcome.detail.clone(),
            outcome.millis,
        );
    }

    pub fn push_verification(&mut self, prefix: &str, report: &VerificationReport) {
        for item in &report.items {
            self.push(
                format!("{prefix}/{}", item.name),
                item.passed,
                item.detail.clone(),
            );
        }
    }

    pub fn error(&mut self, detail: impl Into<String>) {
        self.status = "error".into();
        self.counterexamples.push(detail.into());
    }

    pub fn artifact(&mut self, name: impl Into<String>, value: impl Serialize) {
        if let Ok(v) = serde_json::to_value(value) {
            self.artifacts.insert(name.into(), v);
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn exit_code(&self) -> i32 {
        match self.status.as_str() {
            "pass" => 0,
            "fail" => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
    }
}
