//! Machine-readable verification reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The computed value differs from a printed reference value but the run is
    /// not considered failed.
    ReportedDiscrepancy,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::ReportedDiscrepancy => "reported-discrepancy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: CheckStatus,
    pub details: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    #[serde(rename = "reported-discrepancy")]
    pub reported_discrepancy: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub version: String,
    pub parameters: BTreeMap<String, String>,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(suite: &str) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            parameters: BTreeMap::new(),
            records: Vec::new(),
            summary: Summary::default(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn record(&mut self, id: impl Into<String>, status: CheckStatus, details: impl Into<String>) {
        match status {
            CheckStatus::Pass => self.summary.pass += 1,
            CheckStatus::Fail => self.summary.fail += 1,
            CheckStatus::ReportedDiscrepancy => self.summary.reported_discrepancy += 1,
        }
        self.summary.total += 1;
        self.records.push(CheckRecord { id: id.into(), status, details: details.into() });
    }

    pub fn check(&mut self, id: impl Into<String>, ok: bool, details: impl Into<String>) {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        self.record(id, status, details);
    }

    /// Append another report's records, prefixing their ids.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for r in other.records {
            self.record(format!("{prefix}/{}", r.id), r.status, r.details);
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == CheckStatus::Fail)
    }

    /// Recount the summary from the records.
    pub fn recount(&self) -> Summary {
        let mut s = Summary { total: self.records.len(), ..Summary::default() };
        for r in &self.records {
            match r.status {
                CheckStatus::Pass => s.pass += 1,
                CheckStatus::Fail => s.fail += 1,
                CheckStatus::ReportedDiscrepancy => s.reported_discrepancy += 1,
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
