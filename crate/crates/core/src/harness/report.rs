//! Machine-readable check reports.
//!
//! A report contains no timings or host data, so identical configurations
//! give identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "qkz-check-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Parameters too close to a resonance or otherwise non-generic.
    Skipped,
}

/// How a residual is compared with its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass iff `residual < tolerance`.
    Below,
    /// Pass iff `residual >= tolerance` (sensitivity probes).
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    /// The identity being checked, in words.
    pub anchor: String,
    /// sha256 of the sampled inputs, hex.
    pub inputs_digest: String,
    pub samples: usize,
    /// `None` when the case could not be evaluated.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: String,
    pub suite: String,
    pub seed: u64,
    /// sha256 of the canonical JSON of the run configuration.
    pub config_digest: String,
    pub cases: Vec<CaseResult>,
    pub summary: Summary,
    /// Condition numbers and other diagnostics, keyed by name.
    pub telemetry: BTreeMap<String, f64>,
}

impl CheckReport {
    pub fn new(suite: &str, seed: u64, config_json: &str, cases: Vec<CaseResult>, telemetry: BTreeMap<String, f64>) -> Self {
        let mut summary = Summary { total: cases.len(), ..Summary::default() };
        for c in &cases {
            match c.status {
                Status::Pass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::Skipped => summary.skipped += 1,
            }
        }
        CheckReport {
            schema: SCHEMA.to_string(),
            suite: suite.to_string(),
            seed,
            config_digest: hex_digest(config_json.as_bytes()),
            cases,
            summary,
            telemetry,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.skipped == 0
    }

    /// 0 when everything passed, 1 on any failure, 3 when the only
    /// shortfall is skipped non-generic cases.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed > 0 {
            1
        } else if self.summary.skipped > 0 {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn case(&self, id: &str) -> Option<&CaseResult> {
        self.cases.iter().find(|c| c.id == id)
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Accumulates the sampled inputs of a case into a digest.
#[derive(Clone, Default)]
pub struct InputLog {
    hasher: Sha256,
    count: usize,
}

impl InputLog {
    pub fn real(&mut self, x: f64) {
        self.hasher.update(x.to_bits().to_le_bytes());
    }

    pub fn complex(&mut self, z: crate::C64) {
        self.real(z.re);
        self.real(z.im);
    }

    pub fn complexes(&mut self, zs: &[crate::C64]) {
        zs.iter().for_each(|&z| self.complex(z));
    }

    pub fn int(&mut self, k: i64) {
        self.hasher.update(k.to_le_bytes());
    }

    /// Marks the end of one sample.
    pub fn sample(&mut self) {
        self.count += 1;
        self.hasher.update(b"|");
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(status: Status) -> CaseResult {
        CaseResult {
            id: "x".into(),
            anchor: "a".into(),
            inputs_digest: String::new(),
            samples: 1,
            residual: Some(0.0),
            tolerance: 1.0,
            comparison: Comparison::Below,
            status,
            note: None,
        }
    }

    #[test]
    fn exit_codes() {
        let r = |s: Vec<Status>| CheckReport::new("t", 0, "{}", s.into_iter().map(case).collect(), BTreeMap::new());
        assert_eq!(r(vec![Status::Pass]).exit_code(), 0);
        assert_eq!(r(vec![Status::Pass, Status::Skipped]).exit_code(), 3);
        assert_eq!(r(vec![Status::Fail, Status::Skipped]).exit_code(), 1);
    }

    #[test]
    fn report_round_trips() {
        let r = CheckReport::new("t", 5, "{}", vec![case(Status::Pass)], BTreeMap::from([("cond".to_string(), 3.5)]));
        let back: CheckReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn input_log_is_order_sensitive() {
        let mut a = InputLog::default();
        a.real(1.0);
        a.real(2.0);
        let mut b = InputLog::default();
        b.real(2.0);
        b.real(1.0);
        assert_ne!(a.finish(), b.finish());
    }
}
