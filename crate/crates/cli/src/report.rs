use std::time::Duration;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Fixed description of how one `--seed` fans out to the randomized components.
pub const SEED_SCHEME: &str =
    "child_seed(seed, stream) = splitmix64(seed + (stream + 1) * 0x9E3779B97F4A7C15); streams: 0 points, 1 fields, 2 search";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        Self {
            path: path.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedInfo {
    pub seed: u64,
    pub scheme: &'static str,
}

/// One verified property. `op` names the library operation that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub op: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl Check {
    pub fn new(name: &str, op: &'static str, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            op,
            pass,
            value: None,
            residual: None,
            witness: None,
            details: None,
        }
    }

    pub fn value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    pub fn residual(mut self, r: f64) -> Self {
        self.residual = Some(r);
        self
    }

    pub fn witness(mut self, w: impl Serialize) -> Self {
        self.witness = Some(serde_json::to_value(w).expect("serializable"));
        self
    }

    pub fn details(mut self, d: impl Serialize) -> Self {
        self.details = Some(serde_json::to_value(d).expect("serializable"));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTime {
    pub check: String,
    pub seconds: f64,
}

/// Wall-clock timings. The only part of a report that varies between runs.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub checks: Vec<StageTime>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedInfo>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Set when a failing check ended the run early.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopped_after: Option<String>,
    pub timing: Timing,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            tool: "ncyclic",
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs: Vec::new(),
            seed: None,
            checks: Vec::new(),
            passed: true,
            stopped_after: None,
            timing: Timing::default(),
        }
    }

    pub fn with_seed(&mut self, seed: u64) {
        self.seed = Some(SeedInfo {
            seed,
            scheme: SEED_SCHEME,
        });
    }

    pub fn push(&mut self, check: Check, elapsed: Duration) {
        self.passed &= check.pass;
        self.timing.checks.push(StageTime {
            check: check.name.clone(),
            seconds: elapsed.as_secs_f64(),
        });
        self.checks.push(check);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// The report as JSON with the `timing` member removed.
    pub fn to_json_without_timing(&self) -> String {
        let mut v = serde_json::to_value(self).expect("serializable");
        v.as_object_mut().expect("object").remove("timing");
        serde_json::to_string_pretty(&v).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_sha256() {
        let d = InputDigest::of("x", b"abc");
        assert_eq!(d.sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn failing_check_fails_report() {
        let mut r = RunReport::new(vec!["ncyclic".into()]);
        r.push(Check::new("a", "op", true), Duration::ZERO);
        assert!(r.passed);
        r.push(Check::new("b", "op", false).residual(1.0), Duration::from_millis(3));
        assert!(!r.passed);
        assert!(!r.to_json_without_timing().contains("timing"));
        assert!(r.to_json().contains("\"timing\""));
    }
}
