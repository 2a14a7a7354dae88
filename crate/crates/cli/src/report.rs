//! Verification reports and the per-case recorder.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::time::Instant;

use procosheaf::prosys::Flag;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A failed check carrying the data needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub case: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    pub message: String,
    pub witness: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub truncation: usize,
    pub window: usize,
    pub cases_run: usize,
    pub passed: usize,
    pub failed: usize,
    /// Soundness flags of the passing cases.
    pub flags: BTreeMap<Flag, usize>,
    pub failures: Vec<FailureRecord>,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    /// The report with its timing field cleared.
    pub fn without_timing(&self) -> Self {
        Self { elapsed_ms: 0, ..self.clone() }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let flags: Vec<String> = self.flags.iter().map(|(f, n)| format!("{}={n}", flag_name(*f))).collect();
        let _ = writeln!(
            s,
            "suite {}: {} cases, {} passed, {} failed [{}] ({} ms)",
            self.suite,
            self.cases_run,
            self.passed,
            self.failed,
            flags.join(" "),
            self.elapsed_ms
        );
        for f in &self.failures {
            let fixture = f.fixture.as_deref().map(|n| format!(" fixture {n}")).unwrap_or_default();
            let _ = writeln!(s, "  FAIL case {} seed {}{fixture}: {}", f.case, f.seed, f.message);
            let _ = writeln!(s, "    witness: {}", f.witness);
        }
        s
    }
}

pub fn flag_name(f: Flag) -> &'static str {
    match f {
        Flag::Exact => "exact",
        Flag::Truncated => "truncated",
        Flag::Heuristic => "heuristic",
    }
}

/// A check failure raised inside a case.
#[derive(Debug)]
pub struct Witness {
    pub message: String,
    pub value: Value,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for Witness {}

/// Fails the enclosing case with a witness unless `cond` holds.
pub fn ensure(cond: bool, message: impl Into<String>, value: impl FnOnce() -> Value) -> anyhow::Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Witness { message: message.into(), value: value() }.into())
    }
}

/// Collects case outcomes in case order.
pub struct Recorder {
    report: VerificationReport,
    start: Instant,
}

impl Recorder {
    pub fn new(suite: &str, seed: u64, truncation: usize, window: usize) -> Self {
        Self {
            report: VerificationReport {
                suite: suite.to_string(),
                seed,
                truncation,
                window,
                cases_run: 0,
                passed: 0,
                failed: 0,
                flags: BTreeMap::new(),
                failures: Vec::new(),
                elapsed_ms: 0,
            },
            start: Instant::now(),
        }
    }

    /// Runs one case; the closure returns the soundness flag of a pass.
    pub fn case(&mut self, fixture: Option<&str>, seed: u64, run: impl FnOnce() -> anyhow::Result<Flag>) {
        let case = self.report.cases_run;
        self.report.cases_run += 1;
        match run() {
            Ok(flag) => {
                self.report.passed += 1;
                *self.report.flags.entry(flag).or_default() += 1;
            }
            Err(e) => {
                self.report.failed += 1;
                let (message, witness) = match e.downcast_ref::<Witness>() {
                    Some(w) => (w.message.clone(), w.value.clone()),
                    None => {
                        let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
                        (format!("error: {}", chain.join(": ")), serde_json::json!({ "error": chain }))
                    }
                };
                self.report.failures.push(FailureRecord {
                    case,
                    seed,
                    fixture: fixture.map(str::to_string),
                    message,
                    witness,
                });
            }
        }
    }

    pub fn finish(mut self) -> VerificationReport {
        self.report.elapsed_ms = self.start.elapsed().as_millis() as u64;
        self.report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recorder_keeps_witnesses() {
        let mut r = Recorder::new("demo", 1, 4, 3);
        r.case(None, 10, || Ok(Flag::Exact));
        r.case(Some("f"), 11, || {
            ensure(false, "bad", || serde_json::json!({ "level": 2 }))?;
            Ok(Flag::Exact)
        });
        r.case(None, 12, || Err(anyhow::anyhow!("boom")));
        let rep = r.finish();
        assert_eq!((rep.cases_run, rep.passed, rep.failed), (3, 1, 2));
        assert_eq!(rep.failures[0].witness["level"], 2);
        assert_eq!(rep.failures[0].case, 1);
        assert_eq!(rep.failures[1].witness["error"][0], "boom");
        assert_eq!(rep.flags[&Flag::Exact], 1);
        let text = serde_json::to_string(&rep.without_timing()).unwrap();
        assert!(text.contains("\"exact\":1"));
    }
}
