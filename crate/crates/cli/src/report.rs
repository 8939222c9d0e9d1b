use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Serialize)]
pub struct Assertion {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub expected: Value,
    pub measured: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub step: String,
    pub ms: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub report_v: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    pub config: Value,
    pub seed: u64,
    pub workers: usize,
    pub assertions: Vec<Assertion>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    pub timings: Vec<Timing>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, suite: Option<&str>, config: Value, seed: u64, workers: usize) -> Self {
        Report {
            report_v: 1,
            command: command.into(),
            suite: suite.map(Into::into),
            config,
            seed,
            workers,
            assertions: Vec::new(),
            data: Value::Null,
            timings: Vec::new(),
            passed: true,
        }
    }

    /// Records `expected == measured`.
    pub fn check<T: Serialize + PartialEq>(&mut self, id: &str, anchor: &str, expected: T, measured: T) -> bool {
        let ok = expected == measured;
        self.push(id, anchor, ok, json!(expected), json!(measured), None);
        ok
    }

    pub fn check_true(&mut self, id: &str, anchor: &str, measured: bool) -> bool {
        self.push(id, anchor, measured, json!(true), json!(measured), None);
        measured
    }

    pub fn push(&mut self, id: &str, anchor: &str, ok: bool, expected: Value, measured: Value, note: Option<String>) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.passed &= ok;
        self.assertions.push(Assertion { id: id.into(), anchor: anchor.into(), status, expected, measured, note });
    }

    pub fn skip(&mut self, id: &str, anchor: &str, measured: Value, note: &str) {
        self.assertions.push(Assertion {
            id: id.into(),
            anchor: anchor.into(),
            status: Status::Skip,
            expected: Value::Null,
            measured,
            note: Some(note.into()),
        });
    }

    pub fn time<T>(&mut self, step: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings.push(Timing { step: step.into(), ms: t.elapsed().as_secs_f64() * 1e3 });
        out
    }

    pub fn set(&mut self, key: &str, value: Value) {
        if self.data.is_null() {
            self.data = json!({});
        }
        self.data[key] = value;
    }
}
