//! JSON form of a run.

use serde::Serialize;
use serde_json::{json, Map, Value};

use qtransfer_core::report::{Expectation, ParamValue, ResidualReport};

use crate::config::Config;
use crate::contexts::ContextRecord;

#[derive(Clone, Debug, Serialize)]
pub struct ReportRecord {
    pub name: String,
    pub parameters: Map<String, Value>,
    pub absolute: f64,
    pub relative: f64,
    pub tolerance: f64,
    pub expect: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

fn param_json(v: &ParamValue) -> Value {
    match v {
        ParamValue::Int(i) => json!(i),
        ParamValue::Real(x) => json!(x),
        ParamValue::Complex(re, im) => json!([re, im]),
        ParamValue::Ints(v) => json!(v),
        ParamValue::Text(s) => json!(s),
    }
}

impl ReportRecord {
    pub fn new(r: &ResidualReport, timings: bool) -> Self {
        Self {
            name: r.name.clone(),
            parameters: r.parameters.iter().map(|(k, v)| (k.clone(), param_json(v))).collect(),
            absolute: r.absolute,
            relative: r.relative,
            tolerance: r.tolerance,
            expect: match r.expect {
                Expectation::Vanish => "vanish",
                Expectation::Exceed => "exceed",
            },
            pass: r.pass,
            elapsed_ms: if timings { r.elapsed.map(|d| d.as_secs_f64() * 1e3) } else { None },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    /// 2 when the first attempt hit a pole and the check was re-seeded.
    pub attempts: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub reports: Vec<ReportRecord>,
    pub contexts: Vec<ContextRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: Config,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn failures(&self) -> impl Iterator<Item = (&CheckRecord, Option<&ReportRecord>)> {
        self.checks.iter().filter(|c| !c.pass).flat_map(|c| {
            let failing: Vec<_> = c.reports.iter().filter(|r| !r.pass).map(Some).collect();
            let items = if failing.is_empty() { vec![None] } else { failing };
            items.into_iter().map(move |r| (c, r))
        })
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}
