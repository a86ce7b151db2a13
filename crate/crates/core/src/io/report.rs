use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub const REPORT_FORMAT: &str = "asymnet-report";

/// JSON envelope shared by every command that emits a verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub format: &'static str,
    pub version: &'static str,
    pub command: String,
    /// `None` for commands that compute data without testing a predicate.
    pub verdict: Option<bool>,
    pub residuals: BTreeMap<String, f64>,
    pub result: Value,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            format: REPORT_FORMAT,
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            verdict: None,
            residuals: BTreeMap::new(),
            result: Value::Null,
        }
    }

    pub fn verdict(mut self, verdict: bool) -> Self {
        self.verdict = Some(verdict);
        self
    }

    pub fn residual(mut self, name: &str, value: f64) -> Self {
        self.residuals.insert(name.to_owned(), value);
        self
    }

    pub fn result(mut self, value: &impl Serialize) -> serde_json::Result<Self> {
        self.result = serde_json::to_value(value)?;
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are always serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_fields() {
        let r = Report::new("validate")
            .verdict(true)
            .residual("cross", 1e-15)
            .result(&serde_json::json!({"quads": 4}))
            .unwrap();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["format"], REPORT_FORMAT);
        assert_eq!(v["verdict"], true);
        assert_eq!(v["residuals"]["cross"], 1e-15);
        assert_eq!(v["result"]["quads"], 4);
    }
}
