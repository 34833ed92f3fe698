//! Check reports in text and JSON form. Values are exact strings; nothing
//! run-dependent appears unless timing is requested.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, value: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::from_bool(ok), value: value.into(), details: None, elapsed_ms: None }
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = Some(details);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub checks: Vec<Check>,
    pub verdict: Status,
}

impl Report {
    pub fn new(command: impl Into<String>, scenario: Option<String>) -> Self {
        Report { command: command.into(), scenario, checks: Vec::new(), verdict: Status::Pass }
    }

    pub fn push(&mut self, check: Check) {
        if !check.passed() {
            self.verdict = Status::Fail;
        }
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.verdict == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.scenario {
            Some(name) => writeln!(out, "{} ({name})", self.command),
            None => writeln!(out, "{}", self.command),
        }
        .unwrap();
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            write!(out, "{tag}  {} = {}", c.name, c.value).unwrap();
            if let Some(ms) = c.elapsed_ms {
                write!(out, "  [{ms} ms]").unwrap();
            }
            out.push('\n');
            if !c.passed() {
                if let Some(d) = &c.details {
                    for line in serde_json::to_string_pretty(d).unwrap().lines() {
                        writeln!(out, "      {line}").unwrap();
                    }
                }
            }
        }
        writeln!(out, "verdict: {}", if self.passed() { "pass" } else { "fail" }).unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_checks() {
        let mut r = Report::new("omega", Some("f1".into()));
        r.push(Check::new("omega", true, "-1"));
        assert!(r.passed());
        r.push(Check::new("extra", false, "1/2"));
        assert!(!r.passed());
        assert!(r.to_text().contains("FAIL  extra = 1/2"));
        assert!(r.to_json().contains("\"verdict\": \"fail\""));
    }
}
