use std::fmt;

use serde::Serialize;

/// One named check with its outcome and, on failure, the offending entity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub locus: Option<String>,
    pub detail: String,
}

/// Collection of invariant checks. Failures are entries, never errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<CheckEntry>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pass(&mut self, name: &str, detail: impl Into<String>) {
        self.entries.push(CheckEntry {
            name: name.to_string(),
            passed: true,
            locus: None,
            detail: detail.into(),
        });
    }

    pub fn fail(&mut self, name: &str, locus: impl Into<String>, detail: impl Into<String>) {
        self.entries.push(CheckEntry {
            name: name.to_string(),
            passed: false,
            locus: Some(locus.into()),
            detail: detail.into(),
        });
    }

    /// Records `name` as passed when `first_failure` is `None`.
    pub fn record(&mut self, name: &str, ok_detail: &str, first_failure: Option<(String, String)>) {
        match first_failure {
            None => self.pass(name, ok_detail),
            Some((locus, detail)) => self.fail(name, locus, detail),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.entries.extend(other.entries);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let tag = if e.passed { "PASS" } else { "FAIL" };
            match &e.locus {
                Some(l) => writeln!(f, "[{tag}] {}: {} ({l})", e.name, e.detail)?,
                None => writeln!(f, "[{tag}] {}: {}", e.name, e.detail)?,
            }
        }
        Ok(())
    }
}
