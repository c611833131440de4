//! The JSON envelope shared by every subcommand, and plain CSV tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value};
use weyl_core::Error;

pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when value ≤ bound.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, bound, passed: value <= bound }
    }

    /// Passes when value ≥ bound.
    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, bound, passed: value >= bound }
    }
}

pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub results: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), checks: Vec::new(), results: Map::new() }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.into(), value.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self, elapsed: f64) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "value": c.value, "bound": c.bound, "passed": c.passed}))
            .collect();
        json!({
            "command": self.command,
            "status": if self.passed() { "pass" } else { "fail" },
            "checks": checks,
            "results": self.results,
            "error": Value::Null,
            "elapsed_seconds": elapsed,
        })
    }
}

/// Report for a command that stopped with an error.
pub fn error_json(command: &str, err: &Error, elapsed: f64) -> Value {
    let debug = format!("{err:?}");
    let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error");
    json!({
        "command": command,
        "status": "error",
        "checks": [],
        "results": {},
        "error": {"kind": kind, "message": err.to_string()},
        "elapsed_seconds": elapsed,
    })
}

/// Rows of already formatted cells under a header.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), Error> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest representation that parses back to the same double, with an
/// exponent for very large or small magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
