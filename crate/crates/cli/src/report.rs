//! Check bookkeeping shared by every subcommand: named checks with a
//! measured value, a tolerance, and a pass flag, serialized to JSON.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Pass when |measured| <= tolerance.
    pub fn bounded(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check { name: name.into(), measured, tolerance, pass: measured.abs() <= tolerance }
    }

}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            checks: Vec::new(),
            artifacts: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        if !check.pass {
            self.failures.push(format!(
                "{}: measured {:e} vs tolerance {:e}",
                check.name, check.measured, check.tolerance
            ));
        }
        self.checks.push(check);
    }

    pub fn artifact(&mut self, path: &std::path::Path) {
        self.artifacts.push(path.display().to_string());
    }

    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}
