use std::path::PathBuf;
use std::time::Duration;

/// How `measured` is compared with `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckKind {
    AtMost,
    AtLeast,
    CloseTo(f64),
    Info,
    Flag,
}

/// One measured quantity checked against a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub kind: CheckKind,
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            pass: measured <= tolerance,
            kind: CheckKind::AtMost,
        }
    }

    /// Passes when `|measured − expected| ≤ tolerance`.
    pub fn close_to(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            pass: (measured - expected).abs() <= tolerance,
            kind: CheckKind::CloseTo(expected),
        }
    }

    /// Passes when `measured ≥ threshold`; the threshold is stored as the tolerance.
    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance: threshold,
            pass: measured >= threshold,
            kind: CheckKind::AtLeast,
        }
    }

    /// A reported value with no pass/fail semantics.
    pub fn info(name: impl Into<String>, measured: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance: f64::INFINITY,
            pass: true,
            kind: CheckKind::Info,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            measured: if ok { 1.0 } else { 0.0 },
            tolerance: 1.0,
            pass: ok,
            kind: CheckKind::Flag,
        }
    }
}

impl Check {
    /// Re-evaluates the check against a new tolerance. Info and flag rows
    /// are returned unchanged.
    pub fn with_tolerance(&self, tolerance: f64) -> Self {
        let pass = match self.kind {
            CheckKind::AtMost => self.measured <= tolerance,
            CheckKind::AtLeast => self.measured >= tolerance,
            CheckKind::CloseTo(e) => (self.measured - e).abs() <= tolerance,
            CheckKind::Info | CheckKind::Flag => return self.clone(),
        };
        Self {
            tolerance,
            pass,
            ..self.clone()
        }
    }
}

/// Solver or verifier output: named checks plus any artifacts written.
#[derive(Debug, Clone, Default)]
pub struct SolveReport {
    pub command: String,
    pub checks: Vec<Check>,
    pub artifacts: Vec<PathBuf>,
    pub wall_time: Duration,
}

impl SolveReport {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
