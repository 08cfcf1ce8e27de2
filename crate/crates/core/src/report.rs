//! Machine-readable verdicts.
//!
//! Every checker in the crate produces a [`ValidationReport`]: an ordered list
//! of `(axiom, witness)` pairs. An empty list means the structure is valid.
//! Witnesses are element indices in the order the axiom quantifies them.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: String,
    pub witness: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Violation {
    pub fn new(axiom: impl Into<String>, witness: impl Into<Vec<usize>>) -> Self {
        Violation {
            axiom: axiom.into(),
            witness: witness.into(),
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}", self.axiom, self.witness)?;
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    /// Violations of a single axiom.
    pub fn of<'a>(&'a self, axiom: &'a str) -> impl Iterator<Item = &'a Violation> + 'a {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Collects violations, optionally stopping at the first one.
///
/// Checkers call [`Checker::fail`] and bail out when it returns `true`, so the
/// same scan serves both full reports and fast yes/no filtering.
pub(crate) struct Checker {
    report: ValidationReport,
    first_only: bool,
}

impl Checker {
    pub fn all() -> Self {
        Checker {
            report: ValidationReport::new(),
            first_only: false,
        }
    }

    pub fn first_only() -> Self {
        Checker {
            report: ValidationReport::new(),
            first_only: true,
        }
    }

    /// Records a violation. Returns `true` when the scan should stop.
    pub fn fail(&mut self, v: Violation) -> bool {
        self.report.push(v);
        self.first_only
    }

    pub fn done(&self) -> bool {
        self.first_only && !self.report.is_valid()
    }

    pub fn finish(self) -> ValidationReport {
        self.report
    }
}

/// Result of a construction that exists only under a checkable criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<T> {
    Built(T),
    Refuted(Violation),
}

impl<T> Outcome<T> {
    pub fn built(self) -> Option<T> {
        match self {
            Outcome::Built(t) => Some(t),
            Outcome::Refuted(_) => None,
        }
    }

    pub fn as_built(&self) -> Option<&T> {
        match self {
            Outcome::Built(t) => Some(t),
            Outcome::Refuted(_) => None,
        }
    }

    pub fn refutation(&self) -> Option<&Violation> {
        match self {
            Outcome::Built(_) => None,
            Outcome::Refuted(v) => Some(v),
        }
    }

    pub fn is_built(&self) -> bool {
        matches!(self, Outcome::Built(_))
    }
}
