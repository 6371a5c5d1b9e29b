use std::fmt;

use serde::Serialize;

use crate::megamodel::{Decl, SourcedDecl};
use crate::path::RepoPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Severity {
    /// Static integrity of the declarations is violated.
    #[serde(rename = "ILL_FORMED")]
    IllFormed,
    /// A declaration does not hold against the artifacts on disk.
    #[serde(rename = "UNVERIFIED")]
    Unverified,
    /// Reported, but does not fail the run.
    #[serde(rename = "WARNING")]
    Warning,
}

impl Severity {
    pub fn label(self) -> &'static str {
        match self {
            Severity::IllFormed => "ILL_FORMED",
            Severity::Unverified => "UNVERIFIED",
            Severity::Warning => "WARNING",
        }
    }

    pub fn is_failure(self) -> bool {
        !matches!(self, Severity::Warning)
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A finding before it is attached to the declaration that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub message: String,
    pub details: Vec<String>,
}

impl Finding {
    pub fn new(severity: Severity, message: impl Into<String>) -> Self {
        Finding { severity, message: message.into(), details: Vec::new() }
    }

    pub fn ill_formed(message: impl Into<String>) -> Self {
        Finding::new(Severity::IllFormed, message)
    }

    pub fn unverified(message: impl Into<String>) -> Self {
        Finding::new(Severity::Unverified, message)
    }

    pub fn warning(message: impl Into<String>) -> Self {
        Finding::new(Severity::Warning, message)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        self.details.extend(detail.lines().map(str::to_string));
        self
    }

    pub fn at(self, sd: &SourcedDecl) -> Problem {
        Problem {
            severity: self.severity,
            message: self.message,
            details: self.details,
            decl: Some(sd.decl.clone()),
            origin: sd.origin.clone(),
            line: sd.line,
        }
    }
}

/// A well-formedness or verification finding with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub severity: Severity,
    pub message: String,
    pub details: Vec<String>,
    /// `None` for file-level problems such as syntax errors.
    pub decl: Option<Decl>,
    pub origin: RepoPath,
    pub line: usize,
}

impl Problem {
    pub fn in_file(severity: Severity, message: impl Into<String>, origin: RepoPath, line: usize) -> Self {
        Problem { severity, message: message.into(), details: Vec::new(), decl: None, origin, line }
    }
}
