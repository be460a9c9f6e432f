//! Pass/fail bookkeeping shared by the checkers, the demos and the CLI.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::Element;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// One named verdict with an optional witness rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub witness: String,
}

impl Check {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { name: name.into(), status: Status::Pass, witness: detail.into() }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Self { name: name.into(), status: Status::Fail, witness: witness.into() }
    }

    pub fn inconclusive(name: impl Into<String>, why: impl Into<String>) -> Self {
        Self { name: name.into(), status: Status::Inconclusive, witness: why.into() }
    }

    /// `Ok(None)` passes, `Ok(Some(w))` fails with witness `w`, window errors
    /// are inconclusive and any other error fails.
    pub fn from_outcome(name: impl Into<String>, outcome: Result<Option<String>>) -> Self {
        match outcome {
            Ok(None) => Check::pass(name, ""),
            Ok(Some(w)) => Check::fail(name, w),
            Err(e) if e.is_window() => Check::inconclusive(name, e.to_string()),
            Err(e) => Check::fail(name, e.to_string()),
        }
    }

    /// A check that two sides agree on every input in `inputs`.
    pub fn equality<I, L, R>(
        name: impl Into<String>,
        inputs: I,
        render: impl Fn(&I::Item) -> String,
        lhs: L,
        rhs: R,
    ) -> Self
    where
        I: IntoIterator,
        L: Fn(&I::Item) -> Result<Element>,
        R: Fn(&I::Item) -> Result<Element>,
    {
        Check::from_outcome(name, first_mismatch(inputs, render, lhs, rhs))
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn render(&self) -> String {
        if self.witness.is_empty() {
            format!("[{}] {}", self.status.label(), self.name)
        } else {
            format!("[{}] {}: {}", self.status.label(), self.name, self.witness)
        }
    }
}

/// First input on which the two sides differ, rendered with both values.
pub fn first_mismatch<I, L, R>(inputs: I, render: impl Fn(&I::Item) -> String, lhs: L, rhs: R) -> Result<Option<String>>
where
    I: IntoIterator,
    L: Fn(&I::Item) -> Result<Element>,
    R: Fn(&I::Item) -> Result<Element>,
{
    for x in inputs {
        let (l, r) = (lhs(&x)?, rhs(&x)?);
        if l != r {
            return Ok(Some(format!("at {}: {} != {}", render(&x), l, r)));
        }
    }
    Ok(None)
}

/// Overall status: any failure fails, otherwise any inconclusive check makes
/// the whole run inconclusive.
pub fn combined_status<'a>(checks: impl IntoIterator<Item = &'a Check>) -> Status {
    let mut status = Status::Pass;
    for c in checks {
        match c.status {
            Status::Fail => return Status::Fail,
            Status::Inconclusive => status = Status::Inconclusive,
            Status::Pass => {}
        }
    }
    status
}

/// Outcome of one command or demo.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    /// Free-form report lines printed before the checks.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lines: Vec<String>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            status: Status::Pass,
            checks: Vec::new(),
            artifacts: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
        self.status = combined_status(&self.checks);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.push(c);
        }
    }

    /// Records an error that aborted the run.
    pub fn abort(&mut self, stage: &str, err: &Error) {
        self.push(Check::from_outcome(stage, Err(err.clone())));
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("== {} ==\n", self.command));
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        for c in &self.checks {
            out.push_str(&c.render());
            out.push('\n');
        }
        for a in &self.artifacts {
            out.push_str(&format!("wrote {a}\n"));
        }
        out.push_str(&format!("status: {}\n", self.status.label()));
        out
    }
}
