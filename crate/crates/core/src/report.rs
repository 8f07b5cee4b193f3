use std::fmt;

use serde::Serialize;

use crate::exact::Rational;

/// Outcome of one identity check over a family of cases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    /// Not run (for example over a size limit); does not count as a failure.
    pub skipped: bool,
    /// First failing case, or a short summary when everything passed.
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: true,
            cases: 0,
            skipped: false,
            detail: String::new(),
        }
    }

    /// Records one case; only the first failure message is kept.
    pub fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.passed {
            self.passed = false;
            self.detail = describe();
        }
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        if self.passed {
            self.passed = false;
            self.detail = msg.into();
        }
    }

    pub fn skip(mut self, msg: impl Into<String>) -> Self {
        self.skipped = true;
        self.detail = msg.into();
        self
    }

    pub fn with_detail(mut self, msg: impl Into<String>) -> Self {
        if self.passed {
            self.detail = msg.into();
        }
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<40} {:>6} cases  {}",
            match (self.passed, self.skipped) {
                (_, true) => "SKIP",
                (true, false) => "PASS",
                (false, false) => "FAIL",
            },
            self.name,
            self.cases,
            self.detail
        )
    }
}

pub(crate) fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|q| q.to_string()))
}
