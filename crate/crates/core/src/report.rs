//! Pass/fail reports with witnesses, shared by every checker.

use serde::{Deserialize, Serialize};

const MAX_WITNESSES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub law: String,
    pub input: String,
    pub detail: String,
}

/// Outcome of checking a family of identities on a set of cases.
///
/// Only the first few failures are kept as witnesses; `failed` counts all.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub failed: usize,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            passed: true,
            cases: 0,
            failed: 0,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records one case; the closures run only on failure.
    pub fn check<I, D>(&mut self, law: &str, ok: bool, input: I, detail: D)
    where
        I: FnOnce() -> String,
        D: FnOnce() -> String,
    {
        self.cases += 1;
        if !ok {
            self.fail(law, input(), detail());
        }
    }

    pub fn fail(&mut self, law: &str, input: String, detail: String) {
        self.passed = false;
        self.failed += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(Witness { law: law.to_string(), input, detail });
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Folds another report's cases and failures into this one.
    pub fn absorb(&mut self, other: CheckReport) {
        self.cases += other.cases;
        self.failed += other.failed;
        self.passed &= other.passed;
        for w in other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(Witness {
                    law: format!("{}: {}", other.name, w.law),
                    input: w.input,
                    detail: w.detail,
                });
            }
        }
        self.notes.extend(other.notes);
    }

    pub fn first_witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }

    pub fn failed_laws(&self) -> Vec<&str> {
        self.witnesses.iter().map(|w| w.law.as_str()).collect()
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "pass" } else { "FAIL" };
        write!(f, "{}: {} ({} cases", self.name, verdict, self.cases)?;
        if self.failed > 0 {
            write!(f, ", {} failed", self.failed)?;
        }
        write!(f, ")")?;
        for w in &self.witnesses {
            write!(f, "\n  {} at {}: {}", w.law, w.input, w.detail)?;
        }
        Ok(())
    }
}
