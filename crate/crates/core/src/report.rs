//! Structured pass/fail reports shared by the exact verification scenarios.

use serde::Serialize;

/// One checked statement: what was expected, what was computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assertion {
    pub assertion: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

impl Assertion {
    /// Passes iff `computed == expected` as strings.
    pub fn compare(assertion: &str, expected: impl Into<String>, computed: impl Into<String>) -> Self {
        let expected = expected.into();
        let computed = computed.into();
        let pass = expected == computed;
        Assertion { assertion: assertion.to_string(), expected, computed, pass }
    }

    pub fn check(assertion: &str, expected: impl Into<String>, computed: impl Into<String>, pass: bool) -> Self {
        Assertion { assertion: assertion.to_string(), expected: expected.into(), computed: computed.into(), pass }
    }
}

/// Ordered list of assertions; serializes as a plain JSON list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Report {
    pub entries: Vec<Assertion>,
}

impl Report {
    pub fn push(&mut self, a: Assertion) {
        self.entries.push(a);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|a| a.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.entries.iter().filter(|a| !a.pass)
    }

    pub fn find(&self, assertion: &str) -> Option<&Assertion> {
        self.entries.iter().find(|a| a.assertion == assertion)
    }
}
