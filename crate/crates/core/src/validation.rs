use serde::Serialize;

/// A single violated axiom, with the arrows that witness it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: String,
    pub witnesses: Vec<String>,
    pub detail: String,
}

/// Violations found while checking a structure. Empty means every axiom held.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub(crate) fn push(&mut self, check: &str, witnesses: Vec<String>, detail: impl Into<String>) {
        self.violations.push(Violation {
            check: check.to_string(),
            witnesses,
            detail: detail.into(),
        });
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn mentions(&self, check_fragment: &str, witness: &str) -> bool {
        self.violations
            .iter()
            .any(|v| v.check.contains(check_fragment) && v.witnesses.iter().any(|w| w == witness))
    }
}
