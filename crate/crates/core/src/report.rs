//! Outcomes of identity checks and the certificates built from them.

use serde::Serialize;

/// Whether an identity holds on the tested range, with a witness on failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<String>,
}

impl Verdict {
    pub fn pass() -> Self {
        Self {
            holds: true,
            witness: None,
        }
    }

    pub fn fail(witness: impl Into<String>) -> Self {
        Self {
            holds: false,
            witness: Some(witness.into()),
        }
    }

    pub fn from_bool(holds: bool, witness: impl FnOnce() -> String) -> Self {
        if holds {
            Self::pass()
        } else {
            Self::fail(witness())
        }
    }

    /// Conjunction; keeps the first witness.
    pub fn and(self, other: Verdict) -> Verdict {
        if !self.holds {
            self
        } else {
            other
        }
    }
}

/// Truncation bounds under which a check was certified.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub word_length: Option<usize>,
    pub hbar_cutoff: Option<usize>,
    pub nilpotency: Option<usize>,
}

impl Bounds {
    pub fn words(n: usize) -> Self {
        Self {
            word_length: Some(n),
            ..Self::default()
        }
    }

    pub fn with_hbar(mut self, k: usize) -> Self {
        self.hbar_cutoff = Some(k);
        self
    }

    pub fn with_nilpotency(mut self, m: usize) -> Self {
        self.nilpotency = Some(m);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// A named, machine-readable check result. Field order is stable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub check: String,
    pub status: Status,
    pub bounds: Bounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Certificate {
    pub fn new(check: impl Into<String>, verdict: Verdict, bounds: Bounds) -> Self {
        Self {
            check: check.into(),
            status: if verdict.holds { Status::Pass } else { Status::Fail },
            bounds,
            witness: verdict.witness,
            elapsed_ms: None,
        }
    }

    /// Certificate that passes iff the verdict fails (negative controls).
    pub fn expect_failure(check: impl Into<String>, verdict: Verdict, bounds: Bounds) -> Self {
        let holds = !verdict.holds;
        Self {
            check: check.into(),
            status: if holds { Status::Pass } else { Status::Fail },
            bounds,
            witness: verdict.witness,
            elapsed_ms: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}
