//! Three-valued verdicts with attached witnesses.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    /// No instance failed, but at least one touched a horizon frontier.
    Indeterminate,
}

/// Evidence for a verdict: the construction or check step that produced it,
/// plus named values (points, sets, distances) rendered as JSON.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub step: String,
    pub detail: Map<String, Value>,
}

impl Witness {
    pub fn new(step: impl Into<String>) -> Self {
        Witness {
            step: step.into(),
            detail: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("witness values serialize");
        self.detail.insert(key.to_string(), v);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.detail.get(key)
    }
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.step)?;
        for (k, v) in &self.detail {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Set when a group-quantified check ran over a capped enumeration; the
    /// verdict then holds for the enumerated subgroup only.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub qualified: bool,
    /// Number of predicate instances skipped because they touched a frontier.
    #[serde(skip_serializing_if = "is_zero")]
    pub indeterminate: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict {
            status: Status::Pass,
            witness: None,
            qualified: false,
            indeterminate: 0,
        }
    }

    pub fn fail(witness: Witness) -> Self {
        Verdict {
            status: Status::Fail,
            witness: Some(witness),
            qualified: false,
            indeterminate: 0,
        }
    }

    pub fn from_bool(ok: bool, witness: impl FnOnce() -> Witness) -> Self {
        if ok {
            Verdict::pass()
        } else {
            Verdict::fail(witness())
        }
    }

    pub fn qualified(mut self, q: bool) -> Self {
        self.qualified |= q;
        self
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }

    /// The witness of a definite failure.
    pub fn failure(&self) -> Option<Witness> {
        self.witness.clone().filter(|_| self.is_fail())
    }

    /// Pass, or no definite failure (frontier contact only).
    pub fn holds(&self) -> bool {
        self.status != Status::Fail
    }

    /// Record a frontier contact. The first one keeps its witness.
    pub fn note_indeterminate(&mut self, witness: impl FnOnce() -> Witness) {
        self.indeterminate += 1;
        if self.status == Status::Pass {
            self.status = Status::Indeterminate;
            self.witness = Some(witness());
        }
    }

    /// Combine two verdicts over a conjunction: failures dominate, then
    /// frontier contacts.
    pub fn and(mut self, other: Verdict) -> Verdict {
        self.qualified |= other.qualified;
        self.indeterminate += other.indeterminate;
        match (self.status, other.status) {
            (Status::Fail, _) => {}
            (_, Status::Fail) => {
                self.status = Status::Fail;
                self.witness = other.witness;
            }
            (Status::Pass, Status::Indeterminate) => {
                self.status = Status::Indeterminate;
                self.witness = other.witness;
            }
            _ => {}
        }
        self
    }
}

/// Accumulates a verdict over many predicate instances, stopping at the first
/// definite failure.
#[derive(Debug)]
pub struct VerdictBuilder {
    verdict: Verdict,
}

impl Default for VerdictBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl VerdictBuilder {
    pub fn new() -> Self {
        VerdictBuilder {
            verdict: Verdict::pass(),
        }
    }

    pub fn failed(&self) -> bool {
        self.verdict.is_fail()
    }

    pub fn fail(&mut self, witness: Witness) {
        if !self.failed() {
            self.verdict.status = Status::Fail;
            self.verdict.witness = Some(witness);
        }
    }

    pub fn indeterminate(&mut self, witness: impl FnOnce() -> Witness) {
        self.verdict.note_indeterminate(witness);
    }

    pub fn finish(self) -> Verdict {
        self.verdict
    }
}
