use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Standing caveat attached to every report.
pub const FINITE_WINDOW_NOTE: &str =
    "finite-window evidence only: the spectral type of the infinite operator is not established";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedAtScale,
    Inconclusive,
    Violated,
}

impl Verdict {
    /// The weaker of two verdicts.
    pub fn worst(self, other: Verdict) -> Verdict {
        self.max(other)
    }

    /// Process exit status used by the command-line tool.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::CertifiedAtScale => 0,
            Verdict::Inconclusive => 3,
            Verdict::Violated => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CertifiedAtScale => "certified-at-scale",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Violated => "violated",
        }
    }
}

/// A concrete `(n, x)` at which a hypothesis or bound fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<f64>,
    pub value: f64,
    pub description: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSummary {
    pub fn of(xs: &[f64]) -> Option<GridSummary> {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (!xs.is_empty()).then_some(GridSummary {
            lo,
            hi,
            count: xs.len(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowInfo {
    pub n_start: usize,
    pub n_end: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x_grid: Option<GridSummary>,
}

/// One hypothesis of a multi-condition criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionBlock {
    pub name: String,
    pub verdict: Verdict,
    pub statistics: BTreeMap<String, f64>,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl ConditionBlock {
    pub fn new(name: impl Into<String>) -> Self {
        ConditionBlock {
            name: name.into(),
            verdict: Verdict::CertifiedAtScale,
            statistics: BTreeMap::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn stat(&mut self, key: &str, value: f64) {
        self.statistics.insert(key.to_string(), value);
    }

    pub fn fail(&mut self, verdict: Verdict, witness: Option<Witness>) {
        self.verdict = self.verdict.worst(verdict);
        self.witnesses.extend(witness);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub window: WindowInfo,
    pub statistics: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub blocks: Vec<ConditionBlock>,
}

impl CriterionReport {
    pub fn new(criterion: impl Into<String>, window: WindowInfo) -> Self {
        CriterionReport {
            criterion: criterion.into(),
            window,
            statistics: BTreeMap::new(),
            verdict: Verdict::CertifiedAtScale,
            witnesses: Vec::new(),
            notes: vec![FINITE_WINDOW_NOTE.to_string()],
            blocks: Vec::new(),
        }
    }

    pub fn stat(&mut self, key: &str, value: f64) {
        self.statistics.insert(key.to_string(), value);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Lower the verdict; a violation must come with a witness.
    pub fn downgrade(&mut self, verdict: Verdict, witness: Option<Witness>) {
        debug_assert!(verdict != Verdict::Violated || witness.is_some());
        self.verdict = self.verdict.worst(verdict);
        self.witnesses.extend(witness);
    }

    pub fn push_block(&mut self, block: ConditionBlock) {
        self.verdict = self.verdict.worst(block.verdict);
        self.blocks.push(block);
    }

    pub fn block(&self, name: &str) -> Option<&ConditionBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_order_and_codes() {
        assert_eq!(
            Verdict::CertifiedAtScale.worst(Verdict::Inconclusive),
            Verdict::Inconclusive
        );
        assert_eq!(
            Verdict::Violated.worst(Verdict::Inconclusive),
            Verdict::Violated
        );
        assert_eq!(Verdict::Violated.exit_code(), 4);
    }

    #[test]
    fn json_shape() {
        let mut r = CriterionReport::new(
            "demo",
            WindowInfo {
                n_start: 1,
                n_end: 3,
                x_grid: None,
            },
        );
        r.stat("sup", 0.5);
        r.downgrade(
            Verdict::Violated,
            Some(Witness {
                n: 2,
                x: Some(0.0),
                value: 9.0,
                description: "grows".into(),
            }),
        );
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "violated");
        assert_eq!(v["witnesses"][0]["n"], 2);
        assert!(v.get("blocks").is_none());
        assert_eq!(v["statistics"]["sup"], 0.5);
    }
}
