//! Check reports: the record every verification predicate produces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Observed outcome of a check. Which outcome counts as success depends
/// on the expectation: some paper claims are negative (a family leaves
/// the contact world at t = 1), and the suite asserts those failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Parameter slice attached to a report. A sorted map keeps report files
/// byte-reproducible.
pub type Params = BTreeMap<String, serde_json::Value>;

/// Location of the worst sample of a check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArgMin {
    /// Index into the deterministic sample list (lowest index wins ties).
    pub sample_index: usize,
    /// Chart coordinates of the sample.
    pub point: Vec<f64>,
    /// Deformation parameter, for checks that sweep a grid in t.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

/// Aggregated statistics and verdict for one verification predicate over
/// one sample set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub model: String,
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmin: Option<ArgMin>,
    /// Residual norm, for identity checks (max |coefficient|).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub threshold: f64,
    /// Distance from the threshold: positive margins pass.
    pub margin: f64,
    pub verdict: Verdict,
    /// The outcome the theory predicts.
    pub expected: Verdict,
}

impl CheckReport {
    /// A positivity check: passes when the minimum exceeds the threshold.
    pub fn positivity(
        check: impl Into<String>,
        model: impl Into<String>,
        params: Params,
        min: f64,
        argmin: Option<ArgMin>,
        threshold: f64,
    ) -> Self {
        let margin = min - threshold;
        CheckReport {
            check: check.into(),
            model: model.into(),
            params,
            min: Some(min),
            max: None,
            argmin,
            residual: None,
            threshold,
            margin,
            verdict: if margin > 0.0 { Verdict::Pass } else { Verdict::Fail },
            expected: Verdict::Pass,
        }
    }

    /// A residual check: passes when the residual stays at or below the
    /// tolerance.
    pub fn residual(
        check: impl Into<String>,
        model: impl Into<String>,
        params: Params,
        residual: f64,
        argmax: Option<ArgMin>,
        tolerance: f64,
    ) -> Self {
        let margin = tolerance - residual;
        CheckReport {
            check: check.into(),
            model: model.into(),
            params,
            min: None,
            max: Some(residual),
            argmin: argmax,
            residual: Some(residual),
            threshold: tolerance,
            margin,
            verdict: if margin >= 0.0 { Verdict::Pass } else { Verdict::Fail },
            expected: Verdict::Pass,
        }
    }

    /// Mark this report as one whose predicted outcome is failure.
    pub fn expect_fail(mut self) -> Self {
        self.expected = Verdict::Fail;
        self
    }

    pub fn with_max(mut self, max: f64) -> Self {
        self.max = Some(max);
        self
    }

    /// Did the observed verdict match the expectation?
    pub fn ok(&self) -> bool {
        self.verdict == self.expected
    }
}

/// One probe of the epsilon bisection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepProbe {
    pub epsilon: f64,
    pub pass: bool,
}

/// Result of the epsilon feasibility sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    /// Largest epsilon that passed every positivity check on the grid.
    pub eps_max: f64,
    pub trace: Vec<SweepProbe>,
    /// Status of 1.05·eps_max: "fails" or "untested".
    pub above_status: String,
    pub t_points: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Convenience: all reports matched their expectations.
pub fn all_ok(reports: &[CheckReport]) -> bool {
    reports.iter().all(CheckReport::ok)
}

pub fn param_f64(v: f64) -> serde_json::Value {
    serde_json::json!(v)
}

pub fn param_u64(v: u64) -> serde_json::Value {
    serde_json::json!(v)
}

pub fn param_str(v: &str) -> serde_json::Value {
    serde_json::json!(v)
}
