//! Check reports and suite results: the uniform output format of every
//! property check in the toolkit.
//!
//! Reports serialize to JSON deterministically: field order is fixed by the
//! struct definitions, collections are ordered, and wall-clock timing is
//! carried in memory but excluded from serialization so that reruns with the
//! same seed produce byte-identical documents.

use serde::{Deserialize, Serialize};

use crate::numeric::{ToleranceConfig, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// A labeled tuple of vectors that witnesses (or illustrates) a check
/// outcome; `Fail` reports always carry at least one, and replaying the
/// vectors through the checked property reproduces the violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub vectors: Vec<Vec<f64>>,
}

impl Witness {
    pub fn new(label: impl Into<String>, vectors: &[&Vector]) -> Self {
        Witness {
            label: label.into(),
            vectors: vectors.iter().map(|v| v.as_slice().to_vec()).collect(),
        }
    }
}

/// Outcome of one property check.
///
/// `worst_margin` is the extreme value of the quantity the check monitors;
/// its orientation (whether small or large is bad) is fixed by the check and
/// stated in the check's documentation. Sampled checks have
/// falsification semantics: `Pass` means "no violation found within
/// `samples_used` draws", not a proof.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub verdict: Verdict,
    pub samples_used: usize,
    pub worst_margin: f64,
    pub witnesses: Vec<Witness>,
    pub tolerances: ToleranceConfig,
    /// Filled by check drivers; excluded from serialization so reports are
    /// byte-identical across reruns.
    #[serde(skip)]
    pub wall_time: Option<std::time::Duration>,
}

impl CheckReport {
    pub fn new(
        check_name: impl Into<String>,
        verdict: Verdict,
        samples_used: usize,
        worst_margin: f64,
        witnesses: Vec<Witness>,
        tolerances: &ToleranceConfig,
    ) -> Self {
        debug_assert!(
            verdict != Verdict::Fail || !witnesses.is_empty(),
            "a failing report must carry a witness"
        );
        CheckReport {
            check_name: check_name.into(),
            verdict,
            samples_used,
            worst_margin,
            witnesses,
            tolerances: tolerances.clone(),
            wall_time: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Ordered collection of check reports with the conjunction verdict:
/// any `Fail` fails the suite; otherwise any `Inconclusive` leaves it
/// inconclusive.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite_name: String,
    pub verdict: Verdict,
    pub reports: Vec<CheckReport>,
}

impl SuiteResult {
    pub fn new(suite_name: impl Into<String>, reports: Vec<CheckReport>) -> Self {
        SuiteResult {
            suite_name: suite_name.into(),
            verdict: combined_verdict(&reports),
            reports,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

pub fn combined_verdict(reports: &[CheckReport]) -> Verdict {
    if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}
