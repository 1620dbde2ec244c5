//! Rendering shared by every subcommand: a text form for humans, a JSON form
//! carrying the same verdicts, and the overall verdict that drives the
//! process exit code.

use avn_core::report::{CheckReport, SuiteResult, Verdict};

/// Everything a subcommand produces. `verdict` decides the exit code: `Pass`
/// exits 0, anything else exits 1. Informational commands report `Pass`.
pub struct Rendered {
    pub text: String,
    pub json: serde_json::Value,
    pub verdict: Verdict,
}

/// Reports only ever hold finite numbers (the checks clamp infinities), so
/// JSON conversion cannot fail.
pub fn to_json<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("reports contain only finite numbers")
}

pub fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut combined = Verdict::Pass;
    for v in verdicts {
        match v {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Inconclusive => combined = Verdict::Inconclusive,
            Verdict::Pass => {}
        }
    }
    combined
}

/// Shortest round-trip formatting, so text output is exact and reruns are
/// byte-identical.
pub fn fmt_floats(values: &[f64]) -> String {
    let body = values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(", ");
    format!("({body})")
}

pub fn render_report(r: &CheckReport, out: &mut String) {
    out.push_str(&format!(
        "  {}: {} [{} samples, worst margin {:.3e}]\n",
        r.check_name,
        verdict_word(r.verdict),
        r.samples_used,
        r.worst_margin
    ));
    for w in &r.witnesses {
        out.push_str(&format!("    witness — {}\n", w.label));
        for v in &w.vectors {
            out.push_str(&format!("      {}\n", fmt_floats(v)));
        }
    }
}

pub fn render_suite(s: &SuiteResult) -> String {
    let mut out = format!("suite {}: {}\n", s.suite_name, verdict_word(s.verdict));
    for r in &s.reports {
        render_report(r, &mut out);
    }
    out
}
