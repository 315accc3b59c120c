use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Where the worst margin of a check was found.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Location {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
}

impl Location {
    pub fn at_t(t: f64) -> Self {
        Location { t: Some(t), ..Default::default() }
    }

    pub fn at_t_psi(t: f64, psi: f64) -> Self {
        Location { t: Some(t), psi: Some(psi), x: None }
    }

    pub fn at_t_x(t: f64, x: f64) -> Self {
        Location { t: Some(t), psi: None, x: Some(x) }
    }
}

/// Outcome of one check.
///
/// `margin` is the worst signed slack of the checked inequality: zero or
/// positive means it holds exactly, and the check passes iff
/// `margin >= -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub pass: bool,
    pub applicable: bool,
    pub margin: f64,
    pub location: Location,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn new(check: &str, margin: f64, location: Location, tolerance: f64) -> Self {
        CheckResult {
            check: check.to_string(),
            pass: margin >= -tolerance,
            applicable: true,
            margin,
            location,
            tolerance,
            note: None,
        }
    }

    /// A check whose precondition does not hold for the input.
    pub fn not_applicable(check: &str, why: impl Into<String>) -> Self {
        CheckResult {
            check: check.to_string(),
            pass: false,
            applicable: false,
            margin: f64::NAN,
            location: Location::default(),
            tolerance: f64::NAN,
            note: Some(why.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Applicable and outside its tolerance.
    pub fn failed(&self) -> bool {
        self.applicable && !self.pass
    }
}

/// Running minimum of a margin together with where it was attained.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Worst {
    pub margin: f64,
    pub location: Location,
}

impl Worst {
    pub fn new() -> Self {
        Worst { margin: f64::INFINITY, location: Location::default() }
    }

    pub fn update(&mut self, margin: f64, location: Location) {
        // A NaN margin is the worst possible and sticks.
        if !self.margin.is_nan() && (margin.is_nan() || margin < self.margin) {
            self.margin = margin;
            self.location = location;
        }
    }

    pub fn finish(self, check: &str, tolerance: f64) -> CheckResult {
        CheckResult::new(check, self.margin, self.location, tolerance)
    }
}

/// Results sorted by check name.
pub fn sort_results(results: &mut [CheckResult]) {
    results.sort_by(|a, b| a.check.cmp(&b.check));
}

/// `true` iff no applicable check failed.
pub fn all_pass(results: &[CheckResult]) -> bool {
    !results.iter().any(CheckResult::failed)
}

pub fn results_to_json(results: &[CheckResult]) -> String {
    serde_json::to_string_pretty(results).expect("results serialize")
}

/// Fixed-width table, one line per check.
pub fn results_table(results: &[CheckResult]) -> String {
    let mut out = format!("{:<28} {:<6} {:>13} {:>11}  {}\n", "check", "status", "margin", "tolerance", "where");
    for r in results {
        let status = match (r.applicable, r.pass) {
            (false, _) => "n/a",
            (true, true) => "pass",
            (true, false) => "FAIL",
        };
        let mut place = String::new();
        if let Some(t) = r.location.t {
            let _ = write!(place, "t={t:.6} ");
        }
        if let Some(p) = r.location.psi {
            let _ = write!(place, "psi={p:.6} ");
        }
        if let Some(x) = r.location.x {
            let _ = write!(place, "x={x:.6} ");
        }
        if let Some(n) = &r.note {
            place.push_str(n);
        }
        let _ = writeln!(
            out,
            "{:<28} {:<6} {:>13.6e} {:>11.3e}  {}",
            r.check,
            status,
            r.margin,
            r.tolerance,
            place.trim_end()
        );
    }
    out
}
