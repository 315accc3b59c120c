use std::f64::consts::FRAC_PI_2;

use super::check::{CheckResult, Location, Worst};
use crate::closed_forms::frying_pan_support;
use crate::convex::{cell_width, enclosure_margin, facet_radius};
use crate::flow::FlowReport;

/// Relative tolerance on each displacement bound.
pub const SANDWICH_TOL: f64 = 0.02;

/// `2|t| <= l^2 h <= 6|t|`, `h <= pi/2` and `l >= 2 |t/pi|^(1/2)` at every
/// row with `t < 0`.
pub fn check_displacement_sandwich(report: &FlowReport) -> CheckResult {
    let mut worst = Worst::new();
    let mut rows = 0;
    for r in report.rows.iter().filter(|r| r.t < 0.0) {
        let s = -r.t;
        let m = r.l * r.l * r.h;
        let at = Location::at_t(r.t);
        worst.update(m / (2.0 * s) - 1.0, at);
        worst.update(1.0 - m / (6.0 * s), at);
        worst.update(1.0 - r.h / FRAC_PI_2, at);
        worst.update(r.l / (2.0 * (s / std::f64::consts::PI).sqrt()) - 1.0, at);
        rows += 1;
    }
    if rows == 0 {
        return CheckResult::not_applicable("displacement_sandwich", "no rows at negative time");
    }
    worst.finish("displacement_sandwich", SANDWICH_TOL)
}

/// Tolerance of the enclosure comparison, `1e-3 + 10 dpsi^2` in length units.
pub fn enclosure_tolerance(n: usize) -> f64 {
    let d = cell_width(n);
    1e-3 + 10.0 * d * d
}

/// The frying pan with flat sides at `x1 = +-b` stays inside the flow.
///
/// Not applicable unless the pan is inside at the first snapshot.
pub fn check_barrier_enclosure(report: &FlowReport, b: f64) -> CheckResult {
    const NAME: &str = "barrier_enclosure";
    let tol = enclosure_tolerance(report.n);
    let pairs: Vec<_> = report.rows.iter().zip(&report.snapshots).filter(|(r, _)| r.t < 0.0).collect();
    if pairs.is_empty() {
        return CheckResult::not_applicable(NAME, "no snapshots at negative time");
    }
    let mut worst = Worst::new();
    for (i, (row, snap)) in pairs.iter().enumerate() {
        let margin = match frying_pan_support(b, row.t, report.n).and_then(|pan| enclosure_margin(&pan, snap)) {
            Ok(m) => m,
            Err(e) => return CheckResult::not_applicable(NAME, e.to_string()),
        };
        if i == 0 && margin < 0.0 {
            return CheckResult::not_applicable(
                NAME,
                format!("barrier b = {b} not enclosed at t = {} (margin {margin:.3e})", row.t),
            );
        }
        worst.update(margin, Location::at_t(row.t));
    }
    worst.finish(NAME, tol).with_note(format!("b = {b}"))
}

/// Flat-side radius of the pan enclosed at the snapshot nearest `t`, read off
/// its sampled support function. `None` when enclosure fails at any snapshot
/// up to that time.
pub fn certified_facet_radius(report: &FlowReport, b: f64, t: f64) -> Option<f64> {
    let tol = enclosure_tolerance(report.n);
    let (idx, _) = report
        .rows
        .iter()
        .enumerate()
        .take(report.snapshots.len())
        .min_by(|x, y| (x.1.t - t).abs().total_cmp(&(y.1.t - t).abs()))?;
    let mut pan = None;
    for k in 0..=idx {
        let row = &report.rows[k];
        let p = frying_pan_support(b, row.t, report.n).ok()?;
        if enclosure_margin(&p, &report.snapshots[k]).ok()? < -tol {
            return None;
        }
        pan = Some(p);
    }
    pan.map(|p| facet_radius(&p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{FlowParams, HaltReason, ReportRow};

    fn report_from(rows: &[(f64, f64, f64)]) -> FlowReport {
        FlowReport {
            schema_version: 1,
            family: None,
            params: FlowParams::new(1.0, rows[0].0, rows[rows.len() - 1].0),
            n: 64,
            rows: rows
                .iter()
                .map(|&(t, h, l)| ReportRow {
                    t,
                    h,
                    l,
                    volume: 0.0,
                    min_ratio: 1.0,
                    max_residual: 0.0,
                    dt_min: 0.0,
                    capped: false,
                })
                .collect(),
            snapshots: vec![],
            halt: HaltReason::ReachedEnd,
            error: None,
            backward_time_bound: None,
            steps: 0,
        }
    }

    #[test]
    fn cylinder_and_cone_arithmetic() {
        // V = 4 pi |t| between the double cone (2 pi l^2 h / 3) and the
        // cylinder (2 pi l^2 h) gives 2|t| <= l^2 h <= 6|t|.
        let t = -10.0;
        let h = FRAC_PI_2;
        let low = (2.0 * 10.0 / h).sqrt();
        let high = (6.0 * 10.0 / h).sqrt();
        assert!(check_displacement_sandwich(&report_from(&[(t, h, low)])).margin.abs() < 1e-12);
        assert!(check_displacement_sandwich(&report_from(&[(t, h, high)])).margin.abs() < 1e-12);
        assert!(!check_displacement_sandwich(&report_from(&[(t, h, 1.1 * high)])).pass);
        assert!(!check_displacement_sandwich(&report_from(&[(t, 1.1 * h, low)])).pass);
    }

    #[test]
    fn displacement_needs_negative_times() {
        assert!(!check_displacement_sandwich(&report_from(&[(0.0, 1.0, 1.0)])).applicable);
    }
}
