//! Numerical checks of the flow's quantitative statements over reports.

mod check;
mod pancake;
mod rates;
mod ratio;
mod sausage;

pub use check::{all_pass, results_table, results_to_json, sort_results, CheckResult, Location};
pub use pancake::{
    certified_facet_radius, check_barrier_enclosure, check_displacement_sandwich, enclosure_tolerance, SANDWICH_TOL,
};
pub use rates::{
    check_height_speed, check_volume_rate, r_alpha_sq_quadrature, HEIGHT_SPEED_TOL, R_ALPHA_QUADRATURE_TOL,
    VOLUME_RATE_TOL_BOUND, VOLUME_RATE_TOL_EXACT,
};
pub use ratio::{
    check_ratio_pde_residual, check_ratio_preserved, check_ratio_profile, ratio_pde_residual, ratio_pde_residual_with,
    ratio_tolerance, PdeResidual, RatioField, MIN_GRAPH_RADIUS, RATIO_PDE_CONSTANT,
};
pub use sausage::{
    check_curvature_upper, check_speed_lower, check_speed_monotone, check_tip_speed, equator_gauss_curvature,
    speed_tolerance, CURVATURE_UPPER_TOL, TIP_SPEED_TOL,
};

use crate::flow::{Family, FlowReport};

/// Barrier used by the suite for pancake reports.
pub const DEFAULT_BARRIER_B: f64 = 1.0;

type Check<'a> = Box<dyn Fn() -> CheckResult + Send + Sync + 'a>;

/// Every check that applies to the report's family, run concurrently and
/// sorted by name.
pub fn verify_report(report: &FlowReport, barrier_b: f64) -> Vec<CheckResult> {
    let mut checks: Vec<Check> = vec![Box::new(|| check_volume_rate(report))];
    match report.family {
        Some(Family::Pancake(_)) => {
            checks.push(Box::new(|| check_ratio_preserved(report)));
            checks.push(Box::new(|| check_height_speed(report)));
            checks.push(Box::new(|| check_displacement_sandwich(report)));
            checks.push(Box::new(move || check_barrier_enclosure(report, barrier_b)));
            checks.push(Box::new(|| ratio_pde_from_report(report)));
        }
        Some(Family::Sausage(_)) => {
            checks.push(Box::new(|| check_speed_lower(report)));
            checks.push(Box::new(|| check_speed_monotone(report)));
            checks.push(Box::new(|| check_tip_speed(report)));
            checks.push(Box::new(|| check_curvature_upper(report)));
        }
        None => {}
    }
    let mut results: Vec<CheckResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = checks.iter().map(|c| scope.spawn(c)).collect();
        handles.into_iter().map(|h| h.join().expect("check panicked")).collect()
    });
    sort_results(&mut results);
    results
}

/// The ratio equation on the first pair of snapshots closer than `dpsi^2`.
fn ratio_pde_from_report(report: &FlowReport) -> CheckResult {
    let d = crate::convex::cell_width(report.n);
    let pair = (1..report.snapshots.len()).find(|&k| {
        let dt = report.rows[k].t - report.rows[k - 1].t;
        dt > 0.0 && dt <= d * d
    });
    match pair {
        Some(k) => check_ratio_pde_residual(
            &report.snapshots[k - 1],
            report.rows[k - 1].t,
            &report.snapshots[k],
            report.rows[k].t,
        )
        .unwrap_or_else(|e| CheckResult::not_applicable("ratio_pde_residual", e.to_string())),
        None => CheckResult::not_applicable("ratio_pde_residual", "no snapshot pair closer than dpsi^2"),
    }
}
