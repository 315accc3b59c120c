use super::check::{CheckResult, Location, Worst};
use crate::convex::{cell_width, extrapolate_to_edge, meridian_from, touching_circle_check, CurvatureField};
use crate::flow::FlowReport;

/// Tolerance on the tip speed `-dl/dt >= 1`.
pub const TIP_SPEED_TOL: f64 = 1e-3;
/// Relative tolerance of the equatorial curvature bound.
pub const CURVATURE_UPPER_TOL: f64 = 0.1;

/// `1e-3 + 10 dpsi`, shared by both speed checks.
pub fn speed_tolerance(n: usize) -> f64 {
    1e-3 + 10.0 * cell_width(n)
}

fn speeds(report: &FlowReport) -> impl Iterator<Item = (f64, Vec<f64>, Vec<f64>)> + '_ {
    let alpha = report.params.alpha;
    report.rows.iter().zip(&report.snapshots).map(move |(row, snap)| {
        let f = CurvatureField::unchecked(snap).speed(alpha);
        (row.t, snap.angles().collect(), f)
    })
}

/// `K^alpha >= |cos psi|` at every snapshot.
pub fn check_speed_lower(report: &FlowReport) -> CheckResult {
    if report.snapshots.is_empty() {
        return CheckResult::not_applicable("speed_lower", "report carries no snapshots");
    }
    let mut worst = Worst::new();
    for (t, psi, f) in speeds(report) {
        for (p, v) in psi.iter().zip(&f) {
            worst.update(v - p.cos().abs(), Location::at_t_psi(t, *p));
        }
    }
    worst.finish("speed_lower", speed_tolerance(report.n))
}

/// `K^alpha` is non-increasing in the angle from the axis.
pub fn check_speed_monotone(report: &FlowReport) -> CheckResult {
    if report.snapshots.is_empty() {
        return CheckResult::not_applicable("speed_monotone", "report carries no snapshots");
    }
    let mut worst = Worst::new();
    for (t, psi, f) in speeds(report) {
        for k in 1..f.len() {
            worst.update(f[k - 1] - f[k], Location::at_t_psi(t, 0.5 * (psi[k - 1] + psi[k])));
        }
    }
    worst.finish("speed_monotone", speed_tolerance(report.n))
}

/// The tips move inward at least at unit speed, `-dl/dt >= 1`.
pub fn check_tip_speed(report: &FlowReport) -> CheckResult {
    let mut worst = Worst::new();
    for w in report.rows.windows(2).filter(|w| w[1].t > w[0].t) {
        let rate = -(w[1].l - w[0].l) / (w[1].t - w[0].t);
        worst.update(rate - 1.0, Location::at_t(w[0].t));
    }
    worst.finish("tip_speed", TIP_SPEED_TOL)
}

/// Gauss curvature at the equator, extrapolated from the three nearest cells.
pub fn equator_gauss_curvature(field: &CurvatureField) -> f64 {
    let n = field.k.len();
    extrapolate_to_edge(field.k[n - 1], field.k[n - 2], field.k[n - 3])
}

/// `K(pi/2) <= 16 / l^2` at snapshots with `l >= 2h`, together with the
/// touching-circle bound `lambda1 <= 8h / l^2` on the slice `|z| <= l/2`.
pub fn check_curvature_upper(report: &FlowReport) -> CheckResult {
    const NAME: &str = "curvature_upper";
    let mut worst = Worst::new();
    let mut qualifying = 0;
    let mut skipped = 0;
    for (row, snap) in report.rows.iter().zip(&report.snapshots) {
        if row.l < 2.0 * row.h {
            skipped += 1;
            continue;
        }
        qualifying += 1;
        let field = CurvatureField::unchecked(snap);
        let at = Location::at_t(row.t);
        worst.update(1.0 - equator_gauss_curvature(&field) * row.l * row.l / 16.0, at);
        let curve = meridian_from(snap, &field).slice_curve();
        match touching_circle_check(&curve, 0.5 * row.l, 0.0) {
            Ok(tc) => worst.update(1.0 - tc.curvature * row.l * row.l / (8.0 * row.h), at),
            Err(_) => worst.update(f64::NAN, at),
        }
    }
    if qualifying == 0 {
        return CheckResult::not_applicable(NAME, format!("no snapshot with l >= 2h ({skipped} skipped)"));
    }
    worst.finish(NAME, CURVATURE_UPPER_TOL).with_note(format!("{qualifying} qualifying, {skipped} skipped"))
}
