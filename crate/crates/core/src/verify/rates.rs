use std::f64::consts::PI;

use super::check::{CheckResult, Location, Worst};
use crate::flow::{FlowReport, ReportRow};
use crate::quad;
use crate::translators::r_alpha_sq;

/// Relative tolerance of the height-speed inequality.
pub const HEIGHT_SPEED_TOL: f64 = 0.05;
/// Relative tolerance of the volume law and the volume-rate bound.
pub const VOLUME_RATE_TOL_EXACT: f64 = 0.01;
pub const VOLUME_RATE_TOL_BOUND: f64 = 0.02;
/// Accuracy demanded of the `r_alpha^2` quadrature.
pub const R_ALPHA_QUADRATURE_TOL: f64 = 1e-8;

fn intervals(report: &FlowReport) -> impl Iterator<Item = (&ReportRow, &ReportRow)> {
    report.rows.windows(2).map(|w| (&w[0], &w[1])).filter(|(a, b)| b.t > a.t)
}

/// `-dh/dt <= (2h / (l^2 + h^2))^2` per interval, with the right side taken
/// at the earlier row.
pub fn check_height_speed(report: &FlowReport) -> CheckResult {
    let mut worst = Worst::new();
    for (a, b) in intervals(report) {
        let lhs = -(b.h - a.h) / (b.t - a.t);
        let rhs = (2.0 * a.h / (a.l * a.l + a.h * a.h)).powi(2);
        worst.update(1.0 - lhs / rhs, Location::at_t(a.t));
    }
    worst.finish("height_speed", HEIGHT_SPEED_TOL)
}

/// `2 int_0^(pi/2) sin(phi) cos(phi)^(1 - 1/alpha) dphi`, which equals `r_alpha^2`.
///
/// With `theta = pi/2 - phi = s^q` and `q = alpha / (2 alpha - 1)` the integrand becomes
/// `q cos(theta) (sin(theta) / theta)^(1 - 1/alpha)`, smooth on the whole range.
pub fn r_alpha_sq_quadrature(alpha: f64) -> f64 {
    let e = 1.0 - 1.0 / alpha;
    let q = alpha / (2.0 * alpha - 1.0);
    let f = |s: f64| {
        let theta = s.powf(q);
        let sinc = if theta == 0.0 { 1.0 } else { theta.sin() / theta };
        q * theta.cos() * sinc.powf(e)
    };
    2.0 * quad::integrate(f, 0.0, (PI / 2.0).powf(1.0 / q), 1e-12)
}

/// Volume law for `alpha = 1`, `dV/dt = -4 pi`; for `alpha < 1` the bound
/// `-dV/dt <= 2 pi r_alpha^2`.
pub fn check_volume_rate(report: &FlowReport) -> CheckResult {
    let alpha = report.params.alpha;
    let mut worst = Worst::new();
    if alpha == 1.0 {
        for (a, b) in intervals(report) {
            let rate = (b.volume - a.volume) / (b.t - a.t);
            worst.update(-(rate / (-4.0 * PI) - 1.0).abs(), Location::at_t(a.t));
        }
        return worst.finish("volume_rate", VOLUME_RATE_TOL_EXACT);
    }
    if alpha >= 1.0 {
        return CheckResult::not_applicable("volume_rate", format!("no volume statement for alpha = {alpha}"));
    }
    let bound = 2.0 * PI * r_alpha_sq(alpha);
    for (a, b) in intervals(report) {
        let rate = -(b.volume - a.volume) / (b.t - a.t);
        worst.update(1.0 - rate / bound, Location::at_t(a.t));
    }
    let q = r_alpha_sq_quadrature(alpha);
    let gap = (q - r_alpha_sq(alpha)).abs();
    let mut result = worst
        .finish("volume_rate", VOLUME_RATE_TOL_BOUND)
        .with_note(format!("r_alpha^2 quadrature {q:.12} (error {gap:.1e})"));
    if !(gap <= R_ALPHA_QUADRATURE_TOL) {
        result.pass = false;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_alpha_quadrature() {
        for alpha in [0.6, 0.75, 0.9, 1.0, 2.0] {
            let q = r_alpha_sq_quadrature(alpha);
            assert!((q - r_alpha_sq(alpha)).abs() < R_ALPHA_QUADRATURE_TOL, "{alpha}: {q}");
        }
        assert!((r_alpha_sq_quadrature(0.75) - 3.0).abs() < 1e-8);
    }
}
