#![allow(clippy::needless_range_loop)]
use serde::{Deserialize, Serialize};

use super::check::{CheckResult, Location, Worst};
use crate::convex::{meridian_from, CurvatureField, SupportProfile, DEFAULT_SLOPE_CAP};
use crate::error::{GcfError, Result};
use crate::flow::FlowReport;

/// Smallest radius of the graph region used by the residual check.
pub const MIN_GRAPH_RADIUS: f64 = 0.1;

/// Constant in the acceptance bound `residual <= C (dx + dt)` of the ratio
/// equation check.
pub const RATIO_PDE_CONSTANT: f64 = 1.0;

/// `lambda1 / lambda2` per cell together with the contact points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioField {
    pub psi: Vec<f64>,
    pub axial: Vec<f64>,
    pub radial: Vec<f64>,
    pub ratio: Vec<f64>,
}

impl RatioField {
    pub fn from_profile(profile: &SupportProfile) -> Self {
        let field = CurvatureField::unchecked(profile);
        let m = meridian_from(profile, &field);
        RatioField { psi: m.psi, axial: m.axial, radial: m.radial, ratio: field.ratio() }
    }

    /// Smallest ratio and the angle where it occurs.
    pub fn min(&self) -> (f64, f64) {
        self.ratio.iter().zip(&self.psi).fold((f64::INFINITY, f64::NAN), |acc, (&r, &p)| {
            if r < acc.0 || r.is_nan() {
                (r, p)
            } else {
                acc
            }
        })
    }

    /// Largest difference between this field and `-u u_xx / (1 + u_x^2)` from
    /// the graph view, over graph points with `u >= 0.1` and `|u_x| <= slope_cap`.
    pub fn graph_gap(&self, profile: &SupportProfile, slope_cap: f64) -> f64 {
        let field = CurvatureField::unchecked(profile);
        let view = meridian_from(profile, &field).graph_view(slope_cap, profile.len());
        let graph_ratio = view.ratio();
        let m = view.x.len();
        let mut worst = 0.0f64;
        // The far end of the view uses one-sided differences; skip it.
        for i in 0..m.saturating_sub(2) {
            if view.u[i] < MIN_GRAPH_RADIUS || view.ux[i].abs() > slope_cap {
                continue;
            }
            if let Some(r) = self.at_axial(view.x[i]) {
                worst = worst.max((r - graph_ratio[i]).abs());
            }
        }
        worst
    }

    /// Linear interpolation in the axial coordinate.
    fn at_axial(&self, x: f64) -> Option<f64> {
        // The axial coordinate decreases with the cell index.
        let k = self.axial.iter().position(|&a| a <= x)?;
        if k == 0 {
            return None;
        }
        let (x0, x1) = (self.axial[k - 1], self.axial[k]);
        let w = (x0 - x) / (x0 - x1);
        Some(self.ratio[k - 1] * (1.0 - w) + self.ratio[k] * w)
    }
}

/// Tolerance of the ratio check on an `n`-cell grid, `1e-3 + 10 dpsi^2`.
pub fn ratio_tolerance(n: usize) -> f64 {
    let d = crate::convex::cell_width(n);
    1e-3 + 10.0 * d * d
}

/// `min (R - 1)` over one profile.
pub fn check_ratio_profile(profile: &SupportProfile, t: f64) -> CheckResult {
    let (r, psi) = RatioField::from_profile(profile).min();
    CheckResult::new("ratio_preserved", r - 1.0, Location::at_t_psi(t, psi), ratio_tolerance(profile.len()))
}

/// `lambda1 >= lambda2` at every snapshot (at every row when the report
/// carries no snapshots).
pub fn check_ratio_preserved(report: &FlowReport) -> CheckResult {
    let tol = ratio_tolerance(report.n);
    let mut worst = Worst::new();
    if report.snapshots.is_empty() {
        for row in &report.rows {
            worst.update(row.min_ratio - 1.0, Location::at_t(row.t));
        }
    } else {
        for (row, snap) in report.rows.iter().zip(&report.snapshots) {
            let (r, psi) = RatioField::from_profile(snap).min();
            worst.update(r - 1.0, Location::at_t_psi(row.t, psi));
        }
    }
    worst.finish("ratio_preserved", tol)
}

/// Mismatch of the evolution equation of `R` in the graph region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeResidual {
    /// Largest `|R_t - rhs|`, divided by `scale`.
    pub residual: f64,
    pub worst_x: f64,
    /// Largest magnitude of `R_t` or any right-hand term in the region.
    pub scale: f64,
    /// Largest axial spacing between neighbouring cells in the region.
    pub dx: f64,
    pub dt: f64,
    pub cells: usize,
}

struct Snapshot {
    ratio: Vec<f64>,
    axial: Vec<f64>,
    radial: Vec<f64>,
    a: Vec<f64>,
}

impl Snapshot {
    fn new(p: &SupportProfile) -> Self {
        let field = CurvatureField::unchecked(p);
        let m = meridian_from(p, &field);
        Snapshot { ratio: field.ratio(), axial: m.axial, radial: m.radial, a: field.a }
    }

    /// `(R_x, R_xx)` at cell `k`, differencing over `w` cells on each side.
    fn x_derivatives(&self, k: usize, w: usize, d: f64, sin: &[f64]) -> (f64, f64) {
        let h = 2.0 * w as f64 * d;
        let rx = |j: usize| (self.ratio[j + w] - self.ratio[j - w]) / h / (-self.a[j] * sin[j]);
        let xpsi = -self.a[k] * sin[k];
        (rx(k), (rx(k + w) - rx(k - w)) / h / xpsi)
    }

    /// The three right-hand terms at cell `k`.
    fn rhs_terms(&self, k: usize, w: usize, d: f64, sin: &[f64], cos: &[f64]) -> [f64; 3] {
        let (rx, rxx) = self.x_derivatives(k, w, d, sin);
        let r = self.ratio[k];
        let u = self.radial[k];
        let ux = -cos[k] / sin[k];
        let inv_q3 = sin[k].powi(3);
        [
            rxx * inv_q3 / u,
            ux * (5.0 * r - 4.0) * rx * inv_q3 / (u * u),
            r * (1.0 - r) * inv_q3 / (u * u * u) * (r + 2.0 * ux * ux * (3.0 - r)),
        ]
    }
}

/// Residual of the ratio equation between two nearby snapshots of a body
/// about `e1`.
///
/// The right side is averaged over both snapshots; `R_t` at fixed `x` is the
/// forward difference at fixed normal angle corrected by the motion of the
/// contact point, `R_t - R_x x_t`.
pub fn ratio_pde_residual(before: &SupportProfile, t0: f64, after: &SupportProfile, t1: f64) -> Result<PdeResidual> {
    ratio_pde_residual_with(before, t0, after, t1, 1)
}

pub fn ratio_pde_residual_with(
    before: &SupportProfile,
    t0: f64,
    after: &SupportProfile,
    t1: f64,
    w: usize,
) -> Result<PdeResidual> {
    crate::convex::check_same_grid(before, after)?;
    if !(t1 > t0) {
        return Err(GcfError::BadParameter { name: "t1", reason: format!("must exceed t0 = {t0}") });
    }
    let n = before.len();
    let d = before.dpsi();
    let dt = t1 - t0;
    let angles: Vec<f64> = before.angles().collect();
    let sin: Vec<f64> = angles.iter().map(|a| a.sin()).collect();
    let cos: Vec<f64> = angles.iter().map(|a| a.cos()).collect();
    let s0 = Snapshot::new(before);
    let s1 = Snapshot::new(after);
    let psi_min = (1.0 / DEFAULT_SLOPE_CAP).atan();

    let mut out = PdeResidual { residual: 0.0, worst_x: f64::NAN, scale: 0.0, dx: 0.0, dt, cells: 0 };
    let mut raw = Vec::new();
    for k in 2 * w..n - 2 * w {
        if angles[k] < psi_min || s0.radial[k].min(s1.radial[k]) < MIN_GRAPH_RADIUS {
            continue;
        }
        let rhs0 = s0.rhs_terms(k, w, d, &sin, &cos);
        let rhs1 = s1.rhs_terms(k, w, d, &sin, &cos);
        let terms: Vec<f64> = rhs0.iter().zip(&rhs1).map(|(a, b)| 0.5 * (a + b)).collect();
        let rx = 0.5 * (s0.x_derivatives(k, w, d, &sin).0 + s1.x_derivatives(k, w, d, &sin).0);
        let rt = (s1.ratio[k] - s0.ratio[k]) / dt - rx * (s1.axial[k] - s0.axial[k]) / dt;
        let rhs: f64 = terms.iter().sum();
        out.scale = terms.iter().fold(out.scale.max(rt.abs()), |m, v| m.max(v.abs()));
        out.dx = out.dx.max((s0.axial[k - 1] - s0.axial[k]).abs());
        out.cells += 1;
        raw.push((rt - rhs, s0.axial[k]));
    }
    if out.cells == 0 {
        return Err(GcfError::InsufficientResolution("no cells in the graph region".into()));
    }
    let scale = if out.scale > 0.0 { out.scale } else { 1.0 };
    for (r, x) in raw {
        let res = r.abs() / scale;
        if !(res <= out.residual) {
            out.residual = res;
            out.worst_x = x;
        }
    }
    Ok(out)
}

/// Passes iff the normalized residual is at most `C (dx + dt)`.
pub fn check_ratio_pde_residual(
    before: &SupportProfile,
    t0: f64,
    after: &SupportProfile,
    t1: f64,
) -> Result<CheckResult> {
    let r = ratio_pde_residual(before, t0, after, t1)?;
    let bound = RATIO_PDE_CONSTANT * (r.dx + r.dt);
    Ok(CheckResult::new("ratio_pde_residual", bound - r.residual, Location::at_t_x(t0, r.worst_x), 0.0)
        .with_note(format!("residual {:.3e} over {} cells", r.residual, r.cells)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::Axis;

    fn spheroid(a: f64, b: f64, n: usize) -> SupportProfile {
        SupportProfile::from_fn(Axis::E1, n, |p| (a * a * p.cos().powi(2) + b * b * p.sin().powi(2)).sqrt()).unwrap()
    }

    #[test]
    fn sphere_ratio_is_one() {
        let p = SupportProfile::from_fn(Axis::E1, 256, |_| 1.3).unwrap();
        let f = RatioField::from_profile(&p);
        assert!(f.ratio.iter().all(|&r| r == 1.0));
        assert!(check_ratio_profile(&p, 0.0).pass);
    }

    #[test]
    fn spheroid_ratio_matches_closed_form() {
        // Semi-axis a along e1, b across: R = q / a^2 with q = a^2 cos^2 + b^2 sin^2.
        let (a, b) = (2.0, 1.0);
        let p = spheroid(a, b, 512);
        let f = RatioField::from_profile(&p);
        for (k, &psi) in f.psi.iter().enumerate() {
            let q = a * a * psi.cos().powi(2) + b * b * psi.sin().powi(2);
            let exact = q / (a * a);
            assert!((f.ratio[k] - exact).abs() < 1e-4, "{k}: {} vs {exact}", f.ratio[k]);
        }
    }

    #[test]
    fn elongated_spheroid_fails_the_ratio_check() {
        let r = check_ratio_profile(&spheroid(2.0, 1.0, 512), 0.0);
        assert!(!r.pass);
        assert!((r.margin + 0.75).abs() < 1e-3);
        assert!(r.location.psi.unwrap() > 1.5);
    }

    #[test]
    fn graph_and_support_ratios_agree() {
        let p = spheroid(1.0, 2.0, 1024);
        let gap = RatioField::from_profile(&p).graph_gap(&p, DEFAULT_SLOPE_CAP);
        assert!(gap < 1e-3, "gap {gap}");
    }

    #[test]
    fn sphere_residual_vanishes() {
        let a = SupportProfile::from_fn(Axis::E1, 256, |_| 1.0).unwrap();
        let b = SupportProfile::from_fn(Axis::E1, 256, |_| 0.999).unwrap();
        let r = ratio_pde_residual(&a, 0.0, &b, 1e-3).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!(check_ratio_pde_residual(&a, 0.0, &b, 1e-3).unwrap().pass);
    }
}
