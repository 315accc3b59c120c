use serde::{Deserialize, Serialize};

use super::profile::{solve_translator, TranslatorProfile};
use crate::convex::{cell_angle, Axis, SupportProfile};
use crate::error::{GcfError, Result};
use crate::flow::{evolve, FlowParams, FlowReport, HaltReason};

/// Default resolution of the translator behind a glued sausage.
pub const GLUED_TRANSLATOR_GRID: usize = 4096;
const SLOPE_SUBSTEPS: usize = 16;

/// Two opposite translators joined by the band `{r = r_alpha, |x3| <= -t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedSausage {
    pub alpha: f64,
    pub t: f64,
    pub r_alpha: f64,
    pub mass: f64,
    pub profile: SupportProfile,
}

/// Point `(r, u)` of the translator where `u' = slope`.
///
/// Integrates `dr/dp`, `du/dp` from the nearest resolved node below `slope`.
pub fn translator_point_at_slope(tr: &TranslatorProfile, slope: f64) -> Result<(f64, f64)> {
    let last = *tr.uprime.last().expect("profile has nodes");
    if slope > last {
        return Err(GcfError::InsufficientResolution(format!("slope {slope} beyond resolved {last}")));
    }
    if slope <= tr.uprime[0] {
        return Ok((slope, 0.5 * slope * slope));
    }
    let m = tr.uprime.partition_point(|&v| v <= slope) - 1;
    let g = 2.0 - 0.5 / tr.alpha;
    let f = |p: f64, y: [f64; 2]| {
        let dr = p / (y[0] * (1.0 + p * p).powf(g));
        [dr, p * dr]
    };
    let (mut p, mut y) = (tr.uprime[m], [tr.r[m], tr.u[m]]);
    let h = (slope - p) / SLOPE_SUBSTEPS as f64;
    for _ in 0..SLOPE_SUBSTEPS {
        let k1 = f(p, y);
        let k2 = f(p + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f(p + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f(p + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for d in 0..2 {
            y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        p += h;
    }
    Ok((y[0], y[1]))
}

/// Glued sausage at time `t <= 0` built from a solved translator.
pub fn glued_sausage_from(tr: &TranslatorProfile, t: f64, n: usize) -> Result<GluedSausage> {
    if !(tr.alpha > 1.0) {
        return Err(GcfError::BadAlpha { alpha: tr.alpha, range: "(1, inf)" });
    }
    if !(t <= 0.0) {
        return Err(GcfError::BadTime(t));
    }
    let mass = tr.m().ok_or_else(|| GcfError::InsufficientResolution("translator mass not resolved".into()))?;
    let values = (0..n)
        .map(|k| {
            let psi = cell_angle(k, n);
            let (r, u) = translator_point_at_slope(tr, psi.tan())?;
            Ok(r * psi.sin() + (mass - t - u) * psi.cos())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GluedSausage { alpha: tr.alpha, t, r_alpha: tr.r_alpha, mass, profile: SupportProfile::new(Axis::E3, values)? })
}

pub fn glued_sausage(alpha: f64, t: f64, n: usize) -> Result<GluedSausage> {
    if !(alpha > 1.0) {
        return Err(GcfError::BadAlpha { alpha, range: "(1, inf)" });
    }
    glued_sausage_from(&solve_translator(alpha, GLUED_TRANSLATOR_GRID)?, t, n)
}

/// Outcome of evolving a glued sausage to extinction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluedEvolution {
    pub alpha: f64,
    pub mass: f64,
    pub r_alpha: f64,
    pub extinction_time: f64,
    /// `M - T`.
    pub mass_margin: f64,
    /// Largest `h` among rows with `t > 0`.
    pub max_h_after_zero: Option<f64>,
    /// `l / h` at the last row.
    pub final_sphericity: f64,
    pub report: FlowReport,
}

impl GluedEvolution {
    pub fn extinct_before_mass(&self) -> bool {
        self.report.halt == HaltReason::Inradius && self.mass_margin > 0.0
    }

    pub fn inside_cylinder(&self) -> bool {
        self.max_h_after_zero.is_none_or(|h| h < self.r_alpha)
    }
}

/// Flows `glued_sausage(alpha, -1)` forward until the inradius limit.
///
/// `params.t_start` is overridden to `-1`; `params.t_end` should lie beyond
/// the expected extinction time.
pub fn glued_sausage_evolution_check(alpha: f64, n: usize, params: &FlowParams) -> Result<GluedEvolution> {
    let body = glued_sausage(alpha, -1.0, n)?;
    let params = FlowParams { alpha, t_start: -1.0, ..*params };
    let report = evolve(body.profile, &params)?;
    let last = report.last();
    let max_h_after_zero = report
        .rows
        .iter()
        .filter(|r| r.t > 0.0)
        .map(|r| r.h)
        .fold(None, |m: Option<f64>, h| Some(m.map_or(h, |m| m.max(h))));
    Ok(GluedEvolution {
        alpha,
        mass: body.mass,
        r_alpha: body.r_alpha,
        extinction_time: last.t,
        mass_margin: body.mass - last.t,
        max_h_after_zero,
        final_sphericity: last.l / last.h,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::displacements;
    use crate::translators::r_alpha;

    #[test]
    fn slope_inversion_matches_first_integral() {
        // r(p) = r_alpha (1 - (1 + p^2)^(-(2 alpha - 1) / (2 alpha)))^(1/2)
        let alpha = 2.0;
        let tr = solve_translator(alpha, 1024).unwrap();
        for p in [0.01, 0.3, 1.0, 7.0, 300.0] {
            let (r, _) = translator_point_at_slope(&tr, p).unwrap();
            let exact = r_alpha(alpha) * (1.0 - (1.0f64 + p * p).powf(-(2.0 * alpha - 1.0) / (2.0 * alpha))).sqrt();
            assert!((r - exact).abs() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn displacements_at_two_times() {
        let tr = solve_translator(2.0, 1024).unwrap();
        let m = tr.m().unwrap();
        for t in [0.0, -2.0] {
            let g = glued_sausage_from(&tr, t, 512).unwrap();
            let d = displacements(&g.profile);
            assert!((d.l - (m - t)).abs() < 1e-3, "t = {t}");
            assert!((d.h - tr.r_alpha).abs() < 2e-3, "t = {t}: {}", d.h);
        }
    }

    #[test]
    fn requires_flat_sides() {
        assert!(matches!(glued_sausage(1.0, -1.0, 64), Err(GcfError::BadAlpha { .. })));
        assert!(matches!(glued_sausage(2.0, 1.0, 64), Err(GcfError::BadTime(_))));
    }
}
