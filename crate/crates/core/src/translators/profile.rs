use serde::{Deserialize, Serialize};

use super::dopri::{step_factor, trial};
use crate::convex::io::fmt_f64;
use crate::error::{GcfError, Result};

/// Slope at which the outward integration stops.
pub const BLOWUP_SLOPE: f64 = 1e6;
const TIP_FRACTION: f64 = 1e-4;
const RTOL: f64 = 1e-12;
const ATOL: f64 = 1e-14;
/// Window of `(r_alpha - r) / r_alpha` used for the exponent fit.
const FIT_WINDOW: (f64, f64) = (1e-4, 1e-1);
const MIN_FIT_NODES: usize = 8;
/// Fitted exponents within this of -1 are treated as non-integrable.
pub const DIVERGENCE_MARGIN: f64 = 0.05;

/// `r_alpha^2 = 2 alpha / (2 alpha - 1)`.
pub fn r_alpha_sq(alpha: f64) -> f64 {
    2.0 * alpha / (2.0 * alpha - 1.0)
}

pub fn r_alpha(alpha: f64) -> f64 {
    r_alpha_sq(alpha).sqrt()
}

/// Predicted exponent of `u'` near the boundary, `alpha / (1 - 2 alpha)`.
pub fn flat_side_exponent(alpha: f64) -> f64 {
    alpha / (1.0 - 2.0 * alpha)
}

/// `u''` from the translator equation `(u'' u')^alpha = r^alpha (1 + u'^2)^(2 alpha - 1/2)`.
#[inline]
pub fn translator_rhs(alpha: f64, r: f64, p: f64) -> f64 {
    r * (1.0 + p * p).powf(2.0 - 0.5 / alpha) / p
}

/// Power-law fit `u' ~ C (r_alpha - r)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub c_alpha: f64,
    pub nodes: usize,
}

/// Boundary value `M = lim u` split into resolved part and fitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatSideMass {
    /// `None` when the fitted tail is not integrable.
    pub mass: Option<f64>,
    pub resolved: f64,
    pub tail: Option<f64>,
}

impl FlatSideMass {
    pub fn is_finite(&self) -> bool {
        self.mass.is_some()
    }
}

/// Unit-speed rotationally symmetric translator `x3 = u(|x|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslatorProfile {
    pub alpha: f64,
    pub r_alpha: f64,
    /// Blow-up radius of `u'`, extrapolated from the last nodes.
    pub blowup_radius: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub uprime: Vec<f64>,
    /// Accepted step sizes; node spacing without the rounding of `r`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dr: Vec<f64>,
    #[serde(rename = "exponent")]
    pub fit: Option<ExponentFit>,
    #[serde(rename = "M")]
    pub mass: Option<FlatSideMass>,
}

impl TranslatorProfile {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `u''` at node `m` from the equation.
    pub fn uprime2(&self, m: usize) -> f64 {
        translator_rhs(self.alpha, self.r[m], self.uprime[m])
    }

    /// Finite mass, if the tail is integrable.
    pub fn m(&self) -> Option<f64> {
        self.mass.and_then(|m| m.mass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("translator serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GcfError::Parse(e.to_string()))
    }

    /// Nodes as CSV with header `r,u,uprime`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,u,uprime\n");
        for m in 0..self.len() {
            out.push_str(&format!("{},{},{}\n", fmt_f64(self.r[m]), fmt_f64(self.u[m]), fmt_f64(self.uprime[m])));
        }
        out
    }
}

/// Integrates the translator outward from the tip until `u' > 1e6`.
///
/// `grid` bounds the step by `r_alpha / grid`; the adaptive controller sets it
/// below that wherever the solution demands.
pub fn solve_translator(alpha: f64, grid: usize) -> Result<TranslatorProfile> {
    if !(alpha > 0.5 && alpha.is_finite()) {
        return Err(GcfError::BadAlpha { alpha, range: "(1/2, inf)" });
    }
    if grid < 16 {
        return Err(GcfError::BadParameter { name: "grid", reason: format!("need at least 16, got {grid}") });
    }
    let ra = r_alpha(alpha);
    let f = |r: f64, y: &[f64; 2]| [y[1], translator_rhs(alpha, r, y[1])];
    let r0 = TIP_FRACTION * ra;
    let h_max = ra / grid as f64;
    // Tip series of the first integral: u' = r (1 + b r^2 / 4), b = 2 - 1/(2 alpha).
    let b = 2.0 - 0.5 / alpha;
    let (mut r, mut y) = (r0, [0.5 * r0 * r0 + b * r0.powi(4) / 16.0, r0 * (1.0 + 0.25 * b * r0 * r0)]);
    let mut out = TranslatorProfile {
        alpha,
        r_alpha: ra,
        blowup_radius: f64::NAN,
        r: vec![r],
        u: vec![y[0]],
        uprime: vec![y[1]],
        dr: Vec::new(),
        fit: None,
        mass: None,
    };
    let mut h = r0;
    // Compensation term of the running sum r.
    let mut r_lo = 0.0;
    while y[1] <= BLOWUP_SLOPE {
        if r > ra * (1.0 + 1e-2) || h < 1e-15 * ra {
            return Err(GcfError::NoBlowupDetected { radius: r, expected: ra });
        }
        h = h.min(h_max);
        let t = trial(&f, r + r_lo, &y, h, RTOL, ATOL);
        if t.err <= 1.0 && t.y[1] > y[1] {
            let sum = r + h;
            r_lo += (r - sum) + h;
            r = sum;
            y = t.y;
            out.dr.push(h);
            out.r.push(r + r_lo);
            out.u.push(y[0]);
            out.uprime.push(y[1]);
        }
        h *= step_factor(t.err);
    }
    out.blowup_radius = extrapolate_blowup(&out);
    out.fit = flat_side_exponent_fit(&out).ok();
    if let Some(fit) = out.fit {
        out.mass = Some(mass_from_fit(&out, fit));
    }
    Ok(out)
}

/// Zero of `u'^((1 - 2 alpha) / alpha)`, linear through the last two nodes.
fn extrapolate_blowup(p: &TranslatorProfile) -> f64 {
    let e = (1.0 - 2.0 * p.alpha) / p.alpha;
    let n = p.len();
    let (r1, r2) = (p.r[n - 2], p.r[n - 1]);
    let (w1, w2) = (p.uprime[n - 2].powf(e), p.uprime[n - 1].powf(e));
    r2 - w2 * (r2 - r1) / (w2 - w1)
}

/// Weights of the first derivative at `z` from values at `x` (Fornberg).
pub fn fd_weights(z: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![[0.0f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// Largest `|1 - (u'' u')^alpha / (r^alpha (1 + u'^2)^(2 alpha - 1/2))|` over
/// interior nodes, with `u''` from a five-point difference of the `u'` samples.
pub fn ode_residual(p: &TranslatorProfile) -> f64 {
    let a = p.alpha;
    (2..p.len().saturating_sub(2))
        .map(|m| {
            let offsets: Vec<f64> = if p.dr.len() + 1 == p.len() {
                let (b1, b2) = (p.dr[m - 1], p.dr[m - 2]);
                let (f1, f2) = (p.dr[m], p.dr[m + 1]);
                vec![-(b1 + b2), -b1, 0.0, f1, f1 + f2]
            } else {
                p.r[m - 2..=m + 2].iter().map(|r| r - p.r[m]).collect()
            };
            let w = fd_weights(0.0, &offsets);
            let upp: f64 = w.iter().zip(&p.uprime[m - 2..=m + 2]).map(|(w, v)| w * v).sum();
            let q = 1.0 + p.uprime[m].powi(2);
            let ln_ratio = a * (upp * p.uprime[m]).ln() - a * p.r[m].ln() - (2.0 * a - 0.5) * q.ln();
            ln_ratio.exp_m1().abs()
        })
        .fold(0.0, f64::max)
}

/// Least-squares slope of `ln u'` against `ln(r_alpha - r)` on the last decade
/// before the boundary.
pub fn flat_side_exponent_fit(p: &TranslatorProfile) -> Result<ExponentFit> {
    let ra = p.r_alpha;
    let pts: Vec<(f64, f64)> =
        p.r.iter()
            .zip(&p.uprime)
            .filter_map(|(&r, &v)| {
                let d = (ra - r) / ra;
                (d >= FIT_WINDOW.0 && d <= FIT_WINDOW.1).then(|| ((ra - r).ln(), v.ln()))
            })
            .collect();
    if pts.len() < MIN_FIT_NODES {
        return Err(GcfError::InsufficientResolution(format!(
            "{} nodes in the fit window, need {MIN_FIT_NODES}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(ExponentFit { exponent: slope, c_alpha: (my - slope * mx).exp(), nodes: pts.len() })
}

fn mass_from_fit(p: &TranslatorProfile, fit: ExponentFit) -> FlatSideMass {
    let resolved = *p.u.last().expect("profile has nodes");
    if fit.exponent <= -1.0 + DIVERGENCE_MARGIN {
        return FlatSideMass { mass: None, resolved, tail: None };
    }
    let delta = p.r_alpha - p.r.last().expect("profile has nodes");
    let tail = fit.c_alpha * delta.max(0.0).powf(fit.exponent + 1.0) / (fit.exponent + 1.0);
    FlatSideMass { mass: Some(resolved + tail), resolved, tail: Some(tail) }
}

/// `M` from the last node plus the fitted power-law tail.
pub fn flat_side_mass(p: &TranslatorProfile) -> Result<FlatSideMass> {
    Ok(mass_from_fit(p, flat_side_exponent_fit(p)?))
}
