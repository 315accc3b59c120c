use serde::{Deserialize, Serialize};

use super::curvature::{curvatures_from_support, CurvatureField};
use super::profile::{displacements, Axis, Displacements, SupportProfile};
use crate::error::{GcfError, Result};

/// Default bound on `|u_x|` for the graph view.
pub const DEFAULT_SLOPE_CAP: f64 = 10.0;

/// Contact points of a sampled body of revolution, one per normal angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeridianProfile {
    pub axis: Axis,
    pub psi: Vec<f64>,
    /// Coordinate along the rotation axis.
    pub axial: Vec<f64>,
    /// Distance from the rotation axis.
    pub radial: Vec<f64>,
    /// Curvature of the meridian curve, `lambda1 = 1/A`.
    pub curvature: Vec<f64>,
    pub extents: Displacements,
}

impl MeridianProfile {
    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// The planar slice through the rotation axis, in the coordinates where
    /// the first component carries `h` and the second carries `l`.
    pub fn slice_curve(&self) -> PlanarCurve {
        let points = match self.axis {
            Axis::E1 => self.axial.iter().zip(&self.radial).map(|(&x, &y)| [x, y]).collect(),
            Axis::E3 => self.radial.iter().zip(&self.axial).map(|(&x, &y)| [x, y]).collect(),
        };
        PlanarCurve { points, curvature: self.curvature.clone(), h: self.extents.h, l: self.extents.l }
    }

    /// Radius as a function of the axial coordinate, resampled on a uniform
    /// grid over the part of the meridian where `|u_x| <= slope_cap`.
    ///
    /// Along the meridian `u_x = -cot(psi)` holds exactly, so the resampling
    /// uses cubic Hermite interpolation with those slopes.
    pub fn graph_view(&self, slope_cap: f64, points: usize) -> GraphView {
        let psi_min = (1.0 / slope_cap).atan();
        let first = self.psi.iter().position(|&p| p >= psi_min).unwrap_or(self.len() - 1);
        // Axial coordinate decreases with psi; nodes reversed so x increases.
        let nodes: Vec<(f64, f64, f64)> =
            (first..self.len()).rev().map(|k| (self.axial[k], self.radial[k], -1.0 / self.psi[k].tan())).collect();
        let x_max = nodes.last().map(|n| n.0).unwrap_or(0.0);
        let m = points.max(8);
        let dx = x_max / (m - 1) as f64;
        let x: Vec<f64> = (0..m).map(|i| i as f64 * dx).collect();
        let u: Vec<f64> = x.iter().map(|&xi| hermite_eval(&nodes, xi)).collect();
        // u is even in x, so reflect at x = 0; one-sided at the far end.
        let mut ux = vec![0.0; m];
        let mut uxx = vec![0.0; m];
        for i in 0..m {
            let (left, centre, right) = match i {
                0 => (u[1], u[0], u[1]),
                i if i + 1 == m => {
                    ux[i] = (3.0 * u[i] - 4.0 * u[i - 1] + u[i - 2]) / (2.0 * dx);
                    uxx[i] = (2.0 * u[i] - 5.0 * u[i - 1] + 4.0 * u[i - 2] - u[i - 3]) / (dx * dx);
                    continue;
                }
                i => (u[i - 1], u[i], u[i + 1]),
            };
            ux[i] = (right - left) / (2.0 * dx);
            uxx[i] = (right - 2.0 * centre + left) / (dx * dx);
        }
        let q = ux.iter().map(|d| (1.0 + d * d).sqrt()).collect();
        GraphView { x, u, ux, uxx, q }
    }
}

fn hermite_eval(nodes: &[(f64, f64, f64)], x: f64) -> f64 {
    if x <= nodes[0].0 {
        // Between the equator node and x = 0: extend with the even reflection.
        let (x0, u0, d0) = nodes[0];
        let (x1, u1, d1) = (-x0, u0, -d0);
        return hermite(x1, u1, d1, x0, u0, d0, x);
    }
    let idx = nodes.partition_point(|n| n.0 <= x).clamp(1, nodes.len() - 1);
    let (x0, u0, d0) = nodes[idx - 1];
    let (x1, u1, d1) = nodes[idx];
    hermite(x0, u0, d0, x1, u1, d1, x)
}

#[allow(clippy::too_many_arguments)]
fn hermite(x0: f64, u0: f64, d0: f64, x1: f64, u1: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * u0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * u1 + (s3 - s2) * h * d1
}

/// Radius `u` over a uniform axial grid with finite-difference derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphView {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub ux: Vec<f64>,
    pub uxx: Vec<f64>,
    pub q: Vec<f64>,
}

impl GraphView {
    /// `R = -u u_xx / (1 + u_x^2)` at each grid point.
    pub fn ratio(&self) -> Vec<f64> {
        (0..self.x.len()).map(|i| -self.u[i] * self.uxx[i] / (self.q[i] * self.q[i])).collect()
    }
}

/// Contact points `(d, r)` recovered from the support function:
/// `d = S cos - S' sin`, `r = B sin`.
pub fn reconstruct_meridian(profile: &SupportProfile) -> Result<MeridianProfile> {
    let field = curvatures_from_support(profile)?;
    Ok(meridian_from(profile, &field))
}

pub(crate) fn meridian_from(profile: &SupportProfile, field: &CurvatureField) -> MeridianProfile {
    let n = profile.len();
    let s = profile.values();
    let d = profile.dpsi();
    let mut out = MeridianProfile {
        axis: profile.axis(),
        psi: Vec::with_capacity(n),
        axial: Vec::with_capacity(n),
        radial: Vec::with_capacity(n),
        curvature: field.lambda1.clone(),
        extents: displacements(profile),
    };
    for k in 0..n {
        let psi = profile.angle(k);
        let left = if k == 0 { s[0] } else { s[k - 1] };
        let right = if k + 1 == n { s[k] } else { s[k + 1] };
        let ds = (right - left) / (2.0 * d);
        out.psi.push(psi);
        out.axial.push(s[k] * psi.cos() - ds * psi.sin());
        out.radial.push(field.b[k] * psi.sin());
    }
    out
}

/// Sampled closed convex curve with both reflection symmetries, stored on one
/// quadrant. The first coordinate reaches `h`, the second reaches `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarCurve {
    pub points: Vec<[f64; 2]>,
    pub curvature: Vec<f64>,
    pub h: f64,
    pub l: f64,
}

/// Outcome of the touching-circle comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TouchingCircleResult {
    pub witness: [f64; 2],
    pub curvature: f64,
    /// `2h / (z^2 + h^2)`, the curvature of the circle through `h e1` and `+-z e2`.
    pub bound: f64,
    pub circle_radius: f64,
    pub holds: bool,
}

/// Finds the least-curved sample with `|second coordinate| <= z` and compares
/// its curvature with the touching-circle bound.
pub fn touching_circle_check(curve: &PlanarCurve, z: f64, tol: f64) -> Result<TouchingCircleResult> {
    let (h, l) = (curve.h, curve.l);
    if !(z >= h && z <= l) {
        return Err(GcfError::BadRange { z, h, l });
    }
    let (idx, &kappa) = curve
        .points
        .iter()
        .zip(&curve.curvature)
        .enumerate()
        .filter(|(_, (p, _))| p[1].abs() <= z)
        .map(|(i, (_, k))| (i, k))
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| GcfError::InsufficientResolution(format!("no samples within |y| <= {z}")))?;
    let bound = 2.0 * h / (z * z + h * h);
    Ok(TouchingCircleResult {
        witness: curve.points[idx],
        curvature: kappa,
        bound,
        circle_radius: 1.0 / bound,
        holds: kappa <= bound * (1.0 + tol),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;

    #[test]
    fn sphere_meridian_is_a_circle() {
        let rho = 1.7;
        let p = SupportProfile::from_fn(Axis::E1, 128, |_| rho).unwrap();
        let m = reconstruct_meridian(&p).unwrap();
        for k in 0..m.len() {
            assert!((m.radial[k] - rho * m.psi[k].sin()).abs() < 1e-14);
            assert!((m.axial[k] - rho * m.psi[k].cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn equator_contact_radius_matches_support() {
        // B sin(psi) at the equator equals S(pi/2).
        let p = SupportProfile::from_fn(Axis::E3, 512, |a| (4.0 * a.cos().powi(2) + a.sin().powi(2)).sqrt()).unwrap();
        let f = curvatures_from_support(&p).unwrap();
        let n = p.len();
        let contact: Vec<f64> = (n - 3..n).rev().map(|k| f.b[k] * p.angle(k).sin()).collect();
        let extrap = super::super::profile::extrapolate_to_edge(contact[0], contact[1], contact[2]);
        assert!((extrap - p.equator_value()).abs() < 1e-5);
        assert!((extrap - 1.0).abs() < 1e-5);
    }

    #[test]
    fn radius_is_monotone_and_graph_concave() {
        let p = SupportProfile::from_fn(Axis::E1, 256, |a| (a.cos().powi(2) + 9.0 * a.sin().powi(2)).sqrt()).unwrap();
        let m = reconstruct_meridian(&p).unwrap();
        assert!(m.radial.windows(2).all(|w| w[1] >= w[0]));
        let g = m.graph_view(DEFAULT_SLOPE_CAP, 200);
        assert!(g.uxx.iter().all(|&v| v < 0.0));
        // Ellipse x^2 + u^2 / 9 = 1.
        for (x, u) in g.x.iter().zip(&g.u) {
            assert!((u - 3.0 * (1.0 - x * x).sqrt()).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn circle_attains_touching_bound() {
        let rho = 2.0;
        let n = 400;
        let curve = PlanarCurve {
            points: (0..=n)
                .map(|i| {
                    let a = FRAC_PI_2 * i as f64 / n as f64;
                    [rho * a.cos(), rho * a.sin()]
                })
                .collect(),
            curvature: vec![1.0 / rho; n + 1],
            h: rho,
            l: rho,
        };
        let r = touching_circle_check(&curve, rho, 1e-12).unwrap();
        assert!(r.holds);
        assert_eq!(r.bound, 1.0 / rho);
    }

    #[test]
    fn out_of_range_height_is_rejected() {
        let curve = PlanarCurve { points: vec![[1.0, 0.0]], curvature: vec![1.0], h: 1.0, l: 3.0 };
        assert!(matches!(touching_circle_check(&curve, 0.5, 0.0), Err(GcfError::BadRange { .. })));
        assert!(matches!(touching_circle_check(&curve, 3.5, 0.0), Err(GcfError::BadRange { .. })));
    }
}
