use serde::{Deserialize, Serialize};

use super::profile::{SupportProfile, MIN_CELLS};
use crate::error::{GcfError, Result};

/// Radii below this fraction of the largest radius count as degenerate.
const DEGENERATE_RADIUS: f64 = 1e-9;

/// Per-cell finite-difference constants of a quadrant grid.
#[derive(Debug, Clone)]
pub struct GridTrig {
    pub n: usize,
    pub dpsi: f64,
    pub sin: Vec<f64>,
    pub cos: Vec<f64>,
    pub cot: Vec<f64>,
    inv_d2: f64,
    inv_2d: f64,
}

impl GridTrig {
    pub fn new(n: usize) -> Self {
        let dpsi = super::profile::cell_width(n);
        let angles: Vec<f64> = (0..n).map(|k| super::profile::cell_angle(k, n)).collect();
        let sin: Vec<f64> = angles.iter().map(|a| a.sin()).collect();
        let cos: Vec<f64> = angles.iter().map(|a| a.cos()).collect();
        let cot = sin.iter().zip(&cos).map(|(s, c)| c / s).collect();
        GridTrig { n, dpsi, sin, cos, cot, inv_d2: 1.0 / (dpsi * dpsi), inv_2d: 0.5 / dpsi }
    }

    /// Radii of curvature `(A, B)` at cell `k`, with ghost cells obtained by
    /// even reflection across both quadrant ends.
    #[inline(always)]
    pub fn radii(&self, s: &[f64], k: usize) -> (f64, f64) {
        let n = s.len();
        let sk = s[k];
        let left = if k == 0 { sk } else { s[k - 1] };
        let right = if k + 1 == n { sk } else { s[k + 1] };
        let a = sk + (right - 2.0 * sk + left) * self.inv_d2;
        let b = sk + self.cot[k] * (right - left) * self.inv_2d;
        (a, b)
    }
}

/// Radii and principal curvatures of a sampled body of revolution.
///
/// `a` is the meridian radius of curvature `S + S''`, `b` the rotational one
/// `S + cot(psi) S'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureField {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub k: Vec<f64>,
}

impl CurvatureField {
    /// Radii without any convexity validation. Degenerate bodies (ridges,
    /// cones) give zero or negative radii here.
    pub fn unchecked(profile: &SupportProfile) -> Self {
        let trig = GridTrig::new(profile.len());
        Self::unchecked_with(profile.values(), &trig)
    }

    pub(crate) fn unchecked_with(s: &[f64], trig: &GridTrig) -> Self {
        let n = s.len();
        let mut field = CurvatureField {
            a: Vec::with_capacity(n),
            b: Vec::with_capacity(n),
            lambda1: Vec::with_capacity(n),
            lambda2: Vec::with_capacity(n),
            k: Vec::with_capacity(n),
        };
        for idx in 0..n {
            let (a, b) = trig.radii(s, idx);
            field.a.push(a);
            field.b.push(b);
            field.lambda1.push(1.0 / a);
            field.lambda2.push(1.0 / b);
            field.k.push(1.0 / (a * b));
        }
        field
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// First cell whose radii are not both positive.
    pub fn first_non_convex(&self) -> Option<usize> {
        let scale = self.a.iter().chain(&self.b).fold(0.0f64, |m, v| m.max(*v));
        let tol = DEGENERATE_RADIUS * scale;
        self.a.iter().zip(&self.b).position(|(&a, &b)| !(a > tol && b > tol))
    }

    /// Curvature ratio `lambda1 / lambda2 = B / A` per cell.
    pub fn ratio(&self) -> Vec<f64> {
        self.a.iter().zip(&self.b).map(|(a, b)| b / a).collect()
    }

    /// Normal speed `K^alpha` per cell.
    pub fn speed(&self, alpha: f64) -> Vec<f64> {
        self.k.iter().map(|k| k.powf(alpha)).collect()
    }
}

/// Radii and curvatures of a convex profile.
pub fn curvatures_from_support(profile: &SupportProfile) -> Result<CurvatureField> {
    if profile.len() < MIN_CELLS {
        return Err(GcfError::TooFewCells { min: MIN_CELLS, got: profile.len() });
    }
    let field = CurvatureField::unchecked(profile);
    match field.first_non_convex() {
        Some(cell) => Err(GcfError::NonConvex { cell, a: field.a[cell], b: field.b[cell] }),
        None => Ok(field),
    }
}

/// Volume of the body, `(4 pi / 3) * sum S A B sin(psi) dpsi` over the quadrant
/// (both hemispheres included).
pub fn volume(profile: &SupportProfile) -> Result<f64> {
    let field = curvatures_from_support(profile)?;
    Ok(volume_from(profile, &field))
}

pub(crate) fn volume_from(profile: &SupportProfile, field: &CurvatureField) -> f64 {
    let dpsi = profile.dpsi();
    let sum: f64 = profile
        .values()
        .iter()
        .zip(profile.angles())
        .zip(field.a.iter().zip(&field.b))
        .map(|((s, psi), (a, b))| s * a * b * psi.sin())
        .sum();
    4.0 * std::f64::consts::PI / 3.0 * sum * dpsi
}

/// `2 * sum sin cos / K * dpsi`, the discrete form of the squared equatorial radius.
pub fn equator_radius_sq_integral(profile: &SupportProfile, field: &CurvatureField) -> f64 {
    let dpsi = profile.dpsi();
    2.0 * profile.angles().zip(&field.k).map(|(psi, k)| psi.sin() * psi.cos() / k).sum::<f64>() * dpsi
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::convex::profile::Axis;

    fn spheroid(a: f64, b: f64, n: usize) -> SupportProfile {
        SupportProfile::from_fn(Axis::E1, n, |p| (a * a * p.cos().powi(2) + b * b * p.sin().powi(2)).sqrt()).unwrap()
    }

    /// Gauss curvature of the spheroid with semi-axis `a` along the rotation
    /// axis and `b` across it, at the point with normal angle `psi`.
    fn spheroid_gauss(a: f64, b: f64, psi: f64) -> f64 {
        let q = a * a * psi.cos().powi(2) + b * b * psi.sin().powi(2);
        q * q / (a * a * b * b * b * b)
    }

    #[test]
    fn constant_support_is_a_sphere() {
        let p = SupportProfile::from_fn(Axis::E1, 64, |_| 2.0).unwrap();
        let f = curvatures_from_support(&p).unwrap();
        for k in 0..64 {
            assert_eq!(f.a[k], 2.0);
            assert_eq!(f.b[k], 2.0);
            assert_eq!(f.k[k], 0.25);
        }
    }

    #[test]
    fn concave_meridian_is_rejected() {
        let p = SupportProfile::from_fn(Axis::E1, 64, |a| 1.0 + 0.3 * (4.0 * a).cos()).unwrap();
        assert!(matches!(curvatures_from_support(&p), Err(GcfError::NonConvex { .. })));
    }

    #[test]
    fn too_coarse_grid_is_rejected() {
        let p = SupportProfile::from_fn(Axis::E1, 8, |_| 1.0).unwrap();
        assert!(matches!(curvatures_from_support(&p), Err(GcfError::TooFewCells { .. })));
    }

    #[test]
    fn spheroid_gauss_curvature() {
        let (a, b) = (1.0, 2.0);
        let p = spheroid(a, b, 512);
        let f = curvatures_from_support(&p).unwrap();
        let worst =
            p.angles().zip(&f.k).map(|(psi, k)| (k / spheroid_gauss(a, b, psi) - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-3, "worst relative error {worst}");
    }

    #[test]
    fn gauss_is_product_of_principal_curvatures() {
        let f = curvatures_from_support(&spheroid(1.5, 0.7, 128)).unwrap();
        for k in 0..f.len() {
            assert_eq!(f.k[k], 1.0 / (f.a[k] * f.b[k]));
            assert_eq!(f.lambda1[k], 1.0 / f.a[k]);
            assert_eq!(f.lambda2[k], 1.0 / f.b[k]);
        }
    }

    #[test]
    fn sphere_volume() {
        for (rho, tol) in [(1.0, 1e-4), (2.0, 1e-3)] {
            let p = SupportProfile::from_fn(Axis::E1, 512, |_| rho).unwrap();
            let v = volume(&p).unwrap();
            assert!((v - 4.0 / 3.0 * PI * rho * rho * rho).abs() <= tol, "{v}");
        }
    }

    #[test]
    fn sphere_volume_converges_at_second_order() {
        let exact = 4.0 / 3.0 * PI;
        let err = |n| (volume(&SupportProfile::from_fn(Axis::E1, n, |_| 1.0).unwrap()).unwrap() - exact).abs();
        let (e1, e2) = (err(64), err(128));
        assert!(e1 / e2 > 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn spheroid_volume() {
        let (a, b) = (1.0, 2.0);
        let v = volume(&spheroid(a, b, 1024)).unwrap();
        let exact = 4.0 / 3.0 * PI * a * b * b;
        assert!((v / exact - 1.0).abs() < 1e-4);
    }

    #[test]
    fn half_angle_identity_residual_is_second_order() {
        // d/dpsi (B sin)^2 / 2 = sin cos / K, integrated over the quadrant.
        let residual = |n| {
            let p = spheroid(1.0, 2.0, n);
            let f = curvatures_from_support(&p).unwrap();
            (equator_radius_sq_integral(&p, &f) - 4.0).abs()
        };
        let (r1, r2) = (residual(128), residual(256));
        assert!(r1 / r2 >= 3.0, "ratio {}", r1 / r2);
        let sphere = SupportProfile::from_fn(Axis::E3, 128, |_| 1.5).unwrap();
        let f = curvatures_from_support(&sphere).unwrap();
        assert!((equator_radius_sq_integral(&sphere, &f) - 2.25).abs() < 1e-4);
    }
}
