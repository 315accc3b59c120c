use serde::{Deserialize, Serialize};

use crate::closed_forms::{paperclip_support, paperclip_time_for_volume};
use crate::convex::{cell_angle, Axis, SupportProfile};
use crate::error::{GcfError, Result};
use crate::quad;
use crate::translators::r_alpha_sq;

/// Which approximating family a run belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "index", rename_all = "lowercase")]
pub enum Family {
    Pancake(u32),
    Sausage(u32),
}

/// Initial body and start time of one member of an approximating family.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationSchedule {
    pub family: Family,
    pub start_time: f64,
    pub alpha: f64,
    pub profile: SupportProfile,
    /// Pancake only: paperclip time whose revolution has volume `4 pi j`.
    pub paperclip_time: Option<f64>,
}

/// Rotated paperclip of volume `4 pi j`, started at `t = -j` with `alpha = 1`.
pub fn pancake_initial(j: u32, n: usize) -> Result<ApproximationSchedule> {
    if j == 0 {
        return Err(GcfError::BadParameter { name: "j", reason: "must be at least 1".into() });
    }
    let tj = paperclip_time_for_volume(4.0 * std::f64::consts::PI * j as f64)?;
    Ok(ApproximationSchedule {
        family: Family::Pancake(j),
        start_time: -(j as f64),
        alpha: 1.0,
        profile: paperclip_support(tj, n)?,
        paperclip_time: Some(tj),
    })
}

/// Prescribed initial speed `(cos^2 psi + i^-2)^(1/2)` of the sausage family.
pub fn sausage_speed(i: u32, psi: f64) -> f64 {
    (psi.cos().powi(2) + (i as f64).powi(-2)).sqrt()
}

/// Squared equatorial radius of the sausage initial body,
/// `int_0^1 (y + i^-2)^(-1/(2 alpha)) dy`.
pub fn sausage_initial_h_sq(i: u32, alpha: f64) -> f64 {
    sausage_radius_sq(i, alpha, std::f64::consts::FRAC_PI_2)
}

/// `r(phi)^2 = 2 int_0^phi sin cos / K`, in closed form.
fn sausage_radius_sq(i: u32, alpha: f64, phi: f64) -> f64 {
    let c = (i as f64).powi(-2);
    let g = 1.0 - 1.0 / (2.0 * alpha);
    let (sn, cs) = phi.sin_cos();
    let base = cs * cs + c;
    base.powf(g) * (g * (sn * sn / base).ln_1p()).exp_m1() / g
}

/// Body whose speed is `(cos^2 psi + i^-2)^(1/2)`, axis `e3`, started at `t = 0`.
///
/// The meridian is rebuilt from the prescribed Gauss curvature: the contact
/// radius `r` from its closed-form integral, then the height `z` by quadrature
/// of `sin^2 / (K r)` inwards from the equator.
pub fn sausage_initial(i: u32, alpha: f64, n: usize) -> Result<ApproximationSchedule> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(GcfError::BadAlpha { alpha, range: "(1/2, 1)" });
    }
    if i == 0 {
        return Err(GcfError::BadParameter { name: "i", reason: "must be at least 1".into() });
    }
    let gauss = |psi: f64| sausage_speed(i, psi).powf(1.0 / alpha);
    let radius = |psi: f64| sausage_radius_sq(i, alpha, psi).sqrt();
    let dz = |psi: f64| {
        if psi <= 0.0 {
            return 0.0;
        }
        psi.sin().powi(2) / (gauss(psi) * radius(psi))
    };
    let mut z = vec![0.0; n];
    let mut acc = 0.0;
    let mut upper = std::f64::consts::FRAC_PI_2;
    for k in (0..n).rev() {
        let psi = cell_angle(k, n);
        acc += quad::integrate(dz, psi, upper, 1e-15);
        z[k] = acc;
        upper = psi;
    }
    let values = (0..n)
        .map(|k| {
            let psi = cell_angle(k, n);
            radius(psi) * psi.sin() + z[k] * psi.cos()
        })
        .collect();
    Ok(ApproximationSchedule {
        family: Family::Sausage(i),
        start_time: 0.0,
        alpha,
        profile: SupportProfile::new(Axis::E3, values)?,
        paperclip_time: None,
    })
}

/// Lower bound `V / (2 pi r_alpha^2)` on the sausage's backward existence time.
pub fn sausage_time_lower_bound(volume: f64, alpha: f64) -> f64 {
    volume / (2.0 * std::f64::consts::PI * r_alpha_sq(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{curvatures_from_support, displacements, volume};
    use std::f64::consts::PI;

    #[test]
    fn radius_closed_form_matches_quadrature() {
        for (i, alpha) in [(1, 0.75), (8, 0.6), (16, 0.9)] {
            let c = (i as f64).powi(-2);
            let q = quad::integrate(|y| (y + c).powf(-1.0 / (2.0 * alpha)), 0.0, 1.0, 1e-14);
            assert!((sausage_initial_h_sq(i, alpha) - q).abs() < 1e-12);
        }
        let h1 = sausage_initial_h_sq(1, 0.75);
        assert!((h1 - 3.0 * (2f64.cbrt() - 1.0)).abs() < 1e-14);
        assert!(sausage_radius_sq(4, 0.75, 0.0).abs() < 1e-300);
    }

    #[test]
    fn sausage_speed_round_trip() {
        let s = sausage_initial(8, 0.75, 1024).unwrap();
        let field = curvatures_from_support(&s.profile).unwrap();
        let worst = s
            .profile
            .angles()
            .zip(&field.k)
            .skip(1)
            .take(1022)
            .map(|(psi, k)| (k.powf(0.75) - sausage_speed(8, psi)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-4, "{worst}");
    }

    #[test]
    fn sausage_h_matches_quadrature_and_grows() {
        let mut prev = 0.0;
        for i in [1, 2, 4, 8, 16] {
            let s = sausage_initial(i, 0.75, 1024).unwrap();
            let h = displacements(&s.profile).h;
            assert!((h - sausage_initial_h_sq(i, 0.75).sqrt()).abs() <= 1e-3);
            assert!(h > prev);
            prev = h;
        }
    }

    #[test]
    fn sausage_rejects_alpha_outside_range() {
        assert!(matches!(sausage_initial(4, 1.0, 64), Err(GcfError::BadAlpha { .. })));
        assert!(matches!(sausage_initial(4, 0.5, 64), Err(GcfError::BadAlpha { .. })));
    }

    #[test]
    fn pancake_volume_and_width() {
        let p = pancake_initial(5, 1024).unwrap();
        let v = volume(&p.profile).unwrap();
        assert!((v / (20.0 * PI) - 1.0).abs() <= 5e-3);
        let p1 = pancake_initial(1, 256).unwrap();
        assert!(p1.paperclip_time.unwrap() < 0.0);
        assert!(displacements(&p1.profile).h < PI / 2.0);
        let p50 = pancake_initial(50, 256).unwrap();
        assert!(displacements(&p50.profile).h >= 0.49 * PI);
    }
}
