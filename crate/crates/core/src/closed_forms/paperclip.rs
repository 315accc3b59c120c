use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::convex::{cell_angle, Axis, SupportProfile};
use crate::error::{GcfError, Result};
use crate::quad;

/// The paperclip `cos x = e^t cosh y` at a fixed negative time.
///
/// Everything is parametrized by the outward normal angle `psi` measured from
/// the `x` axis. With `s(psi) = sqrt(e^{2t} cos^2 + sin^2)` the contact point is
/// `x = arccos(s)`, `y = arccosh(s e^{-t})`, which both simplify to forms that
/// stay accurate for very negative `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Paperclip {
    t: f64,
    et: f64,
    /// `sqrt(1 - e^{2t})`
    root_lo: f64,
    /// `sqrt(e^{-2t} - 1)`
    root_hi: f64,
}

impl Paperclip {
    pub fn new(t: f64) -> Result<Self> {
        if !(t < 0.0 && t.is_finite()) {
            return Err(GcfError::BadTime(t));
        }
        Ok(Paperclip { t, et: t.exp(), root_lo: (-(2.0 * t).exp_m1()).sqrt(), root_hi: (-2.0 * t).exp_m1().sqrt() })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Horizontal displacement `arccos(e^t)`.
    pub fn h(&self) -> f64 {
        self.root_lo.atan2(self.et)
    }

    /// Vertical displacement `arccosh(e^{-t})`.
    pub fn l(&self) -> f64 {
        self.root_hi.asinh()
    }

    fn s(&self, psi: f64) -> f64 {
        let (sn, cs) = psi.sin_cos();
        (self.et * self.et * cs * cs + sn * sn).sqrt()
    }

    /// Point of the curve whose outward normal is `(cos psi, sin psi)`.
    pub fn contact_point(&self, psi: f64) -> [f64; 2] {
        let (sn, cs) = psi.sin_cos();
        [(cs * self.root_lo).atan2(self.s(psi)), (sn * self.root_hi).asinh()]
    }

    /// Curvature of the curve at the point with normal angle `psi`.
    pub fn curvature(&self, psi: f64) -> f64 {
        self.s(psi) / self.root_lo
    }

    /// Support function of the region `cos x >= e^t cosh y`.
    pub fn support(&self, psi: f64) -> f64 {
        let [x, y] = self.contact_point(psi);
        x * psi.cos() + y * psi.sin()
    }

    /// Profile `u(x) = arccosh(e^{-t} cos x)` for `|x| <= h`.
    pub fn profile(&self, x: f64) -> f64 {
        let z = x.cos() / self.et;
        if z <= 1.0 {
            return 0.0;
        }
        let zm1 = z - 1.0;
        (zm1 + (zm1 * (z + 1.0)).sqrt()).ln_1p()
    }

    /// Volume of the solid obtained by rotating the region about the `x` axis.
    pub fn revolution_volume(&self) -> f64 {
        let h = self.h();
        let scale = self.l().powi(2) * h;
        2.0 * PI * quad::integrate(|x| self.profile(x).powi(2), 0.0, h, 1e-13 * scale)
    }

    /// Principal curvatures `(lambda1, lambda2)` of the surface of revolution
    /// about the `x` axis at normal angle `psi`.
    pub fn revolution_curvatures(&self, psi: f64) -> (f64, f64) {
        let [_, y] = self.contact_point(psi);
        (self.curvature(psi), psi.sin() / y)
    }
}

/// Closed curve samples of the paperclip at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperclipCurve {
    pub t: f64,
    pub h: f64,
    pub l: f64,
    /// Counter-clockwise points `(gamma1, gamma2)` covering all four quadrants.
    pub points: Vec<[f64; 2]>,
}

impl PaperclipCurve {
    /// `max |cos gamma1 - e^t cosh gamma2|` over the samples.
    pub fn identity_residual(&self) -> f64 {
        let et = self.t.exp();
        self.points.iter().map(|p| (p[0].cos() - et * p[1].cosh()).abs()).fold(0.0, f64::max)
    }
}

/// Samples the paperclip with `per_quadrant` normal angles in each quadrant.
pub fn paperclip_curve(t: f64, per_quadrant: usize) -> Result<PaperclipCurve> {
    let clip = Paperclip::new(t)?;
    let q1: Vec<[f64; 2]> =
        (0..per_quadrant).map(|k| clip.contact_point(PI / 2.0 * k as f64 / per_quadrant as f64)).collect();
    let mut points = Vec::with_capacity(4 * per_quadrant);
    points.extend(q1.iter().copied());
    points.extend(q1.iter().rev().map(|p| [-p[0], p[1]]));
    points.extend(q1.iter().map(|p| [-p[0], -p[1]]));
    points.extend(q1.iter().rev().map(|p| [p[0], -p[1]]));
    Ok(PaperclipCurve { t, h: clip.h(), l: clip.l(), points })
}

/// Support profile of the paperclip rotated about `e1`.
pub fn paperclip_support(t: f64, n: usize) -> Result<SupportProfile> {
    let clip = Paperclip::new(t)?;
    SupportProfile::new(Axis::E1, (0..n).map(|k| clip.support(cell_angle(k, n))).collect())
}

/// Result of evaluating the ratio identity of the rotated paperclip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioIdentityCheck {
    /// Largest relative residual of
    /// `[u u_xx + (1 + u_x^2)] sinh u = (1 + u_x^2)(sinh u - u cosh u)`.
    pub max_residual: f64,
    pub worst_x: f64,
    /// `1 + u_x^2 + u u_xx <= 0` held at every sample.
    pub sign_holds: bool,
}

/// Evaluates both sides of the ratio identity from the explicit derivatives
/// of `u = arccosh(e^{-t} cos x)` at 200 interior points of `(-h, h)`.
///
/// The residual is relative to the larger side; the two sides grow like
/// `e^{-t}` so an absolute residual is meaningless for very negative `t`.
pub fn paperclip_ratio_check(t: f64) -> Result<RatioIdentityCheck> {
    let clip = Paperclip::new(t)?;
    let h = clip.h();
    let inv_et = (-t).exp();
    let mut out = RatioIdentityCheck { max_residual: 0.0, worst_x: 0.0, sign_holds: true };
    let samples = 200;
    for m in 0..samples {
        let x = -h + 2.0 * h * (m as f64 + 0.5) / samples as f64;
        let (sx, cx) = x.sin_cos();
        let z = inv_et * cx;
        let zx = -inv_et * sx;
        let zxx = -z;
        let root = ((z - 1.0) * (z + 1.0)).sqrt();
        let u = clip.profile(x);
        let ux = zx / root;
        let uxx = zxx / root - z * zx * zx / root.powi(3);
        let (sh, ch) = (u.sinh(), u.cosh());
        let lhs = (u * uxx + (1.0 + ux * ux)) * sh;
        let rhs = (1.0 + ux * ux) * (sh - u * ch);
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        let residual = (lhs - rhs).abs() / scale;
        if residual > out.max_residual {
            out.max_residual = residual;
            out.worst_x = x;
        }
        if 1.0 + ux * ux + u * uxx > 0.0 {
            out.sign_holds = false;
        }
    }
    Ok(out)
}

/// Time `T` at which the rotated paperclip encloses volume `target_volume`.
///
/// The volume decreases strictly in `t`, from infinity as `t -> -inf` to zero
/// as `t -> 0`, so a bracket always exists and bisection converges.
pub fn paperclip_time_for_volume(target_volume: f64) -> Result<f64> {
    if !(target_volume > 0.0 && target_volume.is_finite()) {
        return Err(GcfError::BadParameter {
            name: "target_volume",
            reason: format!("must be positive, got {target_volume}"),
        });
    }
    let volume = |t: f64| Paperclip::new(t).map(|c| c.revolution_volume()).unwrap_or(0.0);
    let mut lo = -1.0;
    while volume(lo) < target_volume {
        lo *= 2.0;
    }
    let mut hi = -1.0;
    while volume(hi) > target_volume {
        hi *= 0.5;
    }
    let t = quad::bisect(|t| volume(t) - target_volume, lo, hi, |a, b| (b - a).abs() <= 1e-14 * a.abs());
    Ok(t)
}
