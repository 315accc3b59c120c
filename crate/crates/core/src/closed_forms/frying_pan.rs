use serde::{Deserialize, Serialize};

use crate::convex::{cell_angle, Axis, SupportProfile};
use crate::error::{GcfError, Result};

/// Radius of the large arc bounding the pan.
const ARC_RADIUS: f64 = 4.0;

/// Body of revolution about `e1` whose radius is a circular arc of radius 4
/// ending in a flat disc at `x1 = ±b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FryingPan {
    b: f64,
    t: f64,
    flat: f64,
}

impl FryingPan {
    pub fn new(b: f64, t: f64) -> Result<Self> {
        if !(b > 0.0 && b <= ARC_RADIUS) {
            return Err(GcfError::BadParameter { name: "b", reason: format!("must lie in (0, 4], got {b}") });
        }
        if !(t < 0.0 && t.is_finite()) {
            return Err(GcfError::BadTime(t));
        }
        Ok(FryingPan { b, t, flat: 0.5 * (-2.0 * t).sqrt() })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Radius of the flat side, `sqrt(-2t) / 2`.
    pub fn flat_radius(&self) -> f64 {
        self.flat
    }

    fn arc(&self, x: f64) -> f64 {
        let w = x.abs() + ARC_RADIUS - self.b;
        (ARC_RADIUS * ARC_RADIUS - w * w).max(0.0).sqrt()
    }

    /// Radius function `phi(x, t)` on `|x| <= b`.
    pub fn radius(&self, x: f64) -> f64 {
        self.flat + self.arc(x)
    }

    /// `d phi / dt`, independent of `x`.
    pub fn radius_rate(&self) -> f64 {
        -0.5 / (-2.0 * self.t).sqrt()
    }

    /// `phi_t - phi_xx / (phi Q^3)` at `0 <= x < b`, with `Q = sqrt(1 + phi_x^2)`.
    pub fn residual(&self, x: f64) -> f64 {
        let w = x.abs() + ARC_RADIUS - self.b;
        let g = self.arc(x);
        let gx = -w / g;
        let gxx = -ARC_RADIUS * ARC_RADIUS / g.powi(3);
        let q = (1.0 + gx * gx).sqrt();
        self.radius_rate() - gxx / (self.radius(x) * q.powi(3))
    }

    /// Angle from the axis beyond which the support point is the rim at `x = 0`.
    pub fn ridge_angle(&self) -> f64 {
        ((ARC_RADIUS - self.b) / ARC_RADIUS).acos()
    }

    /// Support function in the direction at angle `psi` from `e1`.
    pub fn support(&self, psi: f64) -> f64 {
        let (sn, cs) = psi.sin_cos();
        if psi <= self.ridge_angle() {
            (self.b - ARC_RADIUS) * cs + ARC_RADIUS + self.flat * sn
        } else {
            self.radius(0.0) * sn
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FryingPanResidual {
    pub max_residual: f64,
    pub worst_x: f64,
    pub subsolution: bool,
}

/// Maximum subsolution residual over 400 interior points of `(0, b)`.
pub fn frying_pan_residual(b: f64, t: f64) -> Result<FryingPanResidual> {
    let pan = FryingPan::new(b, t)?;
    let samples = 400;
    let (max_residual, worst_x) = (0..samples)
        .map(|m| {
            let x = b * (m as f64 + 0.5) / samples as f64;
            (pan.residual(x), x)
        })
        .fold((f64::NEG_INFINITY, 0.0), |acc, r| if r.0 > acc.0 { r } else { acc });
    Ok(FryingPanResidual { max_residual, worst_x, subsolution: max_residual < 0.0 })
}

/// Support profile of the pan about `e1`.
pub fn frying_pan_support(b: f64, t: f64, n: usize) -> Result<SupportProfile> {
    let pan = FryingPan::new(b, t)?;
    SupportProfile::new(Axis::E1, (0..n).map(|k| pan.support(cell_angle(k, n))).collect())
}
