use crate::convex::{Axis, SupportProfile};
use crate::error::{GcfError, Result};

/// Round sphere moving by the `alpha` power of Gauss curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSolution {
    alpha: f64,
    rho0: f64,
}

impl SphereSolution {
    pub fn new(alpha: f64, rho0: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(GcfError::BadAlpha { alpha, range: "(0, inf)" });
        }
        if !(rho0 > 0.0 && rho0.is_finite()) {
            return Err(GcfError::BadParameter { name: "rho0", reason: format!("must be positive, got {rho0}") });
        }
        Ok(SphereSolution { alpha, rho0 })
    }

    fn power(&self) -> f64 {
        2.0 * self.alpha + 1.0
    }

    /// Time at which the sphere started at `t = 0` shrinks to a point.
    pub fn extinction_time(&self) -> f64 {
        self.rho0.powf(self.power()) / self.power()
    }

    /// Radius at time `t`, zero at and after extinction.
    pub fn radius_at(&self, t: f64) -> f64 {
        let p = self.power();
        let base = self.rho0.powf(p) - p * t;
        if base <= 0.0 {
            0.0
        } else {
            base.powf(1.0 / p)
        }
    }
}

pub fn sphere_radius_at(alpha: f64, rho0: f64, t: f64) -> Result<f64> {
    Ok(SphereSolution::new(alpha, rho0)?.radius_at(t))
}

pub fn sphere_profile(rho: f64, n: usize, axis: Axis) -> Result<SupportProfile> {
    SupportProfile::new(axis, vec![rho; n])
}
