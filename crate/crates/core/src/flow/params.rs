use serde::{Deserialize, Serialize};

use super::stepper::DEFAULT_SPEED_CAP;
use crate::error::{GcfError, Result};

/// Integration settings for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub alpha: f64,
    pub cfl: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Halt once the smallest support value drops below this.
    pub stop_inradius: f64,
    /// Time between report rows.
    pub snapshot_every: f64,
    pub speed_cap: f64,
    /// Keep the profile of every report row.
    pub keep_snapshots: bool,
}

impl FlowParams {
    /// Defaults: cfl 0.2, stop inradius 1e-3, 50 report intervals.
    pub fn new(alpha: f64, t_start: f64, t_end: f64) -> Self {
        FlowParams {
            alpha,
            cfl: 0.2,
            t_start,
            t_end,
            stop_inradius: 1e-3,
            snapshot_every: (t_end - t_start) / 50.0,
            speed_cap: DEFAULT_SPEED_CAP,
            keep_snapshots: true,
        }
    }

    pub fn with_snapshot_every(mut self, every: f64) -> Self {
        self.snapshot_every = every;
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn with_stop_inradius(mut self, r: f64) -> Self {
        self.stop_inradius = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.5 && self.alpha.is_finite()) {
            return Err(GcfError::BadAlpha { alpha: self.alpha, range: "(1/2, inf)" });
        }
        let bad = |name, reason: &str| Err(GcfError::BadParameter { name, reason: reason.to_string() });
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return bad("cfl", "must lie in (0, 0.5]");
        }
        if !(self.t_start < self.t_end && self.t_start.is_finite() && self.t_end.is_finite()) {
            return bad("t_end", "must be finite and exceed t_start");
        }
        if !(self.snapshot_every > 0.0) {
            return bad("snapshot_every", "must be positive");
        }
        if !(self.stop_inradius >= 0.0) {
            return bad("stop_inradius", "must be non-negative");
        }
        if !(self.speed_cap > 0.0) {
            return bad("speed_cap", "must be positive");
        }
        Ok(())
    }
}
