use crate::convex::{GridTrig, SupportProfile};
use crate::error::{GcfError, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Default bound on the normal speed `K^alpha`.
pub const DEFAULT_SPEED_CAP: f64 = 1e6;

#[cfg(feature = "parallel")]
const CHUNK: usize = 128;

/// How the per-cell speed is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Power {
    One,
    Two,
    General(f64),
}

impl Power {
    fn new(alpha: f64) -> Self {
        if alpha == 1.0 {
            Power::One
        } else if alpha == 2.0 {
            Power::Two
        } else {
            Power::General(alpha)
        }
    }

    #[inline(always)]
    fn apply(self, k: f64) -> f64 {
        match self {
            Power::One => k,
            Power::Two => k * k,
            Power::General(a) => k.powf(a),
        }
    }
}

/// Summary of one speed sweep over the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedSweep {
    pub min_a: f64,
    pub max_speed: f64,
    pub capped: bool,
    /// Lowest cell with a non-positive radius.
    pub bad_cell: Option<usize>,
}

impl SpeedSweep {
    const EMPTY: SpeedSweep = SpeedSweep { min_a: f64::INFINITY, max_speed: 0.0, capped: false, bad_cell: None };

    fn merge(self, other: SpeedSweep) -> SpeedSweep {
        SpeedSweep {
            min_a: self.min_a.min(other.min_a),
            max_speed: self.max_speed.max(other.max_speed),
            capped: self.capped || other.capped,
            bad_cell: match (self.bad_cell, other.bad_cell) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        }
    }
}

#[inline(always)]
fn speed_kernel(s: &[f64], trig: &GridTrig, power: Power, cap: f64, start: usize, out: &mut [f64]) -> SpeedSweep {
    let mut sweep = SpeedSweep::EMPTY;
    for (j, slot) in out.iter_mut().enumerate() {
        let k = start + j;
        let (a, b) = trig.radii(s, k);
        if !(a > 0.0 && b > 0.0) {
            sweep.bad_cell.get_or_insert(k);
            *slot = f64::NAN;
            continue;
        }
        let mut v = power.apply(1.0 / (a * b));
        if v > cap {
            v = cap;
            sweep.capped = true;
        }
        sweep.min_a = sweep.min_a.min(a);
        sweep.max_speed = sweep.max_speed.max(v);
        *slot = v;
    }
    sweep
}

/// Fills `out` with the capped speed `K^alpha` of the support values `s`.
pub fn evaluate_speed(
    s: &[f64],
    trig: &GridTrig,
    alpha: f64,
    cap: f64,
    execution: Execution,
    out: &mut [f64],
) -> SpeedSweep {
    let power = Power::new(alpha);
    match execution {
        Execution::Sequential => speed_kernel(s, trig, power, cap, 0, out),
        #[cfg(feature = "parallel")]
        Execution::Parallel => out
            .par_chunks_mut(CHUNK)
            .enumerate()
            .map(|(c, chunk)| speed_kernel(s, trig, power, cap, c * CHUNK, chunk))
            .reduce(|| SpeedSweep::EMPTY, SpeedSweep::merge),
    }
}

/// Time and support profile of an evolving body.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub profile: SupportProfile,
}

impl FlowState {
    pub fn new(t: f64, profile: SupportProfile) -> Self {
        FlowState { t, profile }
    }
}

/// Diagnostics of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    /// `dt/2 * max |k2 - k1|`, an estimate of the local time error.
    pub local_error: f64,
    pub capped: bool,
}

/// Explicit midpoint integrator for `S_t = -K^alpha` with reusable buffers.
#[derive(Debug, Clone)]
pub struct Stepper {
    alpha: f64,
    speed_cap: f64,
    execution: Execution,
    trig: GridTrig,
    k1: Vec<f64>,
    k2: Vec<f64>,
    mid: Vec<f64>,
    /// Sweep of the current state, valid until the next accepted step.
    current: Option<SpeedSweep>,
}

impl Stepper {
    pub fn new(alpha: f64, n: usize) -> Self {
        Stepper {
            alpha,
            speed_cap: DEFAULT_SPEED_CAP,
            execution: Execution::default(),
            trig: GridTrig::new(n),
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            mid: vec![0.0; n],
            current: None,
        }
    }

    pub fn with_speed_cap(mut self, cap: f64) -> Self {
        self.speed_cap = cap;
        self.current = None;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn sweep_current(&mut self, s: &[f64]) -> Result<SpeedSweep> {
        if let Some(sweep) = self.current {
            return Ok(sweep);
        }
        if s.len() != self.trig.n {
            return Err(GcfError::GridMismatch(format!("stepper has N = {}, state has N = {}", self.trig.n, s.len())));
        }
        let sweep = evaluate_speed(s, &self.trig, self.alpha, self.speed_cap, self.execution, &mut self.k1);
        if let Some(cell) = sweep.bad_cell {
            let (a, b) = self.trig.radii(s, cell);
            return Err(GcfError::NonConvex { cell, a, b });
        }
        self.current = Some(sweep);
        Ok(sweep)
    }

    /// `cfl * dpsi^2 * min A / (alpha * max K^alpha)` for the state.
    pub fn cfl_dt(&mut self, state: &FlowState, cfl: f64) -> Result<f64> {
        let sweep = self.sweep_current(state.profile.values())?;
        let d = self.trig.dpsi;
        Ok(cfl * d * d * sweep.min_a / (self.alpha * sweep.max_speed))
    }

    /// Advances `state` by `dt`. On `StepRejected` the state is untouched.
    pub fn step(&mut self, state: &mut FlowState, dt: f64) -> Result<StepInfo> {
        let reject = GcfError::StepRejected { t: state.t, dt };
        let first = self.sweep_current(state.profile.values())?;
        let s = state.profile.values();
        for ((m, &v), &k) in self.mid.iter_mut().zip(s).zip(&self.k1) {
            *m = v - 0.5 * dt * k;
        }
        if self.mid.iter().any(|v| !(*v > 0.0)) {
            return Err(reject);
        }
        let second = evaluate_speed(&self.mid, &self.trig, self.alpha, self.speed_cap, self.execution, &mut self.k2);
        if second.bad_cell.is_some() {
            return Err(reject);
        }
        let mut local_error = 0.0f64;
        for (((m, &v), &k2), &k1) in self.mid.iter_mut().zip(s).zip(&self.k2).zip(&self.k1) {
            *m = v - dt * k2;
            local_error = local_error.max((k2 - k1).abs());
        }
        if self.mid.iter().any(|v| !(*v > 0.0)) {
            return Err(reject);
        }
        let next = evaluate_speed(&self.mid, &self.trig, self.alpha, self.speed_cap, self.execution, &mut self.k1);
        if next.bad_cell.is_some() {
            // k1 now holds garbage for the rejected profile.
            self.current = None;
            return Err(reject);
        }
        state.profile.values_mut().copy_from_slice(&self.mid);
        state.t += dt;
        self.current = Some(next);
        Ok(StepInfo { dt, local_error: 0.5 * dt * local_error, capped: first.capped || second.capped })
    }

    /// Sweep of the state most recently stepped or sized.
    pub fn last_sweep(&self) -> Option<SpeedSweep> {
        self.current
    }

    /// Forgets cached speeds; call after modifying the state externally.
    pub fn invalidate(&mut self) {
        self.current = None;
    }
}

/// One midpoint step of `S_t = -K^alpha`.
pub fn step(state: &FlowState, dt: f64, alpha: f64) -> Result<FlowState> {
    let mut next = state.clone();
    Stepper::new(alpha, state.profile.len()).step(&mut next, dt)?;
    Ok(next)
}

/// Stable explicit step for `state`.
pub fn cfl_dt(state: &FlowState, alpha: f64, cfl: f64) -> Result<f64> {
    Stepper::new(alpha, state.profile.len()).cfl_dt(state, cfl)
}
