//! Explicit time integration of `S_t = -K^alpha` on the quadrant grid.

mod params;
mod run;
mod schedule;
mod stepper;

pub use params::FlowParams;
pub use run::{evolve, evolve_with, run, FlowReport, HaltReason, ReportRow};
pub use schedule::{
    pancake_initial, sausage_initial, sausage_initial_h_sq, sausage_speed, sausage_time_lower_bound,
    ApproximationSchedule, Family,
};
pub use stepper::{
    cfl_dt, evaluate_speed, step, Execution, FlowState, SpeedSweep, StepInfo, Stepper, DEFAULT_SPEED_CAP,
};
