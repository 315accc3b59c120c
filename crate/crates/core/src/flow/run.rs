use serde::{Deserialize, Serialize};

use super::params::FlowParams;
use super::schedule::{sausage_time_lower_bound, ApproximationSchedule, Family};
use super::stepper::{Execution, FlowState, Stepper};
use crate::convex::io::{fmt_f64, SCHEMA_VERSION};
use crate::convex::{displacements, volume_from, CurvatureField, SupportProfile};
use crate::error::{GcfError, Result};

/// Steps smaller than this fraction of the CFL step abort the run.
const MIN_STEP_FRACTION: f64 = 1e-6;

/// One report row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub t: f64,
    pub h: f64,
    pub l: f64,
    #[serde(rename = "V")]
    pub volume: f64,
    /// Smallest curvature ratio `B / A` over the cells.
    #[serde(rename = "minR")]
    pub min_ratio: f64,
    /// Largest local time-error estimate since the previous row.
    #[serde(rename = "maxResidual")]
    pub max_residual: f64,
    /// Smallest stability-limited step since the previous row; zero on the
    /// initial row.
    #[serde(rename = "dtMin")]
    pub dt_min: f64,
    /// The speed cap was applied since the previous row.
    pub capped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    ReachedEnd,
    Inradius,
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub schema_version: u32,
    pub family: Option<Family>,
    pub params: FlowParams,
    #[serde(rename = "N")]
    pub n: usize,
    pub rows: Vec<ReportRow>,
    /// Profiles at the row times, when kept.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<SupportProfile>,
    pub halt: HaltReason,
    /// Error that aborted the run.
    pub error: Option<String>,
    /// Sausage runs: `V / (2 pi r_alpha^2)` at the start.
    pub backward_time_bound: Option<f64>,
    pub steps: u64,
}

impl FlowReport {
    pub fn last(&self) -> &ReportRow {
        self.rows.last().expect("a report always has its initial row")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GcfError::Parse(e.to_string()))
    }

    /// Rows as CSV with the header `t,h,l,V,minR,maxResidual,dtMin,capped`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,h,l,V,minR,maxResidual,dtMin,capped\n");
        for r in &self.rows {
            let cols = [r.t, r.h, r.l, r.volume, r.min_ratio, r.max_residual, r.dt_min];
            for c in cols {
                out.push_str(&fmt_f64(c));
                out.push(',');
            }
            out.push_str(if r.capped { "1\n" } else { "0\n" });
        }
        out
    }
}

fn row_for(profile: &SupportProfile, t: f64) -> ReportRow {
    let field = CurvatureField::unchecked(profile);
    let d = displacements(profile);
    ReportRow {
        t,
        h: d.h,
        l: d.l,
        volume: volume_from(profile, &field),
        min_ratio: field.a.iter().zip(&field.b).map(|(a, b)| b / a).fold(f64::INFINITY, f64::min),
        max_residual: 0.0,
        dt_min: 0.0,
        capped: false,
    }
}

/// Runs one member of an approximating family.
///
/// `params.alpha` and `params.t_start` must agree with the schedule.
pub fn run(schedule: &ApproximationSchedule, params: &FlowParams) -> Result<FlowReport> {
    if params.alpha != schedule.alpha || params.t_start != schedule.start_time {
        return Err(GcfError::BadParameter {
            name: "params",
            reason: format!("schedule needs alpha = {} and t_start = {}", schedule.alpha, schedule.start_time),
        });
    }
    let mut report = evolve(schedule.profile.clone(), params)?;
    report.family = Some(schedule.family);
    if let Family::Sausage(_) = schedule.family {
        report.backward_time_bound = Some(sausage_time_lower_bound(report.rows[0].volume, params.alpha));
    }
    Ok(report)
}

/// Evolves `initial` from `params.t_start`.
pub fn evolve(initial: SupportProfile, params: &FlowParams) -> Result<FlowReport> {
    evolve_with(initial, params, Execution::default())
}

pub fn evolve_with(initial: SupportProfile, params: &FlowParams, execution: Execution) -> Result<FlowReport> {
    params.validate()?;
    let n = initial.len();
    let mut stepper = Stepper::new(params.alpha, n).with_speed_cap(params.speed_cap).with_execution(execution);
    let mut state = FlowState::new(params.t_start, initial);
    let mut report = FlowReport {
        schema_version: SCHEMA_VERSION,
        family: None,
        params: *params,
        n,
        rows: vec![row_for(&state.profile, state.t)],
        snapshots: Vec::new(),
        halt: HaltReason::ReachedEnd,
        error: None,
        backward_time_bound: None,
        steps: 0,
    };
    if params.keep_snapshots {
        report.snapshots.push(state.profile.clone());
    }
    let mut pending = ReportRow { max_residual: 0.0, dt_min: f64::INFINITY, capped: false, ..report.rows[0] };
    let mut marks = 1u64;
    let mut next_mark = params.t_start + params.snapshot_every;

    loop {
        if state.t >= params.t_end {
            report.halt = HaltReason::ReachedEnd;
            break;
        }
        if state.profile.inradius() < params.stop_inradius {
            report.halt = HaltReason::Inradius;
            break;
        }
        let target = next_mark.min(params.t_end);
        let dt_cfl = match stepper.cfl_dt(&state, params.cfl) {
            Ok(dt) => dt,
            Err(e) => {
                abort(&mut report, e);
                break;
            }
        };
        let landing = dt_cfl >= target - state.t;
        let full = dt_cfl.min(target - state.t);
        let mut dt = full;
        let info = loop {
            match stepper.step(&mut state, dt) {
                Ok(info) => break Ok(info),
                Err(GcfError::StepRejected { .. }) if dt > MIN_STEP_FRACTION * dt_cfl => dt *= 0.5,
                Err(e) => break Err(e),
            }
        };
        let info = match info {
            Ok(info) => info,
            Err(e) => {
                abort(&mut report, e);
                break;
            }
        };
        report.steps += 1;
        if landing && info.dt == full {
            state.t = target;
        }
        pending.max_residual = pending.max_residual.max(info.local_error);
        // Steps shortened only to land on a row time say nothing about stability.
        pending.dt_min = pending.dt_min.min(if landing && info.dt == full { dt_cfl } else { info.dt });
        pending.capped |= info.capped;
        if state.t >= target {
            if state.t >= next_mark {
                marks += 1;
                next_mark = params.t_start + marks as f64 * params.snapshot_every;
            }
            push_row(&mut report, &state, &mut pending, params.keep_snapshots);
        }
    }
    if report.last().t < state.t {
        push_row(&mut report, &state, &mut pending, params.keep_snapshots);
    }
    Ok(report)
}

fn push_row(report: &mut FlowReport, state: &FlowState, pending: &mut ReportRow, keep: bool) {
    let mut row = row_for(&state.profile, state.t);
    row.max_residual = pending.max_residual;
    row.dt_min = pending.dt_min;
    row.capped = pending.capped;
    report.rows.push(row);
    if keep {
        report.snapshots.push(state.profile.clone());
    }
    *pending = ReportRow { max_residual: 0.0, dt_min: f64::INFINITY, capped: false, ..row };
}

fn abort(report: &mut FlowReport, e: GcfError) {
    report.halt = HaltReason::Aborted;
    report.error = Some(e.to_string());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{sphere_profile, SphereSolution};
    use crate::convex::Axis;

    #[test]
    fn sphere_extinction_time() {
        for alpha in [1.0, 2.0] {
            let p = sphere_profile(1.0, 128, Axis::E1).unwrap();
            let params = FlowParams::new(alpha, 0.0, 1.0).with_snapshot_every(0.05);
            let report = evolve(p, &params).unwrap();
            assert_eq!(report.halt, HaltReason::Inradius);
            let exact = SphereSolution::new(alpha, 1.0).unwrap().extinction_time();
            assert!((report.last().t / exact - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn rows_strictly_increase_and_land_on_marks() {
        let p = sphere_profile(1.0, 64, Axis::E3).unwrap();
        let params = FlowParams::new(1.0, 0.0, 0.1).with_snapshot_every(0.01);
        let report = evolve(p, &params).unwrap();
        assert_eq!(report.rows.len(), 11);
        assert_eq!(report.snapshots.len(), 11);
        assert!(report.rows.windows(2).all(|w| w[1].t > w[0].t));
        for (m, row) in report.rows.iter().enumerate() {
            assert!((row.t - 0.01 * m as f64).abs() < 1e-12);
        }
        let json = report.to_json();
        assert_eq!(FlowReport::from_json(&json).unwrap(), report);
        assert!(report.to_csv().starts_with("t,h,l,V,minR,maxResidual,dtMin,capped\n"));
    }

    #[test]
    fn rejects_invalid_params() {
        let p = sphere_profile(1.0, 64, Axis::E3).unwrap();
        assert!(evolve(p.clone(), &FlowParams::new(0.5, 0.0, 1.0)).is_err());
        assert!(evolve(p.clone(), &FlowParams::new(1.0, 0.0, 1.0).with_cfl(0.7)).is_err());
        assert!(evolve(p, &FlowParams::new(1.0, 1.0, 0.0)).is_err());
    }
}
