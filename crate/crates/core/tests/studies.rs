use gcflab::closed_forms::{paperclip_support, Paperclip};
use gcflab::convex::{Axis, SupportProfile};
use gcflab::flow::{pancake_initial, run, FlowParams, FlowState, Stepper};
use gcflab::verify::{
    check_ratio_preserved, check_ratio_profile, check_speed_lower, check_speed_monotone, check_tip_speed,
    ratio_pde_residual, verify_report, RatioField, DEFAULT_BARRIER_B,
};

/// Profile of pancake `j = 5` at `t = -3` and one small step beyond it.
fn pancake_pair(n: usize) -> (SupportProfile, f64, SupportProfile, f64) {
    let schedule = pancake_initial(5, n).unwrap();
    let params = FlowParams::new(1.0, -5.0, -3.0).with_snapshot_every(2.0);
    let report = run(&schedule, &params).unwrap();
    let before = report.snapshots.last().unwrap().clone();
    let t0 = report.last().t;
    let mut state = FlowState::new(t0, before.clone());
    let mut stepper = Stepper::new(1.0, n);
    let dt = stepper.cfl_dt(&state, 0.2).unwrap();
    stepper.step(&mut state, dt).unwrap();
    (before, t0, state.profile, state.t)
}

#[test]
fn ratio_pde_residual_halves_under_refinement() {
    let coarse = {
        let (a, t0, b, t1) = pancake_pair(256);
        ratio_pde_residual(&a, t0, &b, t1).unwrap()
    };
    let fine = {
        let (a, t0, b, t1) = pancake_pair(512);
        ratio_pde_residual(&a, t0, &b, t1).unwrap()
    };
    assert!(coarse.residual >= 2.0 * fine.residual, "{} -> {}", coarse.residual, fine.residual);
    assert!(fine.residual <= fine.dx + fine.dt);
}

#[test]
fn paperclip_ratio_from_support_matches_closed_form() {
    // The tip layer has width about e^t in psi and needs several cells.
    for (t, n) in [(-5.0, 4096), (-3.0, 1024), (-1.0, 1024), (-0.5, 1024)] {
        let field = RatioField::from_profile(&paperclip_support(t, n).unwrap());
        let clip = Paperclip::new(t).unwrap();
        let worst = field
            .psi
            .iter()
            .zip(&field.ratio)
            .map(|(psi, r)| {
                let (k1, k2) = clip.revolution_curvatures(*psi);
                (r - k1 / k2).abs() / (k1 / k2)
            })
            .fold(0.0, f64::max);
        assert!(worst <= 1e-3, "t = {t}: {worst}");
    }
}

#[test]
fn prolate_witness_fails_ratio_check() {
    let prolate =
        SupportProfile::from_fn(Axis::E1, 256, |psi| (4.0 * psi.cos().powi(2) + psi.sin().powi(2)).sqrt()).unwrap();
    let r = check_ratio_profile(&prolate, 0.0);
    assert!(!r.pass && r.margin < -0.5);
    let oblate =
        SupportProfile::from_fn(Axis::E1, 256, |psi| (psi.cos().powi(2) + 4.0 * psi.sin().powi(2)).sqrt()).unwrap();
    assert!(check_ratio_profile(&oblate, 0.0).pass);
}

#[test]
fn short_pancake_run_passes_its_suite() {
    let schedule = pancake_initial(3, 128).unwrap();
    let report = run(&schedule, &FlowParams::new(1.0, -3.0, -2.0).with_snapshot_every(0.1)).unwrap();
    assert!(check_ratio_preserved(&report).pass);
    let results = verify_report(&report, DEFAULT_BARRIER_B);
    for r in &results {
        assert!(!r.failed(), "{r:?}");
    }
    assert!(results.iter().any(|r| r.check == "volume_rate" && r.applicable));
}

fn sausage_report(i: u32, n: usize, t_end: f64) -> gcflab::flow::FlowReport {
    let schedule = gcflab::flow::sausage_initial(i, 0.75, n).unwrap();
    run(&schedule, &FlowParams::new(0.75, 0.0, t_end).with_snapshot_every(0.02)).unwrap()
}

#[test]
fn short_sausage_run_passes_speed_checks() {
    let report = sausage_report(4, 256, 0.1);
    for r in [check_speed_lower(&report), check_speed_monotone(&report), check_tip_speed(&report)] {
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn large_sphere_violates_speed_lower_bound() {
    // K^alpha = 2^(-3/2) < |cos psi| near the axis.
    let report = run_sphere(2.0, 0.75);
    let r = check_speed_lower(&report);
    assert!(!r.pass && r.margin < -0.5, "{r:?}");
    assert!(check_speed_monotone(&report).pass);
}

fn run_sphere(rho: f64, alpha: f64) -> gcflab::flow::FlowReport {
    let p = gcflab::closed_forms::sphere_profile(rho, 128, Axis::E3).unwrap();
    gcflab::flow::evolve(p, &FlowParams::new(alpha, 0.0, 0.1).with_snapshot_every(0.05)).unwrap()
}
