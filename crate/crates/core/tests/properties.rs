use std::f64::consts::PI;

use gcflab::closed_forms::{frying_pan_residual, paperclip_curve, sphere_profile, Paperclip};
use gcflab::convex::io::ProfileRecord;
use gcflab::convex::{
    curvatures_from_support, displacements, enclosure_margin, volume, Axis, GridTrig, SupportProfile,
};
use gcflab::flow::{evaluate_speed, Execution, FlowState, Stepper, DEFAULT_SPEED_CAP};
use gcflab::translators::r_alpha_sq;
use gcflab::verify::{all_pass, r_alpha_sq_quadrature, CheckResult, Location, RatioField};
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![32usize, 64, 128, 256])
}

fn spheroid(a: f64, b: f64, n: usize) -> SupportProfile {
    SupportProfile::from_fn(Axis::E1, n, |psi| (a * a * psi.cos().powi(2) + b * b * psi.sin().powi(2)).sqrt()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sphere_radii_and_ratio(rho in 0.05f64..20.0, n in grid()) {
        let p = sphere_profile(rho, n, Axis::E3).unwrap();
        let f = curvatures_from_support(&p).unwrap();
        for k in 0..n {
            prop_assert!((f.a[k] - rho).abs() <= 1e-12 * rho);
            prop_assert!((f.b[k] - rho).abs() <= 1e-12 * rho);
        }
        let r = RatioField::from_profile(&p);
        prop_assert!(r.ratio.iter().all(|v| (v - 1.0).abs() <= 1e-12));
    }

    #[test]
    fn sphere_volume_and_displacements(rho in 0.1f64..10.0) {
        let p = sphere_profile(rho, 512, Axis::E1).unwrap();
        let v = volume(&p).unwrap();
        prop_assert!((v / (4.0 / 3.0 * PI * rho.powi(3)) - 1.0).abs() <= 1e-5);
        let d = displacements(&p);
        prop_assert!((d.h - rho).abs() <= 1e-12 * rho && (d.l - rho).abs() <= 1e-12 * rho);
    }

    #[test]
    fn enclosure_orders_nested_spheroids(a in 0.5f64..3.0, b in 0.5f64..3.0, grow in 1.001f64..2.0, n in grid()) {
        let inner = spheroid(a, b, n);
        let outer = spheroid(a * grow, b * grow, n);
        prop_assert!(enclosure_margin(&inner, &outer).unwrap() > 0.0);
        prop_assert!(enclosure_margin(&outer, &inner).unwrap() < 0.0);
        prop_assert_eq!(enclosure_margin(&inner, &inner).unwrap(), 0.0);
    }

    #[test]
    fn profile_text_formats_round_trip(a in 0.2f64..5.0, b in 0.2f64..5.0, t in -10.0f64..0.0, n in grid()) {
        let p = spheroid(a, b, n);
        let rec = ProfileRecord::new(&p, Some(t), Some(0.75));
        let from_json = ProfileRecord::from_json(&rec.to_json()).unwrap();
        let from_csv = ProfileRecord::from_csv(&rec.to_csv()).unwrap();
        prop_assert_eq!(&from_json, &rec);
        let back = from_csv.profile().unwrap();
        prop_assert_eq!(back.values(), p.values());
    }

    #[test]
    fn check_passes_iff_margin_within_tolerance(margin in -1.0f64..1.0, tol in 0.0f64..0.5) {
        let r = CheckResult::new("x", margin, Location::default(), tol);
        prop_assert_eq!(r.pass, margin >= -tol);
        prop_assert_eq!(all_pass(&[r.clone(), CheckResult::not_applicable("y", "none")]), r.pass);
    }

    #[test]
    fn paperclip_samples_satisfy_identity(t in -60.0f64..-0.05) {
        let c = paperclip_curve(t, 200).unwrap();
        prop_assert!(c.identity_residual() <= 1e-12);
        let clip = Paperclip::new(t).unwrap();
        prop_assert!(clip.l() >= clip.h());
    }

    #[test]
    fn frying_pan_is_an_inner_barrier(b in 0.05f64..=4.0, t in -60.0f64..=-1.0) {
        prop_assert!(frying_pan_residual(b, t).unwrap().max_residual < 0.0);
    }

    #[test]
    fn r_alpha_quadrature_matches_closed_form(alpha in 0.55f64..6.0) {
        prop_assert!((r_alpha_sq_quadrature(alpha) - r_alpha_sq(alpha)).abs() <= 1e-8);
    }

    #[test]
    fn sphere_stays_round_under_a_step(rho in 0.5f64..3.0, alpha in 0.55f64..3.0, n in grid()) {
        let mut state = FlowState::new(0.0, sphere_profile(rho, n, Axis::E3).unwrap());
        let mut stepper = Stepper::new(alpha, n);
        let dt = stepper.cfl_dt(&state, 0.2).unwrap();
        stepper.step(&mut state, dt).unwrap();
        let v = state.profile.values();
        prop_assert!(v.iter().all(|x| (x - v[0]).abs() <= 1e-13 * rho));
        prop_assert!(v[0] < rho);
    }

    #[test]
    fn execution_modes_agree_bitwise(a in 0.5f64..3.0, b in 0.5f64..3.0, alpha in 0.55f64..3.0, n in grid()) {
        let p = spheroid(a, b, n);
        let trig = GridTrig::new(n);
        let mut seq = vec![0.0; n];
        let s1 = evaluate_speed(p.values(), &trig, alpha, DEFAULT_SPEED_CAP, Execution::Sequential, &mut seq);
        let mut par = vec![0.0; n];
        let s2 = evaluate_speed(p.values(), &trig, alpha, DEFAULT_SPEED_CAP, Execution::default(), &mut par);
        prop_assert_eq!(seq, par);
        prop_assert_eq!(s1, s2);
    }
}
