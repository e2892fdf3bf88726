use super::*;
use std::f64::consts::PI;

fn riccati() -> FnField<impl Fn(f64, &[f64; 1]) -> [f64; 1] + Sync> {
    FnField(|_t: f64, u: &[f64; 1]| [1.0 + u[0] * u[0]])
}

#[test]
fn tangent_to_pi_over_eight() {
    let opts = SegmentOptions::default();
    let res = integrate_segment(&riccati(), 0.0, PI / 8.0, [0.0], &opts).unwrap();
    let SegmentOutcome::Reached { t, u } = res.outcome else {
        panic!("escaped: {:?}", res.outcome)
    };
    assert_eq!(t, PI / 8.0);
    assert!((u[0] - (2f64.sqrt() - 1.0)).abs() < 1e-9, "{}", u[0]);
}

#[test]
fn constant_field_is_exact() {
    let field = FnField(|_t: f64, _u: &[f64; 2]| [0.0, 0.0]);
    let res = integrate_segment(&field, 0.3, -7.1, [2.5, -1.0], &SegmentOptions::default()).unwrap();
    assert_eq!(res.outcome, SegmentOutcome::Reached { t: -7.1, u: [2.5, -1.0] });
}

#[test]
fn backward_harmonic_oscillator() {
    let field = FnField(|_t: f64, u: &[f64; 2]| [u[1], -u[0]]);
    let res = integrate_segment(&field, 0.0, -3.0, [1.0, 0.0], &SegmentOptions::default()).unwrap();
    let u = res.outcome.state();
    assert!((u[0] - 3f64.cos()).abs() < 1e-9);
    assert!((u[1] - 3f64.sin()).abs() < 1e-9);
}

#[test]
fn lands_exactly_on_endpoint() {
    let field = FnField(|t: f64, _u: &[f64; 1]| [t.cos()]);
    let t_to = 1.0 / 3.0;
    let mut last_t = f64::NAN;
    let res = integrate_segment_observed(&field, 0.0, t_to, [0.0], &SegmentOptions::default(), |t, _| {
        last_t = t
    })
    .unwrap();
    assert_eq!(res.outcome.time(), t_to);
    assert_eq!(last_t, t_to);
    assert!((res.outcome.state()[0] - t_to.sin()).abs() < 1e-11);
}

#[test]
fn dense_output_tracks_solution() {
    let field = FnField(|_t: f64, u: &[f64; 2]| [u[1], -u[0]]);
    let opts = SegmentOptions::default().with_dense(true);
    let res = integrate_segment(&field, 0.0, 10.0, [0.0, 1.0], &opts).unwrap();
    let dense = res.dense.unwrap();
    assert_eq!(dense.start(), Some(0.0));
    assert_eq!(dense.end(), Some(10.0));
    for i in 0..=200 {
        let t = 10.0 * i as f64 / 200.0;
        let u = dense.eval(t).unwrap();
        assert!((u[0] - t.sin()).abs() < 1e-8, "t={t}");
    }
}

#[test]
fn dense_output_backward() {
    let field = FnField(|_t: f64, u: &[f64; 1]| [u[0]]);
    let opts = SegmentOptions::default().with_dense(true);
    let res = integrate_segment(&field, 1.0, -1.0, [1.0], &opts).unwrap();
    let dense = res.dense.unwrap();
    for i in 0..=50 {
        let t = 1.0 - 2.0 * i as f64 / 50.0;
        let u = dense.eval(t).unwrap();
        assert!((u[0] - (t - 1.0).exp()).abs() < 1e-9);
    }
}

#[test]
fn blow_up_is_reported_as_escape() {
    let opts = SegmentOptions::default();
    // u = tan(t + pi/4) blows up at t = pi/4.
    let res = integrate_segment(&riccati(), 0.0, 1.0, [1.0], &opts).unwrap();
    match res.outcome {
        SegmentOutcome::Escaped { t, u, cause } => {
            assert_eq!(cause, EscapeCause::Radius);
            assert!(t < PI / 4.0 && t > PI / 4.0 - 1e-3, "t={t}");
            assert!(u[0] >= 1e8);
        }
        other => panic!("expected escape, got {other:?}"),
    }
}

#[test]
fn underflow_reported_when_radius_is_unreachable() {
    let mut opts = SegmentOptions::default();
    opts.escape_radius = f64::INFINITY;
    let res = integrate_segment(&riccati(), 0.0, 1.0, [1.0], &opts).unwrap();
    assert!(matches!(res.outcome, SegmentOutcome::Escaped { .. }), "{:?}", res.outcome);
    assert!(res.outcome.time() < PI / 4.0 + 1e-6);
}

#[test]
fn invalid_tolerance_rejected() {
    let opts = SegmentOptions::new(Tolerances::new(0.0, 1e-12), 1e8);
    let err = integrate_segment(&riccati(), 0.0, 1.0, [0.0], &opts).unwrap_err();
    assert!(matches!(err, crate::Error::InvalidTolerance { .. }));
    let opts = SegmentOptions::new(Tolerances::new(1e-10, f64::NAN), 1e8);
    assert!(integrate_segment(&riccati(), 0.0, 1.0, [0.0], &opts).is_err());
}

#[test]
fn eighth_order_convergence() {
    // With a fixed tolerance ladder the global error must follow the
    // tolerance, proving the tableau is wired correctly.
    let field = FnField(|_t: f64, u: &[f64; 2]| [u[1], -u[0] * u[0] * u[0]]);
    let reference = {
        let opts = SegmentOptions::new(Tolerances::uniform(1e-15), 1e8);
        integrate_segment(&field, 0.0, 20.0, [1.0, 0.0], &opts).unwrap().outcome.state()
    };
    let mut prev = f64::INFINITY;
    for tol in [1e-6, 1e-8, 1e-10] {
        let opts = SegmentOptions::new(Tolerances::uniform(tol), 1e8);
        let u = integrate_segment(&field, 0.0, 20.0, [1.0, 0.0], &opts).unwrap().outcome.state();
        let err = (u[0] - reference[0]).abs() + (u[1] - reference[1]).abs();
        assert!(err < 1e3 * tol, "tol={tol} err={err}");
        assert!(err < prev);
        prev = err;
    }
}

#[test]
fn f32_instantiation() {
    let field = FnField(|_t: f32, u: &[f32; 2]| [u[1], -u[0]]);
    let opts = SegmentOptions::new(Tolerances::uniform(1e-6_f32), 1e6);
    let u = integrate_segment(&field, 0.0, 1.0, [1.0, 0.0], &opts).unwrap().outcome.state();
    assert!((u[0] - 1f32.cos()).abs() < 1e-4);
}
