use num_complex::Complex;
use proptest::prelude::*;

use super::*;
use crate::action_angle::{compute_reference, ActionAnglePoint};
use crate::duffing::DuffingParams;
use crate::scalar::loglog_slope;

fn lacunary() -> CoefficientSignal<f64> {
    CoefficientSignal::lacunary(0.6, 1.0, 12).unwrap()
}

fn sigma_ladder() -> Vec<f64> {
    (3..=9).map(|k| 2f64.powi(-k)).collect()
}

#[test]
fn multiplier_shape() {
    let k = SmoothingKernel::<f64>::default();
    assert_eq!(k.multiplier(0.0), 1.0);
    assert_eq!(k.multiplier(0.5), 1.0);
    assert_eq!(k.multiplier(-0.3), 1.0);
    assert_eq!(k.multiplier(1.0), 0.0);
    assert_eq!(k.multiplier(7.0), 0.0);
    assert!((k.multiplier(0.75) - 0.5).abs() < 1e-15);
    let mut prev = 1.0;
    for i in 0..=1000 {
        let v = k.multiplier(0.5 + 0.5 * i as f64 / 1000.0);
        assert!(v <= prev && (0.0..=1.0).contains(&v));
        prev = v;
    }
    // Flat at both junctions.
    let h = 1e-3;
    assert!((1.0 - k.multiplier(0.5 + h)).abs() < 1e-100);
    assert!(k.multiplier(1.0 - h).abs() < 1e-100);
    assert!(SmoothingKernel::new(1.0, 0.5).is_err());
}

#[test]
fn constants_and_low_modes_are_kept() {
    let k = SmoothingKernel::default();
    let c = CoefficientSignal::constant(2.5);
    let s = smooth(&c, 3.0, &k).unwrap();
    for t in [0.0, 0.3, 0.77] {
        assert_eq!(s.eval(t), 2.5);
    }
    let cos = CoefficientSignal::fourier(vec![FourierMode::new(1, 1.0, 0.0)], SignalClass::Holder(1.0)).unwrap();
    let s = smooth(&cos, 0.4, &k).unwrap();
    for i in 0..50 {
        let t = i as f64 / 50.0;
        assert_eq!(s.eval(t), cos.eval(t));
    }
    assert!(smooth(&cos, 0.0, &k).is_err());
}

#[test]
fn sample_resolution_is_checked() {
    let k = SmoothingKernel::default();
    let values: Vec<f64> = (0..16).map(|i| (i as f64 / 16.0 * std::f64::consts::TAU).cos()).collect();
    let f = CoefficientSignal::samples(values, SignalClass::Holder(1.0)).unwrap();
    assert_eq!(
        smooth(&f, 0.01, &k),
        Err(Error::InsufficientSamples {
            required: 201,
            available: 16
        })
    );
    assert!(smooth(&f, 0.2, &k).is_ok());
}

#[test]
fn lacunary_error_decays_at_holder_rate() {
    let f = lacunary();
    let k = SmoothingKernel::default();
    let sigmas = sigma_ladder();
    let errs: Vec<f64> = sigmas
        .iter()
        .map(|&s| sup_error(&f, &smooth(&f, s, &k).unwrap(), 2048))
        .collect();
    let slope = loglog_slope(&sigmas, &errs);
    assert!((slope - 0.6).abs() < 0.1, "slope {slope}, errors {errs:?}");
}

#[test]
fn frozen_constant_covers_both_estimates() {
    // C is calibrated at the coarsest sigma for the sup-norm and the
    // two-scale strip estimate, then frozen (safety factor 2).
    let f = lacunary();
    let k = SmoothingKernel::default();
    let norm = holder_norm_estimate(&f, 0.6, 4096);
    let grid = StripGrid {
        real_points: 512,
        imag_levels: 3,
    };
    let two_scale = |sigma: f64| {
        let coarse = smooth(&f, sigma, &k).unwrap();
        let fine = smooth(&f, 0.5 * sigma, &k).unwrap();
        let diff = AnalyticApproximation {
            sigma,
            modes: coarse
                .modes()
                .iter()
                .map(|m| FourierMode::new(m.frequency, -m.cos, -m.sin))
                .chain(fine.modes().iter().copied())
                .collect::<Vec<_>>(),
        };
        strip_bound(&diff, 0.5 * sigma, &grid)
    };
    let sup = |sigma: f64| sup_error(&f, &smooth(&f, sigma, &k).unwrap(), 2048);
    let sigmas = sigma_ladder();
    let s0 = sigmas[0];
    let scale = |s: f64| norm * s.powf(0.6);
    let c = 2.0 * (sup(s0) / scale(s0)).max(two_scale(s0) / scale(s0));
    for &s in &sigmas {
        assert!(sup(s) <= c * scale(s), "sup at {s}");
        assert!(two_scale(s) <= c * scale(s), "strip at {s}");
    }
}

#[test]
fn strip_bounds() {
    let k = SmoothingKernel::default();
    let grid = StripGrid::default();
    let c = smooth(&CoefficientSignal::constant(-1.5_f64), 0.1, &k).unwrap();
    assert!((strip_bound(&c, 0.1, &grid) - 1.5).abs() < 1e-15);
    let cos = CoefficientSignal::fourier(vec![FourierMode::new(1, 1.0, 0.0)], SignalClass::Holder(1.0)).unwrap();
    let s = smooth(&cos, 0.3, &k).unwrap();
    for width in [0.05, 0.1, 0.3] {
        let oracle = (std::f64::consts::TAU * width).cosh();
        assert!((strip_bound(&s, width, &grid) - oracle).abs() < 1e-10);
    }
    let f = lacunary();
    let norm = holder_norm_estimate(&f, 0.6, 4096);
    for sigma in sigma_ladder() {
        let approx = smooth(&f, sigma, &k).unwrap();
        assert!(strip_bound(&approx, sigma, &grid) < 10.0 * norm);
    }
}

#[test]
fn realness_on_the_real_axis() {
    let approx = smooth(&lacunary(), 0.01, &SmoothingKernel::default()).unwrap();
    for i in 0..64 {
        let t = i as f64 / 64.0;
        let z = approx.eval_complex(Complex::new(t, 0.0));
        assert!(z.im.abs() < 1e-14);
        assert!((z.re - approx.eval(t)).abs() < 1e-12);
        let w = approx.eval_complex(Complex::new(t + 3.0, 0.004));
        assert!((w - approx.eval_complex(Complex::new(t, 0.004))).norm() < 1e-9);
    }
    let back = approx.to_signal();
    assert!((back.eval(0.3) - approx.eval(0.3)).abs() < 1e-12);
}

fn mode_strategy() -> impl Strategy<Value = Vec<(u32, f64, f64)>> {
    prop::collection::vec((0u32..64, -1.0..1.0f64, -1.0..1.0f64), 1..8)
}

fn signal(modes: &[(u32, f64, f64)]) -> CoefficientSignal<f64> {
    CoefficientSignal::fourier(
        modes.iter().map(|&(q, c, s)| FourierMode::new(q, c, s)).collect(),
        SignalClass::Holder(1.0),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn smoothing_is_linear(fm in mode_strategy(), gm in mode_strategy(), a in -2.0..2.0f64, b in -2.0..2.0f64, sigma in 0.01..0.5f64, t in 0.0..1.0f64) {
        let k = SmoothingKernel::default();
        let (f, g) = (signal(&fm), signal(&gm));
        let combo = smooth(&f.linear_combination(a, &g, b), sigma, &k).unwrap();
        let sf = smooth(&f, sigma, &k).unwrap();
        let sg = smooth(&g, sigma, &k).unwrap();
        prop_assert!((combo.eval(t) - (a * sf.eval(t) + b * sg.eval(t))).abs() < 1e-12);
        // Periodicity.
        prop_assert!((sf.eval(t) - sf.eval(t + 1.0)).abs() < 1e-12);
    }
}

fn split_params(n: usize) -> DuffingParams<f64> {
    let mut coefs = vec![CoefficientSignal::zero(); 2 * n + 1];
    for (i, coef) in coefs.iter_mut().enumerate() {
        *coef = if i > n {
            CoefficientSignal::lacunary(0.6, 0.5, 12).unwrap()
        } else {
            CoefficientSignal::fourier(vec![FourierMode::new(1, 0.2, 0.1)], SignalClass::Holder(1.0)).unwrap()
        };
    }
    DuffingParams::new(n, coefs).unwrap()
}

#[test]
fn unforced_split_vanishes() {
    let chart = compute_reference(2, 1e-10).unwrap();
    let params = DuffingParams::unforced(2).unwrap();
    let split = split_perturbation(&params, &chart, 100.0, 0.05, SplitGrid::default()).unwrap();
    assert_eq!(split.report.sup_remainder, 0.0);
    assert_eq!(split.report.sup_smooth, 0.0);
}

#[test]
fn split_condition_is_enforced() {
    let chart = compute_reference(1, 1e-10).unwrap();
    let params = split_params(1);
    assert!(matches!(
        split_perturbation(&params, &chart, 10.0, 0.05, SplitGrid::default()),
        Err(Error::SplitCondition { .. })
    ));
    let wrong = split_params(2);
    assert!(split_perturbation(&wrong, &chart, 100.0, 0.05, SplitGrid::default()).is_err());
}

#[test]
fn split_recombines_to_the_full_perturbation() {
    let chart = compute_reference(2, 1e-10).unwrap();
    let params = split_params(2);
    let split = split_perturbation(&params, &chart, 50.0, 0.5, SplitGrid::default()).unwrap();
    assert!((split.smoothing_scale() - (0.5f64 / 50.0).powf(1.0 / 0.6)).abs() < 1e-15);
    for (lambda, theta, t) in [(1.0, 0.1, 0.2), (2.5, 0.7, 0.9), (4.0, 0.33, 0.5)] {
        let p = ActionAnglePoint { lambda, theta };
        let (_, r) = chart.hamiltonian_pieces(&params, 50.0, p, t).unwrap();
        assert!((split.total(p, t) - r).abs() < 1e-12 * r.abs().max(1.0));
        let z = split.smooth_part_complex(p, Complex::new(t, 0.0));
        assert!((z.re - split.smooth_part(p, t)).abs() < 1e-12);
    }
}

#[test]
fn remainder_stays_below_frozen_multiple_of_eps0() {
    // n = 1: epsilon = eps0^{1/gamma} is independent of A and the smoothing
    // residual is the dominant part of the remainder.
    let chart = compute_reference(1, 1e-10).unwrap();
    let params = split_params(1);
    let eps0 = 0.1;
    let ladder = [100.0, 200.0, 400.0, 1000.0, 3000.0, 10_000.0];
    let sups: Vec<f64> = ladder
        .iter()
        .map(|&a| split_perturbation(&params, &chart, a, eps0, SplitGrid::default()).unwrap().report.sup_remainder)
        .collect();
    let c = 2.0 * sups[0] / eps0;
    for s in &sups {
        assert!(*s <= c * eps0);
    }
}

#[test]
fn smooth_part_grows_like_amplitude_power() {
    let chart = compute_reference(2, 1e-10).unwrap();
    let params = split_params(2);
    let ladder = [100.0, 200.0, 400.0, 1000.0, 2000.0, 4000.0, 10_000.0];
    let sups: Vec<f64> = ladder
        .iter()
        .map(|&a| split_perturbation(&params, &chart, a, 0.05, SplitGrid::default()).unwrap().report.sup_smooth)
        .collect();
    let slope = loglog_slope(&ladder, &sups);
    assert!((slope - 1.0).abs() < 0.15, "slope {slope}");
}
