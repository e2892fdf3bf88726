//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if
//! any criterion fails. Run with `cargo test --release --test acceptance`.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use impulsive_duffing::action_angle::{
    compute_reference, period_by_quadrature, period_by_return_time, ActionAnglePoint, ReferenceChart,
};
use impulsive_duffing::diagnostics::{
    boundedness_sweep, invariant_circle_detect, rotation_number, seed_for_action, twist_profile, CircleOptions,
};
use impulsive_duffing::duffing::{
    duffing_system, CoefficientSignal, DuffingField, DuffingParams, FourierMode, ImpulseEntry, SignalClass,
};
use impulsive_duffing::impulsive::{solve_ivp, IvpOptions, Termination};
use impulsive_duffing::ode::{SegmentOptions, Tolerances};
use impulsive_duffing::poincare::{MapOptions, TimeOneMap, FD_STEP};
use impulsive_duffing::scalar::{loglog_slope, wrap_centered, wrap_unit};
use impulsive_duffing::scenario::{Model, RiccatiModel, Scenario};
use impulsive_duffing::smoothing::{smooth, split_perturbation, sup_error, SmoothingKernel, SplitGrid};

type Outcome = Result<String, String>;

fn scenario(name: &str) -> Scenario {
    let path = format!("{}/../../scenarios/{name}.toml", env!("CARGO_MANIFEST_DIR"));
    Scenario::load(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn riccati(s: &Scenario) -> &RiccatiModel {
    match &s.model {
        Model::Riccati(r) => r,
        Model::Duffing(_) => panic!("{} is not a Riccati scenario", s.name),
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn closed_form_solution() -> Outcome {
    let s = scenario("riccati-jumps");
    let model = riccati(&s);
    let system = model.system().map_err(|e| e.to_string())?;
    let opts: IvpOptions<f64> = SegmentOptions::new(Tolerances::new(1e-13, 1e-13), 1e8).into();
    let traj = solve_ivp(&system, 0.0, [0.0], (0.0, TAU), &opts).map_err(|e| e.to_string())?;
    let quarter = model.period;
    let samples = 10_000;
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        // Offset by half a step so no sample sits on an impulse instant.
        let t = (i as f64 + 0.5) * TAU / samples as f64;
        let j = ((t / quarter).ceil() - 1.0).max(0.0);
        let u = traj.value_at(t).ok_or(format!("no value at t = {t}"))?[0];
        worst = worst.max((u - (t - j * quarter).tan()).abs());
    }
    check(worst <= 1e-8, format!("max |u - tan(t - j pi/4)| = {worst:.2e} (tol 1e-8)"))
}

fn non_continuable() -> Outcome {
    let s = scenario("riccati-jumps");
    let system = riccati(&s).system().map_err(|e| e.to_string())?;
    let opts: IvpOptions<f64> = SegmentOptions::new(s.tolerances, 1e8).into();
    let traj = solve_ivp(&system, 0.0, [1.0], (0.0, 1.0), &opts).map_err(|e| e.to_string())?;
    let end = traj.right;
    let ok = end.reason == Termination::Escape && end.time < FRAC_PI_4 && end.time >= FRAC_PI_4 - 1e-3;
    check(
        ok,
        format!("right end {:?} at t = {:.9} (pi/4 = {:.9})", end.reason, end.time, FRAC_PI_4),
    )
}

fn reference_chart() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in 1..=3 {
        let chart = compute_reference::<f64>(n, 1e-12).map_err(|e| e.to_string())?;
        let residual = chart.level_residual();
        let quad = period_by_quadrature::<f64>(n, 1e-12).map_err(|e| e.to_string())?;
        let ret = period_by_return_time(n, 1e-12).map_err(|e| e.to_string())?;
        let gap = (quad - ret).abs();
        ok &= residual <= 1e-10 && gap <= 1e-9;
        parts.push(format!("n={n}: residual {residual:.1e}, period gap {gap:.1e}"));
    }
    check(ok, format!("{} (tol 1e-10, 1e-9)", parts.join("; ")))
}

fn chart_round_trip() -> Outcome {
    let chart = compute_reference::<f64>(1, 1e-12).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut trip: f64 = 0.0;
    for _ in 0..1000 {
        let p = ActionAnglePoint {
            lambda: rng.gen_range(1.0..4.0),
            theta: rng.gen_range(0.0..1.0),
        };
        let q = chart.to_action_angle(chart.from_action_angle(p)).map_err(|e| e.to_string())?;
        trip = trip.max((q.lambda - p.lambda).abs()).max(wrap_centered(q.theta - p.theta).abs());
    }
    let h = 1e-6;
    let f = |lambda: f64, theta: f64| chart.from_action_angle(ActionAnglePoint { lambda, theta });
    let mut det_dev: f64 = 0.0;
    for i in 0..32 {
        for j in 0..32 {
            let lambda = 1.0 + 3.0 * j as f64 / 31.0;
            let theta = (i as f64 + 0.5) / 32.0;
            let (tp, tm) = (f(lambda, theta + h), f(lambda, theta - h));
            let (lp, lm) = (f(lambda + h, theta), f(lambda - h, theta));
            let det = ((tp[0] - tm[0]) * (lp[1] - lm[1]) - (lp[0] - lm[0]) * (tp[1] - tm[1])) / (4.0 * h * h);
            det_dev = det_dev.max((det - 1.0).abs());
        }
    }
    check(
        trip <= 1e-9 && det_dev <= 1e-7,
        format!("round trip {trip:.1e} (tol 1e-9), |det - 1| {det_dev:.1e} (tol 1e-7)"),
    )
}

fn area_preservation() -> Outcome {
    let s = scenario("remark-2.1-basic");
    let map = s
        .duffing()
        .ok_or("not a Duffing scenario")?
        .time_one_map(s.map_options())
        .map_err(|e| e.to_string())?;
    let (mut det_dev, mut fd_gap): (f64, f64) = (0.0, 0.0);
    let grid = s.area_grid.points();
    for &p in &grid {
        let var = map.jacobian(p).map_err(|e| format!("{e:?}"))?;
        let fd = map.jacobian_fd(p, FD_STEP).map_err(|e| format!("{e:?}"))?;
        det_dev = det_dev.max((var.determinant - 1.0).abs());
        for r in 0..2 {
            for c in 0..2 {
                fd_gap = fd_gap.max((var.matrix[r][c] - fd.matrix[r][c]).abs());
            }
        }
    }
    check(
        grid.len() == 100 && det_dev <= 1e-6 && fd_gap <= 1e-5,
        format!(
            "{} points, |det - 1| {det_dev:.1e} (tol 1e-6), variational vs fd {fd_gap:.1e} (tol 1e-5)",
            grid.len()
        ),
    )
}

fn smoothing_rate() -> Outcome {
    let f = CoefficientSignal::lacunary(0.6, 1.0, 12).map_err(|e| e.to_string())?;
    let kernel = SmoothingKernel::default();
    let sigmas: Vec<f64> = (3..=9).map(|k| 2f64.powi(-k)).collect();
    let errors = sigmas
        .iter()
        .map(|&s| smooth(&f, s, &kernel).map(|a| sup_error(&f, &a, 2048)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let slope = loglog_slope(&sigmas, &errors);
    check((slope - 0.6).abs() <= 0.1, format!("slope {slope:.3} (target 0.6 +- 0.1)"))
}

/// Degree-2 forcing with smooth low-order and lacunary high-order terms.
fn split_params() -> DuffingParams<f64> {
    let n = 2;
    let coefs = (0..=2 * n)
        .map(|i| {
            if i > n {
                CoefficientSignal::lacunary(0.6, 0.5, 12)
            } else {
                CoefficientSignal::fourier(vec![FourierMode::new(1, 0.2, 0.1)], SignalClass::Holder(1.0))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .expect("valid signals");
    DuffingParams::new(n, coefs).expect("valid params")
}

fn perturbation_scaling() -> Outcome {
    let n = 2;
    let chart = compute_reference::<f64>(n, 1e-12).map_err(|e| e.to_string())?;
    let params = split_params();
    let amps = [1e2, 1e3, 1e4];
    let eps0 = 0.05;
    let mut sups = Vec::new();
    let mut remainders = Vec::new();
    let mut smooths = Vec::new();
    for &a in &amps {
        let mut m: f64 = 0.0;
        for j in 0..7 {
            for i in 0..32 {
                for k in 0..8 {
                    let p = ActionAnglePoint {
                        lambda: 1.0 + 0.5 * j as f64,
                        theta: i as f64 / 32.0,
                    };
                    let (_, r) = chart.hamiltonian_pieces(&params, a, p, k as f64 / 8.0).map_err(|e| e.to_string())?;
                    m = m.max(r.abs());
                }
            }
        }
        sups.push(m);
        let split = split_perturbation(&params, &chart, a, eps0, SplitGrid::default()).map_err(|e| e.to_string())?;
        remainders.push(split.report.sup_remainder);
        smooths.push(split.report.sup_smooth);
    }
    let slope = loglog_slope(&amps, &sups);
    // Constants frozen at the smallest amplitude, with a factor 2 margin.
    let c_rem = 2.0 * remainders[0] / eps0;
    let c_smooth = 2.0 * smooths[0] / amps[0].powi(n as i32 - 1);
    let bound_rem = remainders.iter().all(|&r| r <= c_rem * eps0);
    let bound_smooth = smooths
        .iter()
        .zip(&amps)
        .all(|(&s, &a)| s <= c_smooth * a.powi(n as i32 - 1));
    check(
        (slope - (n as f64 - 1.0)).abs() <= 0.15 && bound_rem && bound_smooth,
        format!(
            "n={n}: sup|R| slope {slope:.3} (target 1 +- 0.15); remainder <= C eps0: {bound_rem}; smooth part <= C A^(n-1): {bound_smooth}"
        ),
    )
}

fn jump_smallness() -> Outcome {
    let chart = compute_reference::<f64>(1, 1e-12).map_err(|e| e.to_string())?;
    let catalog = [
        ImpulseEntry::ConstantShift { alpha: 0.3 },
        ImpulseEntry::PolynomialKick {
            alpha: -0.2,
            betas: vec![0.1, 0.4],
        },
    ];
    let amps = [1e2, 2e2, 4e2, 8e2, 1.6e3, 3.2e3, 6.4e3, 1e4];
    let mut parts = Vec::new();
    let mut ok = true;
    for entry in &catalog {
        let (mut sup_l, mut sup_t) = (Vec::new(), Vec::new());
        for &a in &amps {
            let (mut ml, mut mt): (f64, f64) = (0.0, 0.0);
            for j in 0..7 {
                for i in 0..64 {
                    let p = ActionAnglePoint {
                        lambda: 1.0 + 0.5 * j as f64,
                        theta: i as f64 / 64.0,
                    };
                    let (dt, dl) = chart.jump_action_angle(a, entry, p).map_err(|e| e.to_string())?;
                    ml = ml.max(dl.abs());
                    mt = mt.max(dt.abs());
                }
            }
            sup_l.push(ml);
            sup_t.push(mt);
        }
        let (sl, st) = (loglog_slope(&amps, &sup_l), loglog_slope(&amps, &sup_t));
        ok &= (sl + 1.0).abs() <= 0.1 && (st + 1.0).abs() <= 0.1;
        parts.push(format!("{}: action slope {sl:.3}, angle slope {st:.3}", entry.tag()));
    }
    check(ok, format!("{} (target -1 +- 0.1)", parts.join("; ")))
}

/// Period of `x'' = -x^3` through `(a, 0)`: Simpson quadrature in
/// `x = a sin(phi)`, where the integrand is smooth.
fn cubic_period(a: f64) -> f64 {
    let h = a.powi(4) / 4.0;
    let f = |phi: f64| {
        let s = phi.sin();
        // 1 - s^4 = (1 - s^2)(1 + s^2) = cos^2 (1 + s^2).
        a / (2.0 * h * (1.0 + s * s)).sqrt()
    };
    let steps = 20_000;
    let width = std::f64::consts::FRAC_PI_2 / steps as f64;
    let mut acc = f(0.0) + f(std::f64::consts::FRAC_PI_2);
    for k in 1..steps {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * width);
    }
    4.0 * acc * width / 3.0
}

fn unforced_map(n: usize) -> Result<TimeOneMap<f64, DuffingField<f64>>, String> {
    let params = DuffingParams::unforced(n).map_err(|e| e.to_string())?;
    let system = duffing_system(params, vec![0.5], vec![ImpulseEntry::ConstantShift { alpha: 0.0 }])
        .map_err(|e| e.to_string())?;
    Ok(TimeOneMap::new(system, MapOptions::default())
        .map_err(|e| e.to_string())?
        .with_winding_degree(n))
}

fn rotation_oracle() -> Outcome {
    let chart = compute_reference::<f64>(1, 1e-12).map_err(|e| e.to_string())?;
    let map = unforced_map(1)?;
    let mut worst: f64 = 0.0;
    for a in [1.0, 1.5, 2.0, 2.5] {
        let est = rotation_number(&map, &chart, 1.0, [a, 0.0], 4096).map_err(|e| e.to_string())?;
        let oracle = wrap_unit(1.0 / cubic_period(a));
        worst = worst.max(wrap_centered(est.omega - oracle).abs());
    }
    let seeds = (0..7)
        .map(|k| seed_for_action(&chart, 1.0, 1.0 + 0.5 * k as f64, 0.0))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let profile = twist_profile(&map, &chart, 1.0, &seeds, 4096);
    check(
        worst <= 1e-6 && profile.monotone,
        format!("max |omega - 1/T mod 1| = {worst:.1e} (tol 1e-6), twist monotone on [1, 4]: {}", profile.monotone),
    )
}

fn boundedness() -> Outcome {
    let s = scenario("compliant");
    let model = s.duffing().ok_or("not a Duffing scenario")?;
    let map = model.time_one_map(s.map_options()).map_err(|e| e.to_string())?;
    let grid = s.grid.points();
    let report = boundedness_sweep(&map, &grid, s.horizons.iterates, s.escape_radius).map_err(|e| e.to_string())?;
    let escapes = report.outcomes.len() - (report.fraction_bounded * report.outcomes.len() as f64).round() as usize;
    let chart = ReferenceChart::compute(model.params.n(), 1e-12).map_err(|e| e.to_string())?;
    let options = CircleOptions {
        residual_tol: s.detection.residual_tol,
        order: s.detection.order,
        convergence_tol: s.detection.convergence_tol,
    };
    let seeds = s.seeds.seeds();
    let mut circles = 0;
    for &seed in &seeds {
        let verdict = invariant_circle_detect(&map, &chart, s.amplitude, seed, s.horizons.circle, &options)
            .map_err(|e| e.to_string())?;
        circles += usize::from(verdict.is_circle());
    }
    let fraction = circles as f64 / seeds.len() as f64;
    check(
        grid.len() == 400 && s.horizons.iterates == 10_000 && escapes == 0 && seeds.len() == 16 && fraction >= 0.3,
        format!(
            "{} points x {} iterates: {escapes} escapes; circles on {circles}/{} seeds (need >= 30%)",
            grid.len(),
            s.horizons.iterates,
            seeds.len()
        ),
    )
}

struct Criterion {
    label: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { label: "closed-form impulsive solution", budget: Duration::from_secs(1), run: closed_form_solution },
        Criterion { label: "non-continuability", budget: Duration::from_secs(1), run: non_continuable },
        Criterion { label: "reference chart", budget: Duration::from_secs(15), run: reference_chart },
        Criterion { label: "chart round trip", budget: Duration::from_secs(10), run: chart_round_trip },
        Criterion { label: "area preservation", budget: Duration::from_secs(30), run: area_preservation },
        Criterion { label: "smoothing rate", budget: Duration::from_secs(10), run: smoothing_rate },
        Criterion { label: "perturbation scaling", budget: Duration::from_secs(60), run: perturbation_scaling },
        Criterion { label: "jump smallness", budget: Duration::from_secs(10), run: jump_smallness },
        Criterion { label: "rotation oracle and twist", budget: Duration::from_secs(60), run: rotation_oracle },
        Criterion { label: "boundedness", budget: Duration::from_secs(600), run: boundedness },
    ];
    let mut failures = 0;
    for (k, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let (pass, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {:>2} {}: {detail} [{:.2} s, budget {} s{}]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            c.label,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
