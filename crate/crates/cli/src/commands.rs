use rayon::prelude::*;
use serde_json::json;

use impulsive_duffing::action_angle::{period_by_quadrature, period_by_return_time, ActionAnglePoint, ReferenceChart};
use impulsive_duffing::diagnostics::{
    boundedness_sweep, invariant_circle_detect, twist_profile, CircleOptions, CircleVerdict,
    PointOutcome,
};
use impulsive_duffing::duffing::{CoefficientSignal, DuffingField};
use impulsive_duffing::impulsive::{solve_ivp, ImpulsiveSystem, IvpOptions, PiecewiseTrajectory};
use impulsive_duffing::ode::{SegmentOptions, VectorField};
use impulsive_duffing::poincare::{iterate, TimeOneMap, FD_STEP};
use impulsive_duffing::scalar::loglog_slope;
use impulsive_duffing::scenario::{GridSpec, Model, Scenario, SeedLadder};
use impulsive_duffing::smoothing::{smooth, sup_error, SmoothingKernel};

use crate::error::CliError;
use crate::output::Output;
use crate::Common;

/// Escape radius of `simulate` trajectories.
pub const IVP_ESCAPE_RADIUS: f64 = 1e8;
/// Chart tolerance used by the rotation and circle diagnostics.
const CHART_TOL: f64 = 1e-12;
const SIMULATE_SAMPLES: usize = 1001;

type Res = Result<(), CliError>;

fn num(v: f64) -> String {
    v.to_string()
}

fn duffing_map(scenario: &Scenario) -> Result<TimeOneMap<f64, DuffingField<f64>>, CliError> {
    let model = scenario
        .duffing()
        .ok_or_else(|| CliError::Validation(format!("scenario '{}' is not a Duffing model", scenario.name)))?;
    Ok(model.time_one_map(scenario.map_options())?)
}

fn degree(scenario: &Scenario) -> Result<usize, CliError> {
    scenario
        .duffing()
        .map(|d| d.params.n())
        .ok_or_else(|| CliError::Validation(format!("scenario '{}' is not a Duffing model", scenario.name)))
}

fn chart(scenario: &Scenario, out: &Output, tol: f64) -> Result<ReferenceChart<f64>, CliError> {
    Ok(ReferenceChart::cached(degree(scenario)?, tol, out.dir())?)
}

fn grid_override(spec: GridSpec, side: Option<usize>) -> Result<GridSpec, CliError> {
    match side {
        Some(0) => Err(CliError::Validation("--grid must be at least 1".into())),
        Some(points) => Ok(GridSpec { points, ..spec }),
        None => Ok(spec),
    }
}

fn ladder_override(spec: SeedLadder, count: Option<usize>) -> Result<SeedLadder, CliError> {
    match count {
        Some(0) => Err(CliError::Validation("--grid must be at least 1".into())),
        Some(count) => Ok(SeedLadder { count, ..spec }),
        None => Ok(spec),
    }
}

fn initial<const M: usize>(scenario: &Scenario) -> Result<[f64; M], CliError> {
    scenario.initial.as_slice().try_into().map_err(|_| {
        CliError::Validation(format!("initial state needs {M} components, got {}", scenario.initial.len()))
    })
}

fn endpoint_json(e: &impulsive_duffing::impulsive::Endpoint<f64>) -> serde_json::Value {
    json!({ "time": e.time, "closed": e.closed, "reason": e.reason.as_str() })
}

fn run_simulation<V: VectorField<f64, M>, const M: usize>(
    scenario: &Scenario,
    system: &ImpulsiveSystem<f64, V, M>,
    samples: usize,
    at: &[f64],
    out: &mut Output,
) -> Res {
    let u0: [f64; M] = initial(scenario)?;
    let end = scenario.horizons.time;
    let opts: IvpOptions<f64> = SegmentOptions::new(scenario.tolerances, IVP_ESCAPE_RADIUS).into();
    let traj: PiecewiseTrajectory<f64, M> = solve_ivp(system, 0.0, u0, (0.0, end), &opts)?;
    let mut times: Vec<f64> = (0..samples)
        .map(|i| if samples > 1 { end * i as f64 / (samples - 1) as f64 } else { 0.0 })
        .chain(at.iter().copied())
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut header = vec!["t".to_string()];
    header.extend((0..M).map(|i| format!("u{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = times
        .iter()
        .filter_map(|&t| traj.value_at(t).map(|u| std::iter::once(num(t)).chain(u.iter().map(|&v| num(v))).collect()))
        .collect();
    out.csv(&header, &rows)?;
    let queried: Vec<_> = at
        .iter()
        .map(|&t| json!({ "t": t, "u": traj.value_at(t).map(|u| u.to_vec()) }))
        .collect();
    out.json(&json!({
        "initial": u0.to_vec(),
        "span": [0.0, end],
        "left": endpoint_json(&traj.left),
        "right": endpoint_json(&traj.right),
        "jumps": traj.jumps.len(),
        "final_state": traj.final_state().to_vec(),
        "at": queried,
    }))?;
    Ok(())
}

pub fn simulate(scenario: &Scenario, common: &Common, at: &[f64], out: &mut Output) -> Res {
    let samples = common.horizon.unwrap_or(SIMULATE_SAMPLES);
    if let Some(t) = at.iter().find(|t| !t.is_finite()) {
        return Err(CliError::Validation(format!("--at values must be finite, got {t}")));
    }
    match &scenario.model {
        Model::Duffing(d) => run_simulation(scenario, &d.system()?, samples, at, out),
        Model::Riccati(r) => run_simulation(scenario, &r.system()?, samples, at, out),
    }
}

pub fn poincare(scenario: &Scenario, common: &Common, out: &mut Output) -> Res {
    let map = duffing_map(scenario)?;
    let horizon = common.horizon.unwrap_or(scenario.horizons.iterates);
    let starts = match common.grid {
        Some(_) => grid_override(scenario.grid, common.grid)?.points(),
        None => vec![initial::<2>(scenario)?],
    };
    let orbits: Vec<_> = starts.par_iter().map(|&p| iterate(&map, p, horizon)).collect();
    let mut rows = Vec::new();
    for (o, orbit) in orbits.iter().enumerate() {
        for (k, p) in orbit.points.iter().enumerate() {
            rows.push(vec![o.to_string(), k.to_string(), num(p[0]), num(p[1])]);
        }
    }
    out.csv(&["orbit", "k", "x", "y"], &rows)?;
    let summary: Vec<_> = starts
        .iter()
        .zip(&orbits)
        .map(|(s, o)| {
            json!({
                "start": s,
                "iterates": o.points.len() - 1,
                "escaped": o.escape.map(|e| json!({ "time": e.time, "state": e.state })),
            })
        })
        .collect();
    out.json(&json!({ "horizon": horizon, "orbits": summary }))?;
    Ok(())
}

struct AreaRow {
    x: f64,
    y: f64,
    det_variational: f64,
    det_fd: f64,
    max_entry_difference: f64,
}

pub fn area_check(scenario: &Scenario, common: &Common, out: &mut Output) -> Res {
    let map = duffing_map(scenario)?;
    let grid = grid_override(scenario.area_grid, common.grid)?;
    let rows: Vec<AreaRow> = grid
        .points()
        .par_iter()
        .map(|&p| {
            let var = map.jacobian(p)?;
            let fd = map.jacobian_fd(p, FD_STEP)?;
            let mut diff: f64 = 0.0;
            for r in 0..2 {
                for c in 0..2 {
                    diff = diff.max((var.matrix[r][c] - fd.matrix[r][c]).abs());
                }
            }
            Ok(AreaRow {
                x: p[0],
                y: p[1],
                det_variational: var.determinant,
                det_fd: fd.determinant,
                max_entry_difference: diff,
            })
        })
        .collect::<Result<_, impulsive_duffing::Error>>()?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            [r.x, r.y, r.det_variational, r.det_fd, r.max_entry_difference]
                .into_iter()
                .map(num)
                .collect()
        })
        .collect();
    out.csv(&["x", "y", "det_variational", "det_fd", "max_entry_difference"], &csv_rows)?;
    let max_det = rows.iter().map(|r| (r.det_variational - 1.0).abs()).fold(0.0, f64::max);
    let max_fd = rows.iter().map(|r| r.max_entry_difference).fold(0.0, f64::max);
    out.json(&json!({
        "points": rows.len(),
        "fd_step": FD_STEP,
        "max_abs_det_minus_one": max_det,
        "max_fd_difference": max_fd,
        "area_preserving": max_det <= 1e-6,
    }))?;
    Ok(())
}

pub fn aa_roundtrip(scenario: &Scenario, common: &Common, out: &mut Output) -> Res {
    let n = degree(scenario)?;
    let tol = common.tol.unwrap_or(CHART_TOL);
    let chart = ReferenceChart::cached(n, tol, out.dir())?;
    let quadrature = period_by_quadrature(n, tol)?;
    let return_time = period_by_return_time(n, tol)?;
    let side = common.grid.unwrap_or(32).max(2);
    let h = 1e-6;
    let mut roundtrip: f64 = 0.0;
    let mut det_dev: f64 = 0.0;
    for i in 0..side {
        for j in 0..side {
            let lambda = 1.0 + 3.0 * j as f64 / (side - 1) as f64;
            let theta = (i as f64 + 0.5) / side as f64;
            let p = ActionAnglePoint::new(lambda, theta)?;
            let q = chart.to_action_angle(chart.from_action_angle(p))?;
            let dtheta = (q.theta - p.theta).abs();
            roundtrip = roundtrip.max((q.lambda - p.lambda).abs()).max(dtheta.min(1.0 - dtheta));
            let f = |l: f64, t: f64| chart.from_action_angle(ActionAnglePoint { lambda: l, theta: t });
            let (tp, tm) = (f(lambda, theta + h), f(lambda, theta - h));
            let (lp, lm) = (f(lambda + h, theta), f(lambda - h, theta));
            let det = ((tp[0] - tm[0]) * (lp[1] - lm[1]) - (lp[0] - lm[0]) * (tp[1] - tm[1])) / (4.0 * h * h);
            det_dev = det_dev.max((det - 1.0).abs());
        }
    }
    out.json(&json!({
        "n": n,
        "tolerance": tol,
        "period": chart.period(),
        "period_quadrature": quadrature,
        "period_return_time": return_time,
        "period_difference": (quadrature - return_time).abs(),
        "level_residual": chart.level_residual(),
        "roundtrip_points": side * side,
        "roundtrip_max_error": roundtrip,
        "max_abs_det_minus_one": det_dev,
    }))?;
    Ok(())
}

pub fn smooth_rate(scenario: &Scenario, common: &Common, out: &mut Output) -> Res {
    let s = scenario.smoothing;
    let signal = CoefficientSignal::lacunary(s.gamma, 1.0, s.levels)?;
    let kernel = SmoothingKernel::default();
    let grid_points = common.horizon.unwrap_or(2048);
    let sigmas: Vec<f64> = (s.sigma_exponents[0]..=s.sigma_exponents[1])
        .map(|k| 2f64.powi(-k))
        .collect();
    let errors = sigmas
        .iter()
        .map(|&sigma| Ok(sup_error(&signal, &smooth(&signal, sigma, &kernel)?, grid_points)))
        .collect::<Result<Vec<f64>, impulsive_duffing::Error>>()?;
    let rows: Vec<Vec<String>> = sigmas.iter().zip(&errors).map(|(&a, &b)| vec![num(a), num(b)]).collect();
    out.csv(&["sigma", "sup_error"], &rows)?;
    let slope = loglog_slope(&sigmas, &errors);
    out.json(&json!({
        "gamma": s.gamma,
        "levels": s.levels,
        "grid_points": grid_points,
        "slope": slope,
        "slope_error": (slope - s.gamma).abs(),
    }))?;
    Ok(())
}

pub fn rotation(scenario: &Scenario, common: &Common, out: &mut Output) -> Res {
    let map = duffing_map(scenario)?;
    let chart = chart(scenario, out, CHART_TOL)?;
    let seeds = ladder_override(scenario.seeds, common.grid)?.seeds();
    let horizon = common.horizon.unwrap_or(scenario.horizons.rotation);
    let profile = twist_profile(&map, &chart, scenario.amplitude, &seeds, horizon);
    let rows: Vec<Vec<String>> = profile
        .points
        .iter()
        .map(|p| {
            let (omega, freq, ind, trunc) = match &p.estimate {
                Some(e) => (num(e.omega), num(e.frequency), num(e.convergence_indicator), e.truncated.to_string()),
                None => Default::default(),
            };
            vec![num(p.seed[0]), num(p.seed[1]), num(p.lambda), omega, freq, ind, trunc]
        })
        .collect();
    out.csv(
        &["x", "y", "lambda", "omega", "frequency", "convergence_indicator", "truncated"],
        &rows,
    )?;
    out.json(&json!({ "amplitude": scenario.amplitude, "iterates": horizon, "profile": profile }))?;
    Ok(())
}

pub fn sweep(scenario: &Scenario, common: &Common, out: &mut Output) -> Res {
    let map = duffing_map(scenario)?;
    let grid = grid_override(scenario.grid, common.grid)?;
    let horizon = common.horizon.unwrap_or(scenario.horizons.iterates);
    let report = boundedness_sweep(&map, &grid.points(), horizon, scenario.escape_radius)?;
    let rows: Vec<Vec<String>> = report
        .grid
        .iter()
        .zip(&report.outcomes)
        .map(|(p, o)| match o {
            PointOutcome::Bounded { max_radius } => {
                vec![num(p[0]), num(p[1]), "bounded".into(), String::new(), num(*max_radius)]
            }
            PointOutcome::Escaped { iterate } => {
                vec![num(p[0]), num(p[1]), "escaped".into(), iterate.to_string(), String::new()]
            }
        })
        .collect();
    out.csv(&["x", "y", "outcome", "escape_iterate", "max_radius"], &rows)?;
    out.json(&json!({
        "points": report.grid.len(),
        "horizon": report.horizon,
        "escape_radius": report.escape_radius,
        "fraction_bounded": report.fraction_bounded,
        "max_radius": report.max_radius,
    }))?;
    Ok(())
}

pub fn detect(scenario: &Scenario, common: &Common, out: &mut Output) -> Res {
    let map = duffing_map(scenario)?;
    let chart = chart(scenario, out, CHART_TOL)?;
    let seeds = ladder_override(scenario.seeds, common.grid)?.seeds();
    let horizon = common.horizon.unwrap_or(scenario.horizons.circle);
    let d = scenario.detection;
    let options = CircleOptions {
        residual_tol: d.residual_tol,
        order: d.order,
        convergence_tol: d.convergence_tol,
    };
    let amplitude = scenario.amplitude;
    let verdicts = seeds
        .par_iter()
        .map(|&s| invariant_circle_detect(&map, &chart, amplitude, s, horizon, &options))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    let mut circles = 0;
    for (s, v) in seeds.iter().zip(&verdicts) {
        let (kind, residual, omega, ind, note) = match v {
            CircleVerdict::Circle { residual, rotation, .. } => {
                circles += 1;
                ("circle", num(*residual), num(rotation.omega), num(rotation.convergence_indicator), String::new())
            }
            CircleVerdict::Chaotic { residual, rotation } => (
                "chaotic",
                num(*residual),
                rotation.as_ref().map_or(String::new(), |r| num(r.omega)),
                rotation.as_ref().map_or(String::new(), |r| num(r.convergence_indicator)),
                String::new(),
            ),
            CircleVerdict::Escaping { iterate } => {
                ("escaping", String::new(), String::new(), String::new(), format!("iterate {iterate}"))
            }
            CircleVerdict::Undecided { reason } => {
                ("undecided", String::new(), String::new(), String::new(), reason.clone())
            }
        };
        rows.push(vec![num(s[0]), num(s[1]), kind.to_string(), residual, omega, ind, note]);
    }
    out.csv(
        &["x", "y", "verdict", "residual", "omega", "convergence_indicator", "note"],
        &rows,
    )?;
    let fits: Vec<_> = verdicts
        .iter()
        .map(|v| match v {
            CircleVerdict::Circle { fit, .. } => Some(fit),
            _ => None,
        })
        .collect();
    out.json(&json!({
        "amplitude": amplitude,
        "iterates": horizon,
        "options": options,
        "seeds": seeds.len(),
        "circles": circles,
        "circle_fraction": circles as f64 / seeds.len().max(1) as f64,
        "fits": fits,
    }))?;
    Ok(())
}
