//! Numerical evidence for boundedness: rotation numbers, twist, invariant
//! circles and long-horizon sweeps of the time-1 map.
//!
//! Everything here works on a [`PlanarMap`] in the original `(x, y)`
//! variables and reads angles through the action-angle chart at a given
//! amplitude.

mod circle;
mod sweep;

pub use circle::{fit_circle, invariant_circle_detect, CircleFit, CircleOptions, CircleVerdict};
pub use sweep::{boundedness_sweep, square_grid, PointOutcome, SweepReport};

use serde::Serialize;

use crate::action_angle::{ActionAnglePoint, ReferenceChart, Rescaling};
use crate::error::{Error, Result};
use crate::poincare::{MapEscape, PlanarMap};
use crate::scalar::{wrap_unit, Real};

/// `exp(-1/(s(1-s)))` on `(0, 1)`, zero elsewhere.
fn bump<F: Real>(s: F) -> F {
    if s <= F::zero() || s >= F::one() {
        F::zero()
    } else {
        (-(s * (F::one() - s)).recip()).exp()
    }
}

/// Weighted Birkhoff average of `values` with the bump weight sampled at
/// `k / len`.
pub fn weighted_birkhoff<F: Real>(values: &[F]) -> F {
    let len = F::from_usize_lossy(values.len());
    let (mut num, mut den) = (F::zero(), F::zero());
    for (k, &v) in values.iter().enumerate() {
        let w = bump(F::from_usize_lossy(k) / len);
        num += w * v;
        den += w;
    }
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationEstimate<F> {
    /// Revolutions per iterate, modulo 1.
    pub omega: F,
    /// Lifted revolutions per iterate, including whole turns when the map
    /// reports them.
    pub frequency: F,
    pub iterates_used: usize,
    /// `|estimate(N/2) - estimate(N)|`.
    pub convergence_indicator: F,
    /// The orbit escaped or hit the origin before `N` iterates.
    pub truncated: bool,
}

/// Angle of `p` in the chart at amplitude `amplitude`.
pub fn chart_point<F: Real>(chart: &ReferenceChart<F>, amplitude: F, p: [F; 2]) -> Result<ActionAnglePoint<F>> {
    let r = Rescaling::new(chart.n(), amplitude)?;
    chart.to_action_angle(r.rescale_in(p))
}

/// Point of the original plane with action `lambda` and angle `theta`.
pub fn seed_for_action<F: Real>(chart: &ReferenceChart<F>, amplitude: F, lambda: F, theta: F) -> Result<[F; 2]> {
    let r = Rescaling::new(chart.n(), amplitude)?;
    Ok(r.rescale_out(chart.from_action_angle(ActionAnglePoint::new(lambda, theta)?)))
}

/// Lifted angle increments of an orbit. With whole turns reported by the
/// map, each increment is the representative of the chart difference
/// closest to the turn count; otherwise the representative closest to the
/// previous increment.
pub(crate) struct AngleLift<F> {
    prev_theta: F,
    prev_increment: Option<F>,
}

impl<F: Real> AngleLift<F> {
    pub(crate) fn new(theta: F) -> Self {
        Self {
            prev_theta: theta,
            prev_increment: None,
        }
    }

    pub(crate) fn push(&mut self, theta: F, turns: Option<F>) -> F {
        let d = wrap_unit(theta - self.prev_theta);
        let target = turns.or(self.prev_increment);
        let inc = match target {
            Some(t) => d + (t - d).round(),
            None => d,
        };
        self.prev_theta = theta;
        self.prev_increment = Some(inc);
        inc
    }
}

/// Orbit in chart coordinates with lifted increments, stopping early on
/// escape or at the origin.
pub(crate) struct ChartOrbit<F> {
    pub points: Vec<[F; 2]>,
    pub chart_points: Vec<ActionAnglePoint<F>>,
    pub increments: Vec<F>,
    pub escape: Option<MapEscape<F>>,
    pub hit_origin: bool,
}

pub(crate) fn chart_orbit<F: Real, M: PlanarMap<F> + ?Sized>(
    map: &M,
    chart: &ReferenceChart<F>,
    amplitude: F,
    p0: [F; 2],
    count: usize,
) -> Result<ChartOrbit<F>> {
    let start = chart_point(chart, amplitude, p0)?;
    let mut out = ChartOrbit {
        points: vec![p0],
        chart_points: vec![start],
        increments: Vec::with_capacity(count),
        escape: None,
        hit_origin: false,
    };
    let mut lift = AngleLift::new(start.theta);
    let mut p = p0;
    for _ in 0..count {
        let (next, turns) = match map.apply_with_turns(p) {
            Ok(v) => v,
            Err(e) => {
                out.escape = Some(e);
                break;
            }
        };
        let q = match chart_point(chart, amplitude, next) {
            Ok(q) => q,
            Err(Error::ChartOrigin) => {
                out.hit_origin = true;
                break;
            }
            Err(e) => return Err(e),
        };
        out.increments.push(lift.push(q.theta, turns));
        out.points.push(next);
        out.chart_points.push(q);
        p = next;
    }
    Ok(out)
}

pub(crate) fn estimate_from_increments<F: Real>(increments: &[F], truncated: bool) -> Result<RotationEstimate<F>> {
    if increments.len() < 4 {
        return Err(Error::InsufficientSamples {
            required: 4,
            available: increments.len(),
        });
    }
    let full = weighted_birkhoff(increments);
    let half = weighted_birkhoff(&increments[..increments.len() / 2]);
    Ok(RotationEstimate {
        omega: wrap_unit(full),
        frequency: full,
        iterates_used: increments.len(),
        convergence_indicator: (full - half).abs(),
        truncated,
    })
}

/// Rotation number of the orbit of `p0` under `map`, read in the chart
/// angle at amplitude `amplitude`. Orbits cut short by escape or by the
/// origin give an estimate flagged `truncated`.
pub fn rotation_number<F: Real, M: PlanarMap<F> + ?Sized>(
    map: &M,
    chart: &ReferenceChart<F>,
    amplitude: F,
    p0: [F; 2],
    iterates: usize,
) -> Result<RotationEstimate<F>> {
    let orbit = chart_orbit(map, chart, amplitude, p0, iterates)?;
    let truncated = orbit.escape.is_some() || orbit.hit_origin;
    estimate_from_increments(&orbit.increments, truncated)
}

/// Rotation by `omega` in the chart angle at fixed action: a test stand-in
/// for a time-1 map.
pub struct RigidRotation<'a, F> {
    pub chart: &'a ReferenceChart<F>,
    pub amplitude: F,
    pub omega: F,
}

impl<F: Real> PlanarMap<F> for RigidRotation<'_, F> {
    fn apply(&self, p: [F; 2]) -> Result<[F; 2], MapEscape<F>> {
        Ok(self.apply_with_turns(p)?.0)
    }

    fn apply_with_turns(&self, p: [F; 2]) -> Result<([F; 2], Option<F>), MapEscape<F>> {
        let escape = MapEscape {
            time: F::zero(),
            state: p,
        };
        let q = chart_point(self.chart, self.amplitude, p).map_err(|_| escape)?;
        let moved = ActionAnglePoint {
            lambda: q.lambda,
            theta: wrap_unit(q.theta + self.omega),
        };
        let r = Rescaling::new(self.chart.n(), self.amplitude).map_err(|_| escape)?;
        Ok((r.rescale_out(self.chart.from_action_angle(moved)), Some(self.omega)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistPoint<F> {
    pub seed: [F; 2],
    pub lambda: F,
    pub estimate: Option<RotationEstimate<F>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistProfile<F> {
    pub points: Vec<TwistPoint<F>>,
    /// Lifted frequency strictly increasing in the action, by more than the
    /// estimators' convergence indicators.
    pub monotone: bool,
}

/// Rotation number along a ladder of seeds, paired with their actions.
pub fn twist_profile<F: Real, M: PlanarMap<F> + ?Sized>(
    map: &M,
    chart: &ReferenceChart<F>,
    amplitude: F,
    seeds: &[[F; 2]],
    iterates: usize,
) -> TwistProfile<F> {
    use rayon::prelude::*;
    let points: Vec<TwistPoint<F>> = seeds
        .par_iter()
        .map(|&seed| {
            let lambda = chart_point(chart, amplitude, seed).map(|p| p.lambda).unwrap_or(F::nan());
            match rotation_number(map, chart, amplitude, seed, iterates) {
                Ok(est) if !est.truncated => TwistPoint {
                    seed,
                    lambda,
                    estimate: Some(est),
                    error: None,
                },
                Ok(est) => TwistPoint {
                    seed,
                    lambda,
                    estimate: Some(est),
                    error: Some(format!("orbit truncated after {} iterates", est.iterates_used)),
                },
                Err(e) => TwistPoint {
                    seed,
                    lambda,
                    estimate: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let monotone = points.len() >= 2
        && points.windows(2).all(|w| match (&w[0].estimate, &w[1].estimate, &w[0].error, &w[1].error) {
            (Some(a), Some(b), None, None) => {
                let noise = F::lit(10.0) * (a.convergence_indicator + b.convergence_indicator) + F::lit(1e-9);
                w[1].lambda > w[0].lambda && b.frequency - a.frequency > noise
            }
            _ => false,
        });
    TwistProfile { points, monotone }
}
