use serde::Serialize;

use super::{chart_orbit, estimate_from_increments, RotationEstimate};
use crate::action_angle::{ActionAnglePoint, ReferenceChart};
use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;
use crate::poincare::PlanarMap;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleOptions<F> {
    /// Largest accepted `max |lambda - fit| / mean lambda`.
    pub residual_tol: F,
    /// Fourier truncation order of the fitted curve.
    pub order: usize,
    /// Largest accepted rotation convergence indicator, relative to
    /// `max(1, |frequency|)`.
    pub convergence_tol: F,
}

impl<F: Real> CircleOptions<F> {
    pub fn new(residual_tol: F) -> Self {
        Self {
            residual_tol,
            order: 32,
            convergence_tol: F::lit(1e-6),
        }
    }
}

/// Least-squares Fourier series `lambda(theta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleFit<F> {
    pub order: usize,
    /// `[mean, cos_1, sin_1, cos_2, sin_2, ...]`.
    pub coefficients: Vec<F>,
    pub residual: F,
}

impl<F: Real> CircleFit<F> {
    pub fn eval(&self, theta: F) -> F {
        let mut acc = self.coefficients[0];
        for k in 1..=self.order {
            let (s, c) = (F::tau() * F::from_usize_lossy(k) * theta).sin_cos();
            acc += self.coefficients[2 * k - 1] * c + self.coefficients[2 * k] * s;
        }
        acc
    }
}

fn basis<F: Real>(order: usize, theta: F, out: &mut [F]) {
    out[0] = F::one();
    for k in 1..=order {
        let (s, c) = (F::tau() * F::from_usize_lossy(k) * theta).sin_cos();
        out[2 * k - 1] = c;
        out[2 * k] = s;
    }
}

/// Fits `lambda` as a Fourier series of order `order` in `theta`.
pub fn fit_circle<F: Real>(points: &[ActionAnglePoint<F>], order: usize) -> Result<CircleFit<F>> {
    let dim = 2 * order + 1;
    if points.len() < 2 * dim {
        return Err(Error::InsufficientSamples {
            required: 2 * dim,
            available: points.len(),
        });
    }
    let mut gram = vec![F::zero(); dim * dim];
    let mut rhs = vec![F::zero(); dim];
    let mut row = vec![F::zero(); dim];
    for p in points {
        basis(order, p.theta, &mut row);
        for i in 0..dim {
            rhs[i] += row[i] * p.lambda;
            for j in 0..=i {
                gram[i * dim + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            gram[j * dim + i] = gram[i * dim + j];
        }
    }
    let coefficients = cholesky_solve(&mut gram, &rhs, dim)
        .ok_or_else(|| Error::Numerical("circle fit normal equations are singular".into()))?;
    let mut fit = CircleFit {
        order,
        coefficients,
        residual: F::zero(),
    };
    let mean = points.iter().map(|p| p.lambda).sum::<F>() / F::from_usize_lossy(points.len());
    let worst = points.iter().map(|p| (p.lambda - fit.eval(p.theta)).abs()).fold(F::zero(), F::max);
    fit.residual = worst / mean;
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CircleVerdict<F> {
    Circle {
        /// Orbit points sorted by angle.
        curve: Vec<ActionAnglePoint<F>>,
        fit: CircleFit<F>,
        residual: F,
        /// Rotation of the induced circle map.
        rotation: RotationEstimate<F>,
    },
    Chaotic {
        residual: F,
        rotation: Option<RotationEstimate<F>>,
    },
    Escaping {
        iterate: usize,
    },
    Undecided {
        reason: String,
    },
}

impl<F> CircleVerdict<F> {
    pub fn is_circle(&self) -> bool {
        matches!(self, CircleVerdict::Circle { .. })
    }
}

/// Iterates `seed` `iterates` times and decides whether the orbit lies on
/// a closed curve `lambda = u(theta)` of the chart.
pub fn invariant_circle_detect<F: Real, M: PlanarMap<F> + ?Sized>(
    map: &M,
    chart: &ReferenceChart<F>,
    amplitude: F,
    seed: [F; 2],
    iterates: usize,
    options: &CircleOptions<F>,
) -> Result<CircleVerdict<F>> {
    if iterates < 512 {
        return Err(Error::InvalidArgument(format!("circle detection needs at least 512 iterates, got {iterates}")));
    }
    let orbit = chart_orbit(map, chart, amplitude, seed, iterates)?;
    let usable = orbit.chart_points.len();
    if usable < iterates / 4 {
        return Ok(CircleVerdict::Undecided {
            reason: format!("only {usable} usable points out of {iterates}"),
        });
    }
    if orbit.escape.is_some() {
        return Ok(CircleVerdict::Escaping { iterate: orbit.increments.len() + 1 });
    }
    let order = options.order.min(usable / 8).max(1);
    let fit = match fit_circle(&orbit.chart_points, order) {
        Ok(fit) => fit,
        // Periodic orbits visit too few distinct angles for the fit.
        Err(Error::Numerical(reason)) => return Ok(CircleVerdict::Undecided { reason }),
        Err(e) => return Err(e),
    };
    let residual = fit.residual;
    let rotation = estimate_from_increments(&orbit.increments, orbit.hit_origin).ok();
    let converged = rotation
        .as_ref()
        .map_or(false, |r| {
            !r.truncated && r.convergence_indicator <= options.convergence_tol * r.frequency.abs().max(F::one())
        });
    if residual <= options.residual_tol && converged {
        let mut curve = orbit.chart_points;
        curve.sort_by(|a, b| a.theta.partial_cmp(&b.theta).expect("finite angles"));
        Ok(CircleVerdict::Circle {
            curve,
            fit,
            residual,
            rotation: rotation.expect("checked above"),
        })
    } else {
        Ok(CircleVerdict::Chaotic { residual, rotation })
    }
}
