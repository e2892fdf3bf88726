//! Action-angle coordinates `(lambda, theta)` for the rescaled equation at
//! large amplitude, built on the periodic solution of the leading
//! homogeneous part.
//!
//! Conventions: `theta` has period 1 and increases along the flow; the
//! half `Y <= 0` of the plane carries `theta` in `[0, 1/2]`.

mod chart;
mod interp;

pub use chart::{compute_reference, period_by_quadrature, period_by_return_time, ReferenceChart, CHART_NODES};
pub use interp::Pchip;

use crate::duffing::DuffingParams;
use crate::error::{Error, Result};
use crate::impulsive::JumpMap;
use crate::scalar::{wrap_centered, wrap_unit, Real};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ActionAnglePoint<F> {
    pub lambda: F,
    pub theta: F,
}

impl<F: Real> ActionAnglePoint<F> {
    /// Wraps `theta` to `[0, 1)`. Rejects non-positive actions.
    pub fn new(lambda: F, theta: F) -> Result<Self> {
        if !(lambda > F::zero()) {
            return Err(Error::InvalidArgument(format!("action must be positive, got {lambda}")));
        }
        Ok(Self {
            lambda,
            theta: wrap_unit(theta),
        })
    }
}

/// Amplitude rescaling `x = A X`, `y = A^{n+1} Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescaling<F> {
    pub n: usize,
    pub amplitude: F,
}

impl<F: Real> Rescaling<F> {
    pub fn new(n: usize, amplitude: F) -> Result<Self> {
        if !(amplitude > F::zero() && amplitude.is_finite()) {
            return Err(Error::InvalidArgument(format!("amplitude must be positive, got {amplitude}")));
        }
        Ok(Self { n, amplitude })
    }

    fn velocity_scale(&self) -> F {
        self.amplitude.powi(self.n as i32 + 1)
    }

    /// `(x, y) -> (X, Y)`.
    pub fn rescale_in(&self, s: [F; 2]) -> [F; 2] {
        [s[0] / self.amplitude, s[1] / self.velocity_scale()]
    }

    /// `(X, Y) -> (x, y)`.
    pub fn rescale_out(&self, s: [F; 2]) -> [F; 2] {
        [s[0] * self.amplitude, s[1] * self.velocity_scale()]
    }
}

impl<F: Real> ReferenceChart<F> {
    /// `(lambda, theta) -> (X, Y)`.
    pub fn from_action_angle(&self, p: ActionAnglePoint<F>) -> [F; 2] {
        let scaled = self.c() * p.lambda;
        let (x0, y0) = self.at_phase(p.theta);
        [scaled.powf(self.alpha()) * x0, scaled.powf(self.beta()) * y0]
    }

    /// `(X, Y) -> (lambda, theta)`; the origin has no angle.
    pub fn to_action_angle(&self, s: [F; 2]) -> Result<ActionAnglePoint<F>> {
        let [x, y] = s;
        if x == F::zero() && y == F::zero() {
            return Err(Error::ChartOrigin);
        }
        let n = self.n();
        let np1 = F::lit((n + 1) as f64);
        let level = x.abs().powi(2 * n as i32 + 2) + np1 * y * y;
        let lambda = level.powf(F::lit((n + 2) as f64) / F::lit((2 * n + 2) as f64)) / self.c();
        let scaled = self.c() * lambda;
        let u = x.abs() / scaled.powf(self.alpha());
        let v = y.abs() / scaled.powf(self.beta());
        let sq = self.quarter_time(u, v);
        let t0 = self.period();
        let s = match (x >= F::zero(), y <= F::zero()) {
            (true, true) => sq,
            (false, true) => F::half() * t0 - sq,
            (false, false) => F::half() * t0 + sq,
            (true, false) => t0 - sq,
        };
        Ok(ActionAnglePoint {
            lambda,
            theta: wrap_unit(s / t0),
        })
    }

    /// Increments `(dtheta, dlambda)` produced by the impulse `jump` of the
    /// unscaled equation, seen in the chart at amplitude `amplitude`.
    /// `dtheta` is wrapped to `(-1/2, 1/2]`.
    pub fn jump_action_angle(
        &self,
        amplitude: F,
        jump: &(impl JumpMap<F, 2> + ?Sized),
        p: ActionAnglePoint<F>,
    ) -> Result<(F, F)> {
        let post = self.rescaled_jump(amplitude, jump, self.from_action_angle(p))?;
        let q = self.to_action_angle(post)?;
        Ok((wrap_centered(q.theta - p.theta), q.lambda - p.lambda))
    }

    /// `(X, Y) -> (X + I~, Y + J~)` with the impulse evaluated at the
    /// unscaled point and scaled back.
    pub fn rescaled_jump(&self, amplitude: F, jump: &(impl JumpMap<F, 2> + ?Sized), s: [F; 2]) -> Result<[F; 2]> {
        let r = Rescaling::new(self.n(), amplitude)?;
        let inc = r.rescale_in(jump.increment(&r.rescale_out(s)));
        Ok([s[0] + inc[0], s[1] + inc[1]])
    }

    /// `H0(lambda) = d A^n lambda^{2(n+1)/(n+2)}`.
    pub fn h0_action(&self, amplitude: F, lambda: F) -> F {
        let n = self.n();
        let exponent = F::lit((2 * n + 2) as f64) / F::lit((n + 2) as f64);
        self.d() * amplitude.powi(n as i32) * lambda.powf(exponent)
    }

    /// `(H0, R)` at `(lambda, theta)` and time `t`, where `R` collects the
    /// forcing terms `p_i(t) A^{i-n-1} X^{i+1} / (i+1)`.
    pub fn hamiltonian_pieces(
        &self,
        params: &DuffingParams<F>,
        amplitude: F,
        p: ActionAnglePoint<F>,
        t: F,
    ) -> Result<(F, F)> {
        let n = self.n();
        if params.n() != n {
            return Err(Error::InvalidArgument(format!(
                "chart has degree {n}, parameters have degree {}",
                params.n()
            )));
        }
        let h0 = self.h0_action(amplitude, p.lambda);
        let x = self.from_action_angle(p)[0];
        let mut r = F::zero();
        for (i, coef) in params.coefficients().iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            let power = i as i32 - n as i32 - 1;
            r += coef.eval(t) / F::from_usize_lossy(i + 1) * amplitude.powi(power) * x.powi(i as i32 + 1);
        }
        Ok((h0, r))
    }
}
