//! Adaptive explicit Runge–Kutta integration between impulse instants.
//!
//! The integrator is the Dormand–Prince 8(5,3) pair with its 7th order
//! continuous extension. Segment endpoints are hit exactly: the final step is
//! clipped so that no step ever crosses `t_to`, which is what lets the
//! impulsive layer place jumps at the exact impulse instants.

mod dense;
mod dop853;
mod tableau;

pub use dense::{DenseSegment, DenseStep};
pub use dop853::integrate_segment_observed;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A (possibly time dependent) vector field `u' = F(t, u)` on `R^M`.
pub trait VectorField<F: Real, const M: usize>: Sync {
    fn eval(&self, t: F, u: &[F; M]) -> [F; M];

    /// Jacobian `dF/du`, row-major. Defaults to central differences.
    fn jacobian(&self, t: F, u: &[F; M]) -> [[F; M]; M] {
        let mut jac = [[F::zero(); M]; M];
        for col in 0..M {
            let h = F::lit(1e-6) * (F::one() + u[col].abs());
            let mut up = *u;
            let mut dn = *u;
            up[col] += h;
            dn[col] -= h;
            let fp = self.eval(t, &up);
            let fm = self.eval(t, &dn);
            for row in 0..M {
                jac[row][col] = (fp[row] - fm[row]) / (h + h);
            }
        }
        jac
    }
}

impl<F: Real, const M: usize, V: VectorField<F, M>> VectorField<F, M> for &V {
    fn eval(&self, t: F, u: &[F; M]) -> [F; M] {
        (**self).eval(t, u)
    }

    fn jacobian(&self, t: F, u: &[F; M]) -> [[F; M]; M] {
        (**self).jacobian(t, u)
    }
}

/// Adapts a closure into a [`VectorField`].
#[derive(Clone, Copy)]
pub struct FnField<G>(pub G);

impl<F, G, const M: usize> VectorField<F, M> for FnField<G>
where
    F: Real,
    G: Fn(F, &[F; M]) -> [F; M] + Sync,
{
    fn eval(&self, t: F, u: &[F; M]) -> [F; M] {
        (self.0)(t, u)
    }
}

/// Mixed absolute/relative error tolerance for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<F> {
    pub rtol: F,
    pub atol: F,
}

impl<F: Real> Default for Tolerances<F> {
    fn default() -> Self {
        Self {
            rtol: F::lit(1e-10),
            atol: F::lit(1e-12),
        }
    }
}

impl<F: Real> Tolerances<F> {
    pub fn new(rtol: F, atol: F) -> Self {
        Self { rtol, atol }
    }

    /// Same value for the relative and absolute part.
    pub fn uniform(tol: F) -> Self {
        Self { rtol: tol, atol: tol }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: F| x.is_finite() && x > F::zero();
        if ok(self.rtol) && ok(self.atol) {
            Ok(())
        } else {
            Err(Error::InvalidTolerance {
                rtol: self.rtol.to_f64_lossy(),
                atol: self.atol.to_f64_lossy(),
            })
        }
    }
}

/// Knobs for [`integrate_segment`].
#[derive(Debug, Clone, Copy)]
pub struct SegmentOptions<F> {
    pub tol: Tolerances<F>,
    /// Integration stops as soon as the Euclidean norm of the first
    /// `escape_dims` components reaches this radius.
    pub escape_radius: F,
    pub escape_dims: usize,
    pub max_steps: usize,
    /// Record the continuous extension of every accepted step.
    pub dense: bool,
}

impl<F: Real> SegmentOptions<F> {
    pub fn new(tol: Tolerances<F>, escape_radius: F) -> Self {
        Self {
            tol,
            escape_radius,
            escape_dims: usize::MAX,
            max_steps: 2_000_000,
            dense: false,
        }
    }

    pub fn with_dense(mut self, dense: bool) -> Self {
        self.dense = dense;
        self
    }

    pub fn with_escape_dims(mut self, dims: usize) -> Self {
        self.escape_dims = dims;
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }
}

impl<F: Real> Default for SegmentOptions<F> {
    fn default() -> Self {
        Self::new(Tolerances::default(), F::lit(1e8))
    }
}

/// Why a segment stopped before reaching its target time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EscapeCause {
    /// The state norm reached the escape radius (or became non-finite).
    Radius,
    /// The step size collapsed below round-off, the signature of blow-up.
    StepUnderflow,
    /// The step budget ran out.
    StepBudget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentOutcome<F, const M: usize> {
    Reached { t: F, u: [F; M] },
    Escaped { t: F, u: [F; M], cause: EscapeCause },
}

impl<F: Copy, const M: usize> SegmentOutcome<F, M> {
    pub fn time(&self) -> F {
        match *self {
            SegmentOutcome::Reached { t, .. } | SegmentOutcome::Escaped { t, .. } => t,
        }
    }

    pub fn state(&self) -> [F; M] {
        match *self {
            SegmentOutcome::Reached { u, .. } | SegmentOutcome::Escaped { u, .. } => u,
        }
    }

    pub fn is_reached(&self) -> bool {
        matches!(self, SegmentOutcome::Reached { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

#[derive(Debug, Clone)]
pub struct SegmentResult<F, const M: usize> {
    pub outcome: SegmentOutcome<F, M>,
    /// Present when [`SegmentOptions::dense`] was set.
    pub dense: Option<DenseSegment<F, M>>,
    pub stats: StepStats,
}

/// Integrates `field` from `(t_from, u0)` to `t_to` (either direction).
pub fn integrate_segment<F, V, const M: usize>(
    field: &V,
    t_from: F,
    t_to: F,
    u0: [F; M],
    opts: &SegmentOptions<F>,
) -> Result<SegmentResult<F, M>>
where
    F: Real,
    V: VectorField<F, M> + ?Sized,
{
    integrate_segment_observed(field, t_from, t_to, u0, opts, |_, _| {})
}

#[cfg(test)]
mod tests;
