use crate::scalar::Real;

/// Continuous extension of one accepted step.
#[derive(Debug, Clone)]
pub struct DenseStep<F, const M: usize> {
    pub t0: F,
    pub h: F,
    pub(crate) cont: [[F; M]; 8],
}

impl<F: Real, const M: usize> DenseStep<F, M> {
    pub fn t1(&self) -> F {
        self.t0 + self.h
    }

    pub fn eval(&self, t: F) -> [F; M] {
        let s = (t - self.t0) / self.h;
        let s1 = F::one() - s;
        let c = &self.cont;
        let mut out = [F::zero(); M];
        for i in 0..M {
            let conpar = c[4][i] + (c[5][i] + (c[6][i] + c[7][i] * s) * s1) * s;
            out[i] = c[0][i] + (c[1][i] + (c[2][i] + (c[3][i] + conpar * s1) * s) * s1) * s;
        }
        out
    }
}

/// Piecewise polynomial solution over one integration segment.
///
/// Steps are stored in integration order, so for backward segments the step
/// times decrease.
#[derive(Debug, Clone)]
pub struct DenseSegment<F, const M: usize> {
    pub steps: Vec<DenseStep<F, M>>,
}

impl<F: Real, const M: usize> DenseSegment<F, M> {
    pub fn start(&self) -> Option<F> {
        self.steps.first().map(|s| s.t0)
    }

    pub fn end(&self) -> Option<F> {
        self.steps.last().map(|s| s.t1())
    }

    /// Evaluates the interpolant; times outside the covered span are clamped
    /// to the nearest step and extrapolated.
    pub fn eval(&self, t: F) -> Option<[F; M]> {
        let first = self.steps.first()?;
        let forward = first.h > F::zero();
        // Index of the first step whose end lies at or beyond `t` in the
        // direction of integration.
        let idx = self.steps.partition_point(|s| {
            if forward {
                s.t1() < t
            } else {
                s.t1() > t
            }
        });
        let idx = idx.min(self.steps.len() - 1);
        Some(self.steps[idx].eval(t))
    }
}
