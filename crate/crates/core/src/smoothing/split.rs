use num_complex::Complex;

use super::{smooth, AnalyticApproximation, SmoothingKernel};
use crate::action_angle::{ActionAnglePoint, ReferenceChart};
use crate::duffing::DuffingParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sample grid over `[1, 4] x T^1 x T^1` in `(lambda, theta, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitGrid {
    pub lambdas: usize,
    pub thetas: usize,
    pub times: usize,
}

impl Default for SplitGrid {
    fn default() -> Self {
        Self {
            lambdas: 7,
            thetas: 64,
            times: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitReport<F> {
    pub amplitude: F,
    pub eps0: F,
    pub gamma: F,
    /// Smoothing scale `(eps0 / A^{n-1})^{1/gamma}`.
    pub epsilon: F,
    /// Grid sup of the remainder `R^eps`.
    pub sup_remainder: F,
    /// Grid sup of the smooth part `R_eps`.
    pub sup_smooth: F,
    pub grid: SplitGrid,
}

/// `R = R_eps + R^eps`: the smooth part keeps the high-order terms with
/// smoothed coefficients, the remainder collects the low-order terms and
/// the smoothing residuals.
pub struct PerturbationSplit<'a, F: Real> {
    chart: &'a ReferenceChart<F>,
    params: &'a DuffingParams<F>,
    amplitude: F,
    /// `p_{i,eps}` for `i = n+1 ..= 2n`.
    smoothed: Vec<AnalyticApproximation<F>>,
    pub report: SplitReport<F>,
}

impl<'a, F: Real> PerturbationSplit<'a, F> {
    fn powers(&self, p: ActionAnglePoint<F>) -> Vec<F> {
        let n = self.chart.n();
        let x = self.chart.from_action_angle(p)[0];
        (0..=2 * n)
            .map(|i| {
                let power = i as i32 - n as i32 - 1;
                self.amplitude.powi(power) * x.powi(i as i32 + 1) / F::from_usize_lossy(i + 1)
            })
            .collect()
    }

    pub fn smoothing_scale(&self) -> F {
        self.report.epsilon
    }

    pub fn smoothed_coefficients(&self) -> &[AnalyticApproximation<F>] {
        &self.smoothed
    }

    /// `R_eps(lambda, theta, t)` at complex time.
    pub fn smooth_part_complex(&self, p: ActionAnglePoint<F>, t: Complex<F>) -> Complex<F> {
        let n = self.chart.n();
        let w = self.powers(p);
        self.smoothed
            .iter()
            .enumerate()
            .map(|(k, approx)| approx.eval_complex(t) * w[n + 1 + k])
            .fold(Complex::new(F::zero(), F::zero()), |acc, v| acc + v)
    }

    /// `R_eps(lambda, theta, t)`.
    pub fn smooth_part(&self, p: ActionAnglePoint<F>, t: F) -> F {
        self.smooth_weighted(&self.powers(p), t)
    }

    fn smooth_weighted(&self, w: &[F], t: F) -> F {
        let n = self.chart.n();
        self.smoothed
            .iter()
            .enumerate()
            .map(|(k, approx)| approx.eval(t) * w[n + 1 + k])
            .sum()
    }

    /// `R^eps(lambda, theta, t)`.
    pub fn remainder(&self, p: ActionAnglePoint<F>, t: F) -> F {
        self.remainder_weighted(&self.powers(p), t)
    }

    fn remainder_weighted(&self, w: &[F], t: F) -> F {
        let n = self.chart.n();
        let coefs = self.params.coefficients();
        let mut acc = F::zero();
        for i in 0..=n {
            if !coefs[i].is_zero() {
                acc += w[i] * coefs[i].eval(t);
            }
        }
        for (k, approx) in self.smoothed.iter().enumerate() {
            let i = n + 1 + k;
            acc += w[i] * (coefs[i].eval(t) - approx.eval(t));
        }
        acc
    }

    /// Full perturbation `R = R_eps + R^eps`.
    pub fn total(&self, p: ActionAnglePoint<F>, t: F) -> F {
        self.smooth_part(p, t) + self.remainder(p, t)
    }
}

/// Splits the perturbation at amplitude `amplitude`, choosing the
/// smoothing scale from `eps0` and the smallest high-order Hölder exponent.
pub fn split_perturbation<'a, F: Real>(
    params: &'a DuffingParams<F>,
    chart: &'a ReferenceChart<F>,
    amplitude: F,
    eps0: F,
    grid: SplitGrid,
) -> Result<PerturbationSplit<'a, F>> {
    let n = chart.n();
    if params.n() != n {
        return Err(Error::InvalidArgument(format!(
            "chart has degree {n}, parameters have degree {}",
            params.n()
        )));
    }
    if !(amplitude > F::zero() && eps0 > F::zero() && amplitude.recip() < eps0) {
        return Err(Error::SplitCondition {
            a: amplitude.to_f64_lossy(),
            eps0: eps0.to_f64_lossy(),
        });
    }
    params.check_regularity()?;
    let gamma = params
        .high_order_exponent()
        .ok_or_else(|| Error::InvalidArgument("high-order coefficients must be Hölder".into()))?;
    let epsilon = (eps0 / amplitude.powi(n as i32 - 1)).powf(gamma.recip());
    let kernel = SmoothingKernel::default();
    let smoothed = params.coefficients()[n + 1..]
        .iter()
        .map(|p| smooth(p, epsilon, &kernel))
        .collect::<Result<Vec<_>>>()?;
    let mut split = PerturbationSplit {
        chart,
        params,
        amplitude,
        smoothed,
        report: SplitReport {
            amplitude,
            eps0,
            gamma,
            epsilon,
            sup_remainder: F::zero(),
            sup_smooth: F::zero(),
            grid,
        },
    };
    let (mut sup_r, mut sup_s) = (F::zero(), F::zero());
    for a in 0..grid.lambdas.max(1) {
        let lambda = if grid.lambdas > 1 {
            F::one() + F::lit(3.0) * F::from_usize_lossy(a) / F::from_usize_lossy(grid.lambdas - 1)
        } else {
            F::one()
        };
        for b in 0..grid.thetas {
            let theta = F::from_usize_lossy(b) / F::from_usize_lossy(grid.thetas);
            let w = split.powers(ActionAnglePoint { lambda, theta });
            for c in 0..grid.times {
                let t = F::from_usize_lossy(c) / F::from_usize_lossy(grid.times);
                sup_r = sup_r.max(split.remainder_weighted(&w, t).abs());
                sup_s = sup_s.max(split.smooth_weighted(&w, t).abs());
            }
        }
    }
    split.report.sup_remainder = sup_r;
    split.report.sup_smooth = sup_s;
    Ok(split)
}
