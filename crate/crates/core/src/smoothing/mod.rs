//! Analytic approximation of Hölder coefficients by a flat-topped Fourier
//! cutoff, and the resulting split of the perturbation Hamiltonian.

mod split;

pub use split::{split_perturbation, PerturbationSplit, SplitGrid, SplitReport};

use num_complex::Complex;

use crate::duffing::{CoefficientSignal, FourierMode, SignalClass, SignalSource};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Frequency multiplier: 1 on `|xi| <= plateau`, 0 on `|xi| >= support`,
/// with a `C^infinity` transition built from `exp(-1/u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingKernel<F> {
    pub plateau: F,
    pub support_radius: F,
}

impl<F: Real> Default for SmoothingKernel<F> {
    fn default() -> Self {
        Self {
            plateau: F::half(),
            support_radius: F::one(),
        }
    }
}

fn flat_exp<F: Real>(u: F) -> F {
    if u <= F::zero() {
        F::zero()
    } else {
        (-u.recip()).exp()
    }
}

impl<F: Real> SmoothingKernel<F> {
    pub fn new(plateau: F, support_radius: F) -> Result<Self> {
        if !(plateau > F::zero() && support_radius > plateau && support_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kernel needs 0 < plateau < support radius, got {plateau} and {support_radius}"
            )));
        }
        Ok(Self { plateau, support_radius })
    }

    pub fn multiplier(&self, xi: F) -> F {
        let a = xi.abs();
        if a <= self.plateau {
            return F::one();
        }
        if a >= self.support_radius {
            return F::zero();
        }
        let s = (a - self.plateau) / (self.support_radius - self.plateau);
        let up = flat_exp(F::one() - s);
        up / (up + flat_exp(s))
    }
}

/// Finite trigonometric polynomial `f_sigma` approximating a signal.
///
/// Coefficients are kept as real cosine/sine pairs, so the function is
/// real on the real axis by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticApproximation<F> {
    pub sigma: F,
    modes: Vec<FourierMode<F>>,
}

impl<F: Real> AnalyticApproximation<F> {
    pub fn modes(&self) -> &[FourierMode<F>] {
        &self.modes
    }

    pub fn eval(&self, t: F) -> F {
        self.modes
            .iter()
            .map(|m| {
                let arg = F::lit(m.frequency as f64) * (t - t.floor());
                let (s, c) = (F::tau() * (arg - arg.floor())).sin_cos();
                m.cos * c + m.sin * s
            })
            .sum()
    }

    /// Value at a complex time.
    pub fn eval_complex(&self, t: Complex<F>) -> Complex<F> {
        let shift = t.re.floor();
        let t = Complex::new(t.re - shift, t.im);
        self.modes
            .iter()
            .map(|m| {
                let z = t * (F::tau() * F::lit(m.frequency as f64));
                z.cos() * m.cos + z.sin() * m.sin
            })
            .fold(Complex::new(F::zero(), F::zero()), |acc, v| acc + v)
    }

    /// The approximation as a coefficient signal (declared Lipschitz).
    pub fn to_signal(&self) -> CoefficientSignal<F> {
        CoefficientSignal::fourier(self.modes.clone(), SignalClass::Holder(F::one()))
            .expect("smoothed modes form a valid signal")
    }
}

/// Smallest sample count whose discrete interpolant resolves every
/// frequency the kernel keeps at scale `sigma`.
pub fn required_samples<F: Real>(sigma: F, kernel: &SmoothingKernel<F>) -> usize {
    let top = (kernel.support_radius / sigma).ceil().to_usize().unwrap_or(usize::MAX / 4);
    2 * top + 1
}

/// `f_sigma = K_sigma * f`, applied spectrally: the coefficient at
/// frequency `q` is multiplied by `kernel.multiplier(sigma q)`.
pub fn smooth<F: Real>(f: &CoefficientSignal<F>, sigma: F, kernel: &SmoothingKernel<F>) -> Result<AnalyticApproximation<F>> {
    if !(sigma > F::zero() && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    if let SignalSource::Samples(values) = f.source() {
        let required = required_samples(sigma, kernel);
        if values.len() < required {
            return Err(Error::InsufficientSamples {
                required,
                available: values.len(),
            });
        }
    }
    let modes = f
        .modes()
        .iter()
        .filter_map(|m| {
            let w = kernel.multiplier(sigma * F::lit(m.frequency as f64));
            (w > F::zero()).then(|| FourierMode::new(m.frequency, w * m.cos, w * m.sin))
        })
        .collect();
    Ok(AnalyticApproximation { sigma, modes })
}

/// Complex sample set on the strip `|Im t| <= width`: `real_points`
/// uniform abscissae in `[0, 1)` times `imag_levels` uniform ordinates in
/// `[-width, width]` (both edges included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripGrid {
    pub real_points: usize,
    pub imag_levels: usize,
}

impl Default for StripGrid {
    fn default() -> Self {
        Self {
            real_points: 256,
            imag_levels: 5,
        }
    }
}

impl StripGrid {
    pub fn points<F: Real>(&self, width: F) -> Vec<Complex<F>> {
        let levels = self.imag_levels.max(2);
        let mut out = Vec::with_capacity(self.real_points * levels);
        for a in 0..self.real_points {
            let re = F::from_usize_lossy(a) / F::from_usize_lossy(self.real_points);
            for b in 0..levels {
                let frac = F::from_usize_lossy(b) / F::from_usize_lossy(levels - 1);
                out.push(Complex::new(re, width * (F::two() * frac - F::one())));
            }
        }
        out
    }
}

/// Largest modulus of `approx` over `grid` on the strip of width
/// `strip_width`.
pub fn strip_bound<F: Real>(approx: &AnalyticApproximation<F>, strip_width: F, grid: &StripGrid) -> F {
    grid.points(strip_width)
        .into_iter()
        .map(|z| approx.eval_complex(z).norm())
        .fold(F::zero(), F::max)
}

/// Grid estimate of `sup|f| + sup |f(x) - f(y)| / |x - y|^gamma` over
/// `0 < |x - y| < 1`, using `samples` points and all lags up to half a period.
pub fn holder_norm_estimate<F: Real>(f: &CoefficientSignal<F>, gamma: F, samples: usize) -> F {
    let values = f.sample_grid(samples);
    let sup = values.iter().fold(F::zero(), |m, v| m.max(v.abs()));
    let mut quotient = F::zero();
    let mut lag = 1;
    while lag <= samples / 2 {
        let dist = F::from_usize_lossy(lag) / F::from_usize_lossy(samples);
        let weight = dist.powf(gamma);
        for i in 0..samples {
            let diff = (values[(i + lag) % samples] - values[i]).abs();
            quotient = quotient.max(diff / weight);
        }
        lag = if lag < 16 { lag + 1 } else { lag + lag / 8 };
    }
    sup + quotient
}

/// Sup over `grid_points` uniform real times of `|f_sigma - f|`.
pub fn sup_error<F: Real>(f: &CoefficientSignal<F>, approx: &AnalyticApproximation<F>, grid_points: usize) -> F {
    (0..grid_points)
        .map(|i| {
            let t = F::from_usize_lossy(i) / F::from_usize_lossy(grid_points);
            (approx.eval(t) - f.eval(t)).abs()
        })
        .fold(F::zero(), F::max)
}

#[cfg(test)]
mod tests;
