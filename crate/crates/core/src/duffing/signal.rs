//! One-periodic coefficient signals `p_i(t)`.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `cos * cos(2 pi k t) + sin * sin(2 pi k t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierMode<F> {
    pub frequency: u32,
    pub cos: F,
    pub sin: F,
}

impl<F: Real> FourierMode<F> {
    pub fn new(frequency: u32, cos: F, sin: F) -> Self {
        Self { frequency, cos, sin }
    }
}

/// Regularity the signal is declared to have.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalClass<F> {
    /// Hölder continuous with the given exponent in (0, 1].
    Holder(F),
    /// Only integrability is claimed.
    Integrable,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignalSource<F> {
    Fourier,
    /// Uniform samples over `[0, 1)`, interpolated trigonometrically.
    Samples(Vec<F>),
}

/// A real one-periodic signal held as a finite Fourier series.
///
/// Sample-based signals are converted once to their discrete Fourier
/// interpolant, so evaluation and smoothing share one representation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSignal<F> {
    modes: Vec<FourierMode<F>>,
    source: SignalSource<F>,
    class: SignalClass<F>,
    /// All frequencies are within a small factor of the mode count, so
    /// evaluation runs a rotation recurrence instead of one `sin_cos` per
    /// mode.
    dense: bool,
    max_frequency: u32,
}

impl<F: Real> CoefficientSignal<F> {
    pub fn zero() -> Self {
        Self::from_modes(Vec::new(), SignalClass::Holder(F::one()))
    }

    pub fn constant(value: F) -> Self {
        Self::from_modes(vec![FourierMode::new(0, value, F::zero())], SignalClass::Holder(F::one()))
    }

    /// Trigonometric polynomial; repeated frequencies are summed and zero
    /// modes dropped.
    pub fn fourier(modes: Vec<FourierMode<F>>, class: SignalClass<F>) -> Result<Self> {
        validate_class(class)?;
        for m in &modes {
            if !(m.cos.is_finite() && m.sin.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite amplitude at frequency {}", m.frequency)));
            }
        }
        Ok(Self::from_modes(modes, class))
    }

    /// Trigonometric interpolant of uniform samples `values[m] = f(m / N)`.
    pub fn samples(values: Vec<F>, class: SignalClass<F>) -> Result<Self> {
        validate_class(class)?;
        let n = values.len();
        if n == 0 {
            return Err(Error::InsufficientSamples { required: 1, available: 0 });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite sample".into()));
        }
        let mut buf: Vec<Complex<F>> = values.iter().map(|&v| Complex::new(v, F::zero())).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = F::one() / F::from_usize_lossy(n);
        let mut modes = Vec::with_capacity(n / 2 + 1);
        modes.push(FourierMode::new(0, buf[0].re * scale, F::zero()));
        for (k, c) in buf.iter().enumerate().take(n.div_ceil(2)).skip(1) {
            let two = F::two() * scale;
            modes.push(FourierMode::new(k as u32, c.re * two, -c.im * two));
        }
        if n % 2 == 0 && n > 1 {
            modes.push(FourierMode::new((n / 2) as u32, buf[n / 2].re * scale, F::zero()));
        }
        let mut s = Self::from_modes(modes, class);
        s.source = SignalSource::Samples(values);
        Ok(s)
    }

    /// `amplitude * sum_{k=0}^{levels} 2^{-gamma k} cos(2 pi 2^k t)`, a
    /// standard member of `C^gamma` that is not smoother.
    pub fn lacunary(gamma: F, amplitude: F, levels: u32) -> Result<Self> {
        let modes = (0..=levels)
            .map(|k| {
                let w = F::two().powf(-gamma * F::lit(k as f64));
                FourierMode::new(1u32 << k, amplitude * w, F::zero())
            })
            .collect();
        Self::fourier(modes, SignalClass::Holder(gamma))
    }

    fn from_modes(mut modes: Vec<FourierMode<F>>, class: SignalClass<F>) -> Self {
        modes.sort_by_key(|m| m.frequency);
        let mut merged: Vec<FourierMode<F>> = Vec::with_capacity(modes.len());
        for m in modes {
            let m = if m.frequency == 0 { FourierMode::new(0, m.cos, F::zero()) } else { m };
            match merged.last_mut() {
                Some(last) if last.frequency == m.frequency => {
                    last.cos += m.cos;
                    last.sin += m.sin;
                }
                _ => merged.push(m),
            }
        }
        merged.retain(|m| m.cos != F::zero() || m.sin != F::zero());
        let max_frequency = merged.last().map_or(0, |m| m.frequency);
        let dense = max_frequency as usize <= 4 * merged.len() + 4;
        Self {
            modes: merged,
            source: SignalSource::Fourier,
            class,
            dense,
            max_frequency,
        }
    }

    pub fn modes(&self) -> &[FourierMode<F>] {
        &self.modes
    }

    pub fn source(&self) -> &SignalSource<F> {
        &self.source
    }

    pub fn class(&self) -> SignalClass<F> {
        self.class
    }

    pub fn holder_exponent(&self) -> Option<F> {
        match self.class {
            SignalClass::Holder(g) => Some(g),
            SignalClass::Integrable => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn max_frequency(&self) -> u32 {
        self.max_frequency
    }

    /// Mean value (the zero mode).
    pub fn mean(&self) -> F {
        match self.modes.first() {
            Some(m) if m.frequency == 0 => m.cos,
            _ => F::zero(),
        }
    }

    pub fn eval(&self, t: F) -> F {
        if self.modes.is_empty() {
            return F::zero();
        }
        let frac = t - t.floor();
        if self.dense {
            let (s1, c1) = (F::tau() * frac).sin_cos();
            let (mut ck, mut sk) = (F::one(), F::zero());
            let mut k = 0u32;
            let mut acc = F::zero();
            for m in &self.modes {
                while k < m.frequency {
                    let c_next = ck * c1 - sk * s1;
                    sk = sk * c1 + ck * s1;
                    ck = c_next;
                    k += 1;
                }
                acc += m.cos * ck + m.sin * sk;
            }
            acc
        } else {
            self.modes
                .iter()
                .map(|m| {
                    let arg = F::lit(m.frequency as f64) * frac;
                    let (s, c) = (F::tau() * (arg - arg.floor())).sin_cos();
                    m.cos * c + m.sin * s
                })
                .sum()
        }
    }

    /// Values on the uniform grid `m / count`.
    pub fn sample_grid(&self, count: usize) -> Vec<F> {
        let inv = F::one() / F::from_usize_lossy(count);
        (0..count).map(|m| self.eval(F::from_usize_lossy(m) * inv)).collect()
    }

    /// `a * self + b * other`, keeping the weaker declared class.
    pub fn linear_combination(&self, a: F, other: &Self, b: F) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|m| FourierMode::new(m.frequency, a * m.cos, a * m.sin))
            .chain(other.modes.iter().map(|m| FourierMode::new(m.frequency, b * m.cos, b * m.sin)))
            .collect();
        let class = match (self.class, other.class) {
            (SignalClass::Holder(x), SignalClass::Holder(y)) => SignalClass::Holder(x.min(y)),
            _ => SignalClass::Integrable,
        };
        Self::from_modes(modes, class)
    }
}

fn validate_class<F: Real>(class: SignalClass<F>) -> Result<()> {
    if let SignalClass::Holder(g) = class {
        if !(g > F::zero() && g <= F::one()) {
            return Err(Error::InvalidArgument(format!("Hölder exponent {g} outside (0, 1]")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn fourier_matches_direct_sum() {
        let modes = vec![
            FourierMode::new(0, 0.5, 0.0),
            FourierMode::new(1, 1.0, -0.3),
            FourierMode::new(3, 0.2, 0.7),
            FourierMode::new(1, 0.5, 0.0),
        ];
        let s = CoefficientSignal::fourier(modes, SignalClass::Holder(1.0)).unwrap();
        assert_eq!(s.modes().len(), 3);
        for i in 0..50 {
            let t = -1.3 + 0.117 * i as f64;
            let want = 0.5 + 1.5 * (TAU * t).cos() - 0.3 * (TAU * t).sin()
                + 0.2 * (3.0 * TAU * t).cos()
                + 0.7 * (3.0 * TAU * t).sin();
            assert!((s.eval(t) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn samples_interpolate_exactly() {
        for n in [1usize, 2, 7, 16, 33] {
            let vals: Vec<f64> = (0..n).map(|m| ((m * 7 + 3) % 5) as f64 - 1.7).collect();
            let s = CoefficientSignal::samples(vals.clone(), SignalClass::Holder(0.5)).unwrap();
            for (m, v) in vals.iter().enumerate() {
                assert!((s.eval(m as f64 / n as f64) - v).abs() < 1e-12, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn samples_recover_band_limited_signal() {
        let f = |t: f64| 0.3 + (TAU * t).sin() - 0.25 * (5.0 * TAU * t).cos();
        let vals: Vec<f64> = (0..32).map(|m| f(m as f64 / 32.0)).collect();
        let s = CoefficientSignal::samples(vals, SignalClass::Holder(1.0)).unwrap();
        for i in 0..100 {
            let t = i as f64 * 0.0137;
            assert!((s.eval(t) - f(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn lacunary_is_sparse_and_correct() {
        let s = CoefficientSignal::lacunary(0.6, 1.0, 12).unwrap();
        assert_eq!(s.modes().len(), 13);
        assert_eq!(s.max_frequency(), 4096);
        let t: f64 = 0.123456;
        let want: f64 = (0..=12).map(|k| 2f64.powf(-0.6 * k as f64) * (TAU * (1u32 << k) as f64 * t).cos()).sum();
        assert!((s.eval(t) - want).abs() < 1e-12);
    }

    #[test]
    fn constant_and_zero() {
        assert_eq!(CoefficientSignal::constant(2.5).eval(0.77), 2.5);
        assert_eq!(CoefficientSignal::<f64>::zero().eval(0.3), 0.0);
        assert!(CoefficientSignal::<f64>::constant(0.0).is_zero());
    }

    #[test]
    fn rejects_bad_class() {
        assert!(CoefficientSignal::fourier(vec![], SignalClass::Holder(1.5)).is_err());
        assert!(CoefficientSignal::<f64>::samples(vec![], SignalClass::Integrable).is_err());
    }
}
