//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the solvers are generic over.
///
/// Implemented for `f32` and `f64`. The tolerances quoted throughout the
/// crate (1e-10 and below) are only attainable in `f64`; `f32` is supported
/// for cheap exploratory runs.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Converts an `f64` literal, panicking only for unrepresentable values.
    #[inline(always)]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline(always)]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline(always)]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn tau() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle measured in revolutions to `[0, 1)`.
pub fn wrap_unit<F: Real>(theta: F) -> F {
    let w = theta - theta.floor();
    // `x - floor(x)` can round up to exactly 1 for tiny negative inputs.
    if w >= F::one() {
        F::zero()
    } else {
        w
    }
}

/// Wraps an angle difference measured in revolutions to `(-1/2, 1/2]`.
pub fn wrap_centered<F: Real>(delta: F) -> F {
    let w = wrap_unit(delta);
    if w > F::half() {
        w - F::one()
    } else {
        w
    }
}

pub fn euclid_norm<F: Real>(u: &[F]) -> F {
    u.iter().fold(F::zero(), |acc, &x| acc + x * x).sqrt()
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ls_slope<F: Real>(xs: &[F], ys: &[F]) -> F {
    let n = F::from_usize_lossy(xs.len());
    let mx = xs.iter().copied().sum::<F>() / n;
    let my = ys.iter().copied().sum::<F>() / n;
    let mut sxy = F::zero();
    let mut sxx = F::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Log-log slope of `values` against `scales`.
pub fn loglog_slope<F: Real>(scales: &[F], values: &[F]) -> F {
    let xs: Vec<F> = scales.iter().map(|s| s.ln()).collect();
    let ys: Vec<F> = values.iter().map(|v| v.ln()).collect();
    ls_slope(&xs, &ys)
}
