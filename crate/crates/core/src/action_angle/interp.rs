//! Interpolants used by the reference chart.

use crate::scalar::Real;

/// Quintic Hermite interpolation on one interval of width `h`, given value,
/// first and second derivative at both ends.
#[inline]
pub(crate) fn quintic_hermite<F: Real>(t: F, h: F, left: [F; 3], right: [F; 3]) -> F {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let l = F::lit;
    let h00 = F::one() - l(10.0) * t3 + l(15.0) * t4 - l(6.0) * t5;
    let h10 = t - l(6.0) * t3 + l(8.0) * t4 - l(3.0) * t5;
    let h20 = l(0.5) * (t2 - l(3.0) * t3 + l(3.0) * t4 - t5);
    let h01 = l(10.0) * t3 - l(15.0) * t4 + l(6.0) * t5;
    let h11 = -l(4.0) * t3 + l(7.0) * t4 - l(3.0) * t5;
    let h21 = l(0.5) * (t3 - l(2.0) * t4 + t5);
    left[0] * h00
        + h * left[1] * h10
        + h * h * left[2] * h20
        + right[0] * h01
        + h * right[1] * h11
        + h * h * right[2] * h21
}

/// Monotone piecewise cubic (Fritsch–Carlson) interpolant.
#[derive(Debug, Clone)]
pub struct Pchip<F> {
    xs: Vec<F>,
    ys: Vec<F>,
    ds: Vec<F>,
}

fn endpoint_slope<F: Real>(h0: F, h1: F, d0: F, d1: F) -> F {
    let d = ((F::two() * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        F::zero()
    } else if d0.signum() != d1.signum() && d.abs() > (F::lit(3.0) * d0).abs() {
        F::lit(3.0) * d0
    } else {
        d
    }
}

impl<F: Real> Pchip<F> {
    /// `xs` strictly increasing, at least two points.
    pub fn new(xs: Vec<F>, ys: Vec<F>) -> Self {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n, "pchip needs matching abscissae and ordinates");
        let h: Vec<F> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<F> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut ds = vec![F::zero(); n];
        if n == 2 {
            ds[0] = delta[0];
            ds[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > F::zero() {
                    let w1 = F::two() * h[k] + h[k - 1];
                    let w2 = h[k] + F::two() * h[k - 1];
                    ds[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            ds[0] = endpoint_slope(h[0], h[1], delta[0], delta[1]);
            ds[n - 1] = endpoint_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Self { xs, ys, ds }
    }

    /// Evaluates with clamping to the data range.
    pub fn eval(&self, x: F) -> F {
        let n = self.xs.len();
        let x = x.max(self.xs[0]).min(self.xs[n - 1]);
        let k = self.xs.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = F::two() * t3 - F::lit(3.0) * t2 + F::one();
        let h10 = t3 - F::two() * t2 + t;
        let h01 = -F::two() * t3 + F::lit(3.0) * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k] + h10 * h * self.ds[k] + h01 * self.ys[k + 1] + h11 * h * self.ds[k + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quintic_reproduces_quintic() {
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - 0.3 * x.powi(5);
        let df = |x: f64| -2.0 + 1.5 * x * x - 1.5 * x.powi(4);
        let d2f = |x: f64| 3.0 * x - 6.0 * x.powi(3);
        let (a, b) = (0.3, 0.8);
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            let got = quintic_hermite(t, b - a, [f(a), df(a), d2f(a)], [f(b), df(b), d2f(b)]);
            assert!((got - f(a + t * (b - a))).abs() < 1e-14);
        }
    }

    #[test]
    fn pchip_is_monotone_and_interpolates() {
        let xs: Vec<f64> = vec![0.0, 0.1, 0.5, 0.6, 2.0];
        let ys: Vec<f64> = vec![0.0, 0.0, 1.0, 3.0, 3.1];
        let p = Pchip::new(xs.clone(), ys.clone());
        for (x, y) in xs.iter().zip(&ys) {
            assert!((p.eval(*x) - y).abs() < 1e-15);
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let v = p.eval(2.0 * i as f64 / 400.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }
}
