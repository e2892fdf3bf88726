//! Weighted derivative suprema of impulse functions at large energy.

use super::h0_energy;
use super::impulse::{finite_difference, Component, ImpulseEntry};
use crate::scalar::Real;

/// Sample points `(x, y)` with their energy `h_0`.
#[derive(Debug, Clone)]
pub struct SmallnessGrid<F> {
    pub points: Vec<(F, F, F)>,
    pub energy_min: F,
    pub energy_max: F,
}

impl<F: Real> SmallnessGrid<F> {
    /// Energy levels log-spaced over `[e, e * 10^decades]`, each traced by
    /// `angles` points of the generalized polar parametrization
    /// `x = (2(n+1)h)^{1/(2n+2)} sgn(cos phi) |cos phi|^{1/(n+1)}`,
    /// `y = sqrt(2h) sin phi`, keeping points with `x^2 + y^2 >= e`. The
    /// angles include the axes when `angles` is a multiple of 4.
    pub fn log_energy(n: usize, e: F, decades: F, levels: usize, angles: usize) -> Self {
        let m = F::lit((2 * n + 2) as f64);
        let mut points = Vec::with_capacity(levels * angles);
        let levels = levels.max(2);
        for l in 0..levels {
            let frac = F::from_usize_lossy(l) / F::from_usize_lossy(levels - 1);
            let h = e * F::lit(10.0).powf(decades * frac);
            let rx = (m * h).powf(F::one() / m);
            let ry = (F::two() * h).sqrt();
            for a in 0..angles {
                let phi = F::tau() * F::from_usize_lossy(a) / F::from_usize_lossy(angles);
                let (s, c) = phi.sin_cos();
                let x = rx * c.signum() * c.abs().powf(F::two() / m);
                let y = ry * s;
                if x * x + y * y >= e {
                    points.push((x, y, h0_energy(n, x, y)));
                }
            }
        }
        Self {
            points,
            energy_min: e,
            energy_max: e * F::lit(10.0).powf(decades),
        }
    }

    /// Default grid: `h_0` in `[e, 1e6 e]`, 61 levels, 64 angles.
    pub fn standard(n: usize, e: F) -> Self {
        Self::log_energy(n, e, F::lit(6.0), 61, 64)
    }

    /// Points along the y-axis ray `x = 0`, `|y|` growing.
    pub fn vertical_ray(n: usize, e: F, decades: F, levels: usize) -> Self {
        let mut points = Vec::new();
        for l in 0..levels.max(2) {
            let frac = F::from_usize_lossy(l) / F::from_usize_lossy(levels.max(2) - 1);
            let h = e * F::lit(10.0).powf(decades * frac);
            let y = (F::two() * h).sqrt();
            points.push((F::zero(), y, h0_energy(n, F::zero(), y)));
        }
        Self {
            points,
            energy_min: e,
            energy_max: e * F::lit(10.0).powf(decades),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    /// All derivatives were evaluated in closed form.
    Exact,
    /// Some derivatives came from finite differences.
    FiniteDifference,
}

/// One weighted-derivative supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSup<F> {
    pub component: Component,
    pub p: u32,
    pub q: u32,
    pub sup: F,
    /// Supremum restricted to the lowest and highest energy decade.
    pub sup_low: F,
    pub sup_high: F,
}

impl<F: Real> WeightedSup<F> {
    /// Grows by more than a factor 2 from the lowest to the highest decade.
    pub fn grows(&self) -> bool {
        self.sup_high > F::two() * self.sup_low + F::lit(1e-12)
    }
}

#[derive(Debug, Clone)]
pub struct SmallnessReport<F> {
    pub n: usize,
    /// 21 entries for `I` followed by 21 for `J`, ordered by `p + q` then `p`.
    pub sups: Vec<WeightedSup<F>>,
    pub ceiling: F,
    pub confidence: Confidence,
    pub points: usize,
}

impl<F: Real> SmallnessReport<F> {
    pub fn get(&self, component: Component, p: u32, q: u32) -> Option<&WeightedSup<F>> {
        self.sups.iter().find(|s| s.component == component && s.p == p && s.q == q)
    }

    /// Terms exceeding the ceiling or growing with energy.
    pub fn offenders(&self) -> Vec<&WeightedSup<F>> {
        self.sups
            .iter()
            .filter(|s| !(s.sup <= self.ceiling) || s.grows())
            .collect()
    }

    /// Every term stays below the ceiling and none grows with energy.
    pub fn bounded(&self) -> bool {
        self.offenders().is_empty()
    }
}

/// Order pairs `(p, q)` with `p + q <= 5`.
pub fn derivative_orders() -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(21);
    for total in 0..=5u32 {
        for p in (0..=total).rev() {
            out.push((p, total - p));
        }
    }
    out
}

/// Suprema over `grid` of `|d^{p+q}I| h0^{p/(2n+2)+q/2}` and
/// `|d^{p+q}J| h0^{(p-n)/(2n+2)+q/2}` for all `p + q <= 5`, with a verdict
/// against `ceiling`.
pub fn smallness_report<F: Real>(
    entry: &ImpulseEntry<F>,
    n: usize,
    grid: &SmallnessGrid<F>,
    ceiling: F,
) -> SmallnessReport<F> {
    let m = F::lit((2 * n + 2) as f64);
    let low_cut = grid.energy_min * F::lit(10.0);
    let high_cut = grid.energy_max / F::lit(10.0);
    let mut confidence = Confidence::Exact;
    let mut sups = Vec::with_capacity(42);
    for component in [Component::I, Component::J] {
        for (p, q) in derivative_orders() {
            let shift = match component {
                Component::I => F::zero(),
                Component::J => F::from_usize_lossy(n),
            };
            let exponent = (F::lit(p as f64) - shift) / m + F::lit(q as f64) * F::half();
            let mut s = WeightedSup {
                component,
                p,
                q,
                sup: F::zero(),
                sup_low: F::zero(),
                sup_high: F::zero(),
            };
            for &(x, y, h) in &grid.points {
                let d = entry.partial(component, p, q, x, y).unwrap_or_else(|| {
                    confidence = Confidence::FiniteDifference;
                    finite_difference(entry, component, p, q, x, y, F::lit(1e-2))
                });
                let v = (d * h.powf(exponent)).abs();
                let v = if v.is_nan() { F::infinity() } else { v };
                s.sup = s.sup.max(v);
                if h <= low_cut {
                    s.sup_low = s.sup_low.max(v);
                }
                if h >= high_cut {
                    s.sup_high = s.sup_high.max(v);
                }
            }
            sups.push(s);
        }
    }
    SmallnessReport {
        n,
        sups,
        ceiling,
        confidence,
        points: grid.points.len(),
    }
}
