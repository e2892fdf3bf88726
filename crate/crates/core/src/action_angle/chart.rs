//! Reference solution `(X0, Y0)` of `X' = Y, Y' = -X^{2n+1}` through
//! `(1, 0)`, tabulated over one period.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::interp::{quintic_hermite, Pchip};
use crate::error::{Error, Result};
use crate::ode::{integrate_segment, FnField, SegmentOptions, SegmentOutcome, Tolerances};
use crate::quadrature;
use crate::scalar::{wrap_unit, Real};

/// Table nodes per period. Must be a multiple of 4.
pub const CHART_NODES: usize = 4096;

const CACHE_MAGIC: &str = "impulsive-duffing-chart 1";

/// Tabulated reference solution together with the constants of the
/// action-angle chart built on it.
#[derive(Debug, Clone)]
pub struct ReferenceChart<F> {
    n: usize,
    period: F,
    tol: F,
    /// `X0`, `Y0` at `s_i = i T0 / N`, `i = 0..=N` (last node repeats the first).
    xs: Vec<F>,
    ys: Vec<F>,
    /// `s` as a function of `X0` on the first quarter period.
    quarter_inverse: Pchip<F>,
    /// `s` as a function of `-Y0` on the part of the first quarter where
    /// `X0 >= 1/2`, where `X0` is too flat to invert.
    quarter_inverse_y: Pchip<F>,
    alpha: F,
    beta: F,
    c: F,
    d: F,
}

fn reference_field<F: Real>(n: usize) -> FnField<impl Fn(F, &[F; 2]) -> [F; 2] + Sync + Copy> {
    let k = 2 * n as i32 + 1;
    FnField(move |_t: F, u: &[F; 2]| [u[1], -u[0].powi(k)])
}

/// `T0` by quadrature of `T0/4 = sqrt(n+1) int_0^1 (1 - X^{2n+2})^{-1/2} dX`.
/// The substitution `X = 1 - u^2` removes the endpoint singularity.
pub fn period_by_quadrature<F: Real>(n: usize, tol: F) -> Result<F> {
    let m = F::lit((2 * n + 2) as f64);
    let integrand = |u: F| {
        let gap = -(m * (-u * u).ln_1p()).exp_m1();
        F::two() * u / gap.sqrt()
    };
    let quarter = quadrature::integrate(integrand, F::zero(), F::one(), tol)?;
    Ok(F::lit(4.0) * F::lit((n + 1) as f64).sqrt() * quarter)
}

/// `T0` as the first time the orbit from `(1, 0)` crosses `Y = 0` downward
/// after having visited `Y > 0`.
pub fn period_by_return_time<F: Real>(n: usize, tol: F) -> Result<F> {
    let field = reference_field::<F>(n);
    let opts = SegmentOptions::new(Tolerances::uniform(tol), F::lit(10.0)).with_dense(true);
    let chunk = F::one();
    let mut t = F::zero();
    let mut u = [F::one(), F::zero()];
    let mut seen_positive = false;
    for _ in 0..1000 {
        let res = integrate_segment(&field, t, t + chunk, u, &opts)?;
        let dense = res
            .dense
            .ok_or_else(|| Error::Numerical("missing dense output".into()))?;
        let mut prev_y = u[1];
        for step in &dense.steps {
            let y_end = step.eval(step.t1())[1];
            if seen_positive && prev_y > F::zero() && y_end <= F::zero() {
                let (mut lo, mut hi) = (step.t0, step.t1());
                for _ in 0..200 {
                    let mid = F::half() * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if step.eval(mid)[1] > F::zero() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(F::half() * (lo + hi));
            }
            if y_end > F::zero() {
                seen_positive = true;
            }
            prev_y = y_end;
        }
        match res.outcome {
            SegmentOutcome::Reached { t: t1, u: u1 } => {
                t = t1;
                u = u1;
            }
            SegmentOutcome::Escaped { .. } => {
                return Err(Error::Numerical("reference orbit left the unit level set".into()))
            }
        }
    }
    Err(Error::Numerical("no return to the starting half-line".into()))
}

fn strictly_increasing<F: Real>(pairs: impl Iterator<Item = (F, F)>) -> (Vec<F>, Vec<F>) {
    let mut xs: Vec<F> = Vec::new();
    let mut ys = Vec::new();
    for (x, y) in pairs {
        if xs.last().map_or(true, |&last| x > last) {
            xs.push(x);
            ys.push(y);
        }
    }
    (xs, ys)
}

impl<F: Real> ReferenceChart<F> {
    /// Builds the chart for degree `n`, computing `T0` twice (quadrature and
    /// return time) and failing if the two disagree by more than `tol`.
    pub fn compute(n: usize, tol: F) -> Result<Self> {
        Self::check_args(n, tol)?;
        let eps = F::epsilon();
        let quad_tol = (tol * F::lit(1e-3)).max(eps * F::lit(100.0));
        let ode_tol = (tol * F::lit(1e-3)).min(F::lit(1e-14)).max(eps * F::lit(50.0));
        let by_quadrature = period_by_quadrature(n, quad_tol)?;
        let by_return = period_by_return_time(n, ode_tol)?;
        if !((by_quadrature - by_return).abs() <= tol) {
            return Err(Error::PeriodMismatch {
                quadrature: by_quadrature.to_f64_lossy(),
                return_time: by_return.to_f64_lossy(),
            });
        }
        let period = by_quadrature;
        let quarter = CHART_NODES / 4;
        let h = period / F::from_usize_lossy(CHART_NODES);
        let field = reference_field::<F>(n);
        let opts = SegmentOptions::new(Tolerances::uniform(ode_tol), F::lit(10.0));
        let mut xs = vec![F::zero(); CHART_NODES + 1];
        let mut ys = vec![F::zero(); CHART_NODES + 1];
        let mut u = [F::one(), F::zero()];
        xs[0] = u[0];
        ys[0] = u[1];
        for i in 1..=quarter {
            let t0 = h * F::from_usize_lossy(i - 1);
            let t1 = h * F::from_usize_lossy(i);
            let res = integrate_segment(&field, t0, t1, u, &opts)?;
            u = res.outcome.state();
            xs[i] = u[0];
            ys[i] = u[1];
        }
        for i in quarter + 1..=2 * quarter {
            xs[i] = -xs[2 * quarter - i];
            ys[i] = ys[2 * quarter - i];
        }
        for i in 2 * quarter + 1..=CHART_NODES {
            xs[i] = xs[CHART_NODES - i];
            ys[i] = -ys[CHART_NODES - i];
        }
        Ok(Self::assemble(n, period, tol, xs, ys))
    }

    fn check_args(n: usize, tol: F) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidArgument("degree n must be at least 1".into()));
        }
        if !(tol > F::zero() && tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("chart tolerance must be positive, got {tol}")));
        }
        Ok(())
    }

    fn assemble(n: usize, period: F, tol: F, xs: Vec<F>, ys: Vec<F>) -> Self {
        let quarter = CHART_NODES / 4;
        let h = period / F::from_usize_lossy(CHART_NODES);
        let s = |i: usize| h * F::from_usize_lossy(i);
        let (qx, qs) = strictly_increasing((0..=quarter).rev().map(|i| (xs[i], s(i))));
        let (yx, ysv) = strictly_increasing((0..=quarter).filter(|&i| xs[i] >= F::half()).map(|i| (-ys[i], s(i))));
        let np2 = F::lit((n + 2) as f64);
        let alpha = F::one() / np2;
        let beta = F::lit((n + 1) as f64) / np2;
        let c = F::one() / (alpha * period);
        let d = c.powf(F::two() * beta) / F::lit((2 * n + 2) as f64);
        Self {
            n,
            period,
            tol,
            xs,
            ys,
            quarter_inverse: Pchip::new(qx, qs),
            quarter_inverse_y: Pchip::new(yx, ysv),
            alpha,
            beta,
            c,
            d,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Minimal period `T0`.
    pub fn period(&self) -> F {
        self.period
    }

    pub fn tolerance(&self) -> F {
        self.tol
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn beta(&self) -> F {
        self.beta
    }

    pub fn c(&self) -> F {
        self.c
    }

    pub fn d(&self) -> F {
        self.d
    }

    pub fn node_count(&self) -> usize {
        CHART_NODES
    }

    /// Table node `i` as `(s_i, X0, Y0)`.
    pub fn node(&self, i: usize) -> (F, F, F) {
        let s = self.period * F::from_usize_lossy(i) / F::from_usize_lossy(CHART_NODES);
        (s, self.xs[i], self.ys[i])
    }

    /// Monotone interpolant of `s -> X0(s)` inverted on `[0, T0/4]`.
    pub fn quarter_inverse(&self, x: F) -> F {
        self.quarter_inverse.eval(x)
    }

    fn power(&self, x: F) -> F {
        x.powi(2 * self.n as i32 + 1)
    }

    fn jets(&self, i: usize) -> ([F; 3], [F; 3]) {
        let (x, y) = (self.xs[i], self.ys[i]);
        let k = F::lit((2 * self.n + 1) as f64);
        let x_pow = self.power(x);
        let x_pow_lower = x.powi(2 * self.n as i32);
        ([x, y, -x_pow], [y, -x_pow, -k * x_pow_lower * y])
    }

    /// `(X0, Y0)` at phase `phi = s / T0` (any real; period 1).
    pub fn at_phase(&self, phi: F) -> (F, F) {
        let pos = wrap_unit(phi) * F::from_usize_lossy(CHART_NODES);
        let i = pos.floor().to_usize().unwrap_or(0).min(CHART_NODES - 1);
        let t = pos - F::from_usize_lossy(i);
        let h = self.period / F::from_usize_lossy(CHART_NODES);
        let (lx, ly) = self.jets(i);
        let (rx, ry) = self.jets(i + 1);
        (quintic_hermite(t, h, lx, rx), quintic_hermite(t, h, ly, ry))
    }

    /// `(X0(s), Y0(s))`.
    pub fn at(&self, s: F) -> (F, F) {
        self.at_phase(s / self.period)
    }

    /// Derivative of the interpolant of `X0` at `s`, by the interpolant of
    /// `Y0` (the two are built from consistent jets).
    pub fn derivative_at(&self, s: F) -> (F, F) {
        let (x, y) = self.at(s);
        (y, -self.power(x))
    }

    /// Solves for `s` in `[0, T0/4]` with `X0(s) = u`, `Y0(s) = -v`, where
    /// `u, v >= 0` lie on the unit level curve.
    pub(crate) fn quarter_time(&self, u: F, v: F) -> F {
        let quarter = self.period / F::lit(4.0);
        let use_x = u < F::lit(0.7);
        let mut s = if use_x {
            self.quarter_inverse.eval(u)
        } else {
            self.quarter_inverse_y.eval(v)
        };
        for _ in 0..12 {
            let (x, y) = self.at(s);
            let step = if use_x {
                (x - u) / y
            } else {
                (y + v) / -self.power(x)
            };
            if !step.is_finite() {
                break;
            }
            let next = (s - step).max(F::zero()).min(quarter);
            let done = (next - s).abs() <= F::epsilon() * F::lit(4.0) * quarter;
            s = next;
            if done {
                break;
            }
        }
        s
    }

    /// Largest violation of `(n+1) Y0^2 + X0^{2n+2} = 1` over the nodes.
    pub fn level_residual(&self) -> F {
        let np1 = F::lit((self.n + 1) as f64);
        self.xs
            .iter()
            .zip(&self.ys)
            .map(|(&x, &y)| (np1 * y * y + x * self.power(x) - F::one()).abs())
            .fold(F::zero(), F::max)
    }

    /// Writes the table in the text cache format (see the README).
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(CHART_NODES * 48);
        let _ = writeln!(out, "{CACHE_MAGIC}");
        let _ = writeln!(out, "n {}", self.n);
        let _ = writeln!(out, "period {:e}", self.period.to_f64_lossy());
        let _ = writeln!(out, "nodes {CHART_NODES}");
        let _ = writeln!(out, "tol {:e}", self.tol.to_f64_lossy());
        for i in 0..CHART_NODES {
            let _ = writeln!(out, "{:e} {:e}", self.xs[i].to_f64_lossy(), self.ys[i].to_f64_lossy());
        }
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
        }
        std::fs::write(path, out).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    }

    /// Reads a table written by [`ReferenceChart::save`], checking the
    /// header against `(n, tol)` and the level identity against `tol`.
    pub fn load(path: &Path, n: usize, tol: F) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        let bad = |what: &str| Error::Cache(format!("{}: {what}", path.display()));
        let mut lines = text.lines();
        if lines.next() != Some(CACHE_MAGIC) {
            return Err(bad("unrecognized header"));
        }
        let mut field = |key: &str| -> Result<f64> {
            let line = lines.next().ok_or_else(|| bad("truncated header"))?;
            let (k, v) = line.split_once(' ').ok_or_else(|| bad("malformed header line"))?;
            if k != key {
                return Err(bad(&format!("expected `{key}`, found `{k}`")));
            }
            v.trim().parse::<f64>().map_err(|_| bad(&format!("unparsable `{key}`")))
        };
        let file_n = field("n")?;
        let period = field("period")?;
        let nodes = field("nodes")?;
        let file_tol = field("tol")?;
        if file_n != n as f64 || nodes != CHART_NODES as f64 || file_tol != tol.to_f64_lossy() {
            return Err(bad("header does not match the requested chart"));
        }
        let mut xs = Vec::with_capacity(CHART_NODES + 1);
        let mut ys = Vec::with_capacity(CHART_NODES + 1);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split_whitespace().map(str::parse::<f64>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(x)), Some(Ok(y)), None) => {
                    xs.push(F::lit(x));
                    ys.push(F::lit(y));
                }
                _ => return Err(bad("malformed table row")),
            }
        }
        if xs.len() != CHART_NODES {
            return Err(bad("wrong number of table rows"));
        }
        xs.push(xs[0]);
        ys.push(ys[0]);
        let chart = Self::assemble(n, F::lit(period), tol, xs, ys);
        if !(chart.level_residual() <= tol) {
            return Err(bad("table violates the level identity"));
        }
        Ok(chart)
    }

    /// Cache file name for `(n, tol)` inside `dir`.
    pub fn cache_path(dir: &Path, n: usize, tol: F) -> PathBuf {
        dir.join(format!("chart-n{n}-tol{:e}.txt", tol.to_f64_lossy()))
    }

    /// Loads the chart from `dir` if a matching cache file exists, otherwise
    /// computes it and writes the cache.
    pub fn cached(n: usize, tol: F, dir: &Path) -> Result<Self> {
        Self::check_args(n, tol)?;
        let path = Self::cache_path(dir, n, tol);
        if path.exists() {
            if let Ok(chart) = Self::load(&path, n, tol) {
                return Ok(chart);
            }
        }
        let chart = Self::compute(n, tol)?;
        chart.save(&path)?;
        Ok(chart)
    }
}

/// Builds the reference chart for degree `n` (see [`ReferenceChart::compute`]).
pub fn compute_reference<F: Real>(n: usize, tol: F) -> Result<ReferenceChart<F>> {
    ReferenceChart::compute(n, tol)
}
