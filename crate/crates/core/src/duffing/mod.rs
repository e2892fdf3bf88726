//! Impulsive Duffing oscillators
//! `x'' + x^{2n+1} + sum_{i=0}^{2n} p_i(t) x^i = 0` written as a planar
//! system in `(x, y = x')`.

mod impulse;
mod signal;
mod smallness;

pub use impulse::{area_identity, finite_difference, AffineImpulse, Component, ImpulseEntry, ImpulseFunctions};
pub use signal::{CoefficientSignal, FourierMode, SignalClass, SignalSource};
pub use smallness::{smallness_report, Confidence, SmallnessGrid, SmallnessReport};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::impulsive::{ImpulseSchedule, ImpulsiveSystem, JumpMap};
use crate::ode::VectorField;
use crate::scalar::Real;

/// Degree `n` and the coefficients `p_0, ..., p_{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DuffingParams<F> {
    n: usize,
    coefficients: Vec<CoefficientSignal<F>>,
}

impl<F: Real> DuffingParams<F> {
    pub fn new(n: usize, coefficients: Vec<CoefficientSignal<F>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("nonlinearity degree n must be at least 1".into()));
        }
        if coefficients.len() != 2 * n + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients p_0..p_{} for n = {n}, got {}",
                2 * n + 1,
                2 * n,
                coefficients.len()
            )));
        }
        Ok(Self { n, coefficients })
    }

    /// All `p_i = 0`.
    pub fn unforced(n: usize) -> Result<Self> {
        Self::new(n, vec![CoefficientSignal::zero(); 2 * n + 1])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[CoefficientSignal<F>] {
        &self.coefficients
    }

    pub fn is_unforced(&self) -> bool {
        self.coefficients.iter().all(CoefficientSignal::is_zero)
    }

    /// Smallest declared Hölder exponent among `p_i` with `i >= n + 1`;
    /// `None` if some such coefficient is only declared integrable. Zero
    /// coefficients are ignored; with none left the result is 1.
    pub fn high_order_exponent(&self) -> Option<F> {
        let mut gamma = F::one();
        for p in &self.coefficients[self.n + 1..] {
            if p.is_zero() {
                continue;
            }
            gamma = gamma.min(p.holder_exponent()?);
        }
        Some(gamma)
    }

    /// Checks `gamma > 1 - 1/n` for the high-order coefficients.
    pub fn check_regularity(&self) -> Result<()> {
        let bound = F::one() - F::one() / F::from_usize_lossy(self.n);
        match self.high_order_exponent() {
            Some(g) if g > bound => Ok(()),
            Some(g) => Err(Error::InvalidArgument(format!(
                "Hölder exponent {g} of p_i (i >= {}) must exceed 1 - 1/n = {bound}",
                self.n + 1
            ))),
            None => Err(Error::InvalidArgument(format!(
                "coefficients p_i with i >= {} must be declared Hölder continuous",
                self.n + 1
            ))),
        }
    }
}

/// `h_0(x, y) = x^{2n+2} / (2(n+1)) + y^2 / 2`.
pub fn h0_energy<F: Real>(n: usize, x: F, y: F) -> F {
    let m = 2 * n as i32 + 2;
    x.powi(m) / F::lit(m as f64) + F::half() * y * y
}

/// The planar vector field `(y, -x^{2n+1} - sum p_i(t) x^i)`.
#[derive(Debug, Clone)]
pub struct DuffingField<F> {
    params: Arc<DuffingParams<F>>,
    /// Indices of the nonzero coefficients.
    active: Vec<usize>,
}

impl<F: Real> DuffingField<F> {
    pub fn new(params: DuffingParams<F>) -> Self {
        let active = (0..params.coefficients.len())
            .filter(|&i| !params.coefficients[i].is_zero())
            .collect();
        Self {
            params: Arc::new(params),
            active,
        }
    }

    pub fn params(&self) -> &DuffingParams<F> {
        &self.params
    }

    /// `sum p_i(t) x^i` and its `x`-derivative.
    fn forcing(&self, t: F, x: F) -> (F, F) {
        let mut value = F::zero();
        let mut slope = F::zero();
        for &i in &self.active {
            let p = self.params.coefficients[i].eval(t);
            if i == 0 {
                value += p;
            } else {
                let xm = x.powi(i as i32 - 1);
                value += p * xm * x;
                slope += p * F::lit(i as f64) * xm;
            }
        }
        (value, slope)
    }
}

impl<F: Real> VectorField<F, 2> for DuffingField<F> {
    fn eval(&self, t: F, u: &[F; 2]) -> [F; 2] {
        let x = u[0];
        let x2n = x.powi(2 * self.params.n as i32);
        let forcing = if self.active.is_empty() { F::zero() } else { self.forcing(t, x).0 };
        [u[1], -x2n * x - forcing]
    }

    fn jacobian(&self, t: F, u: &[F; 2]) -> [[F; 2]; 2] {
        let n2 = 2 * self.params.n as i32;
        let slope = if self.active.is_empty() { F::zero() } else { self.forcing(t, u[0]).1 };
        [
            [F::zero(), F::one()],
            [-F::lit((n2 + 1) as f64) * u[0].powi(n2) - slope, F::zero()],
        ]
    }
}

/// Evaluates the Duffing vector field (free function form).
pub fn duffing_field<F: Real>(params: &DuffingParams<F>, t: F, state: [F; 2]) -> [F; 2] {
    DuffingField::new(params.clone()).eval(t, &state)
}

/// Impulsive Duffing system on the unit period.
pub type DuffingSystem<F> = ImpulsiveSystem<F, DuffingField<F>, 2>;

/// Builds the impulsive system from parameters, impulse times in `(0, 1)`
/// and one catalog entry per time.
pub fn duffing_system<F: Real>(
    params: DuffingParams<F>,
    times: Vec<F>,
    entries: Vec<ImpulseEntry<F>>,
) -> Result<DuffingSystem<F>> {
    let schedule = ImpulseSchedule::unit(times)?;
    let jumps = entries
        .into_iter()
        .map(|e| Arc::new(e) as Arc<dyn JumpMap<F, 2>>)
        .collect();
    ImpulsiveSystem::new(DuffingField::new(params), schedule, jumps)
}
