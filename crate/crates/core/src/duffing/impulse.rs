//! Impulse functions `(I_j, J_j)` acting on `(x, y)`.

use std::fmt;
use std::sync::Arc;

use crate::impulsive::JumpMap;
use crate::scalar::Real;

/// Which of the two impulse components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    /// Displacement increment `I`.
    I,
    /// Velocity increment `J`.
    J,
}

/// User supplied impulse pair.
pub trait ImpulseFunctions<F: Real>: Send + Sync {
    fn i(&self, x: F, y: F) -> F;
    fn j(&self, x: F, y: F) -> F;

    /// `d^{p+q} / dx^p dy^q` of the component, if known in closed form.
    fn partial(&self, _component: Component, _p: u32, _q: u32, _x: F, _y: F) -> Option<F> {
        None
    }

    /// Short label used in reports.
    fn name(&self) -> &str {
        "custom"
    }
}

/// `I = i0 + ix x + iy y`, `J = j0 + jx x + jy y`.
///
/// Covers the reflection kick `J = -2y` and the dissipative `J = -y/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineImpulse<F> {
    pub i: [F; 3],
    pub j: [F; 3],
}

impl<F: Real> AffineImpulse<F> {
    /// `I = 0`, `J = scale * y`.
    pub fn velocity_scaling(scale: F) -> Self {
        Self {
            i: [F::zero(); 3],
            j: [F::zero(), F::zero(), scale],
        }
    }
}

impl<F: Real> ImpulseFunctions<F> for AffineImpulse<F> {
    fn i(&self, x: F, y: F) -> F {
        self.i[0] + self.i[1] * x + self.i[2] * y
    }

    fn j(&self, x: F, y: F) -> F {
        self.j[0] + self.j[1] * x + self.j[2] * y
    }

    fn partial(&self, component: Component, p: u32, q: u32, x: F, y: F) -> Option<F> {
        let c = match component {
            Component::I => &self.i,
            Component::J => &self.j,
        };
        Some(match (p, q) {
            (0, 0) => c[0] + c[1] * x + c[2] * y,
            (1, 0) => c[1],
            (0, 1) => c[2],
            _ => F::zero(),
        })
    }

    fn name(&self) -> &str {
        "affine-kick"
    }
}

/// Catalog of impulse pairs.
///
/// Every built-in kind has `I = alpha` constant and `J` depending on `x`
/// only, so the impulse map is a shear composed with a translation.
#[derive(Clone)]
pub enum ImpulseEntry<F: Real> {
    /// `I = alpha`, `J = 0`.
    ConstantShift { alpha: F },
    /// `I = alpha`, `J = sum_m betas[m] x^m`.
    PolynomialKick { alpha: F, betas: Vec<F> },
    /// `I = alpha`, `J = beta sin(x + phase)`.
    SinusoidalKick { alpha: F, beta: F, phase: F },
    /// `I = alpha`, `J = beta exp(-x^power)` with `power` even.
    GaussianKick { alpha: F, beta: F, power: u32 },
    Custom(Arc<dyn ImpulseFunctions<F>>),
}

impl<F: Real> fmt::Debug for ImpulseEntry<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ConstantShift { alpha } => f.debug_struct("ConstantShift").field("alpha", alpha).finish(),
            Self::PolynomialKick { alpha, betas } => f
                .debug_struct("PolynomialKick")
                .field("alpha", alpha)
                .field("betas", betas)
                .finish(),
            Self::SinusoidalKick { alpha, beta, phase } => f
                .debug_struct("SinusoidalKick")
                .field("alpha", alpha)
                .field("beta", beta)
                .field("phase", phase)
                .finish(),
            Self::GaussianKick { alpha, beta, power } => f
                .debug_struct("GaussianKick")
                .field("alpha", alpha)
                .field("beta", beta)
                .field("power", power)
                .finish(),
            Self::Custom(c) => write!(f, "Custom({})", c.name()),
        }
    }
}

fn falling(m: usize, p: u32) -> f64 {
    (0..p as usize).map(|i| (m - i) as f64).product()
}

/// Coefficients of the polynomials `P_p` with
/// `d^p/dx^p exp(-x^m) = P_p(x) exp(-x^m)`, for `p = 0..=max_order`.
fn gaussian_polys(m: u32, max_order: u32) -> Vec<Vec<f64>> {
    let m = m as usize;
    let mut polys = vec![vec![1.0]];
    for _ in 0..max_order {
        let prev = polys.last().unwrap();
        let mut next = vec![0.0; prev.len() + m - 1];
        for (k, &c) in prev.iter().enumerate() {
            if k > 0 {
                next[k - 1] += c * k as f64;
            }
            next[k + m - 1] -= c * m as f64;
        }
        polys.push(next);
    }
    polys
}

fn horner<F: Real>(coefs: &[f64], x: F) -> F {
    coefs.iter().rev().fold(F::zero(), |acc, &c| acc * x + F::lit(c))
}

impl<F: Real> ImpulseEntry<F> {
    pub fn tag(&self) -> &str {
        match self {
            Self::ConstantShift { .. } => "constant-shift",
            Self::PolynomialKick { .. } => "poly-kick",
            Self::SinusoidalKick { .. } => "sin-kick",
            Self::GaussianKick { .. } => "gauss-kick",
            Self::Custom(c) => c.name(),
        }
    }

    pub fn is_custom(&self) -> bool {
        matches!(self, Self::Custom(_))
    }

    fn alpha(&self) -> F {
        match self {
            Self::ConstantShift { alpha }
            | Self::PolynomialKick { alpha, .. }
            | Self::SinusoidalKick { alpha, .. }
            | Self::GaussianKick { alpha, .. } => *alpha,
            Self::Custom(_) => F::zero(),
        }
    }

    pub fn i(&self, x: F, y: F) -> F {
        match self {
            Self::Custom(c) => c.i(x, y),
            _ => self.alpha(),
        }
    }

    pub fn j(&self, x: F, y: F) -> F {
        match self {
            Self::ConstantShift { .. } => F::zero(),
            Self::PolynomialKick { betas, .. } => betas.iter().rev().fold(F::zero(), |acc, &b| acc * x + b),
            Self::SinusoidalKick { beta, phase, .. } => *beta * (x + *phase).sin(),
            Self::GaussianKick { beta, power, .. } => *beta * (-x.powi(*power as i32)).exp(),
            Self::Custom(c) => c.j(x, y),
        }
    }

    /// Closed-form partial derivative; `None` only for custom entries that
    /// do not provide it.
    pub fn partial(&self, component: Component, p: u32, q: u32, x: F, y: F) -> Option<F> {
        if let Self::Custom(c) = self {
            return c.partial(component, p, q, x, y);
        }
        if p == 0 && q == 0 {
            return Some(match component {
                Component::I => self.i(x, y),
                Component::J => self.j(x, y),
            });
        }
        // Built-in kinds: I constant, J independent of y.
        if component == Component::I || q > 0 {
            return Some(F::zero());
        }
        Some(match self {
            Self::ConstantShift { .. } => F::zero(),
            Self::PolynomialKick { betas, .. } => {
                let mut acc = F::zero();
                for (m, &b) in betas.iter().enumerate().rev() {
                    if m < p as usize {
                        break;
                    }
                    acc += b * F::lit(falling(m, p)) * x.powi((m - p as usize) as i32);
                }
                acc
            }
            Self::SinusoidalKick { beta, phase, .. } => {
                let shift = F::FRAC_PI_2() * F::lit(p as f64);
                *beta * (x + *phase + shift).sin()
            }
            Self::GaussianKick { beta, power, .. } => {
                let polys = gaussian_polys(*power, p);
                *beta * horner(&polys[p as usize], x) * (-x.powi(*power as i32)).exp()
            }
            Self::Custom(_) => unreachable!(),
        })
    }

    /// `(I, J)` at `(x, y)`.
    pub fn increment(&self, x: F, y: F) -> [F; 2] {
        [self.i(x, y), self.j(x, y)]
    }

    /// Jacobian of `(I, J)`; custom entries without closed-form first
    /// derivatives fall back to central differences.
    pub fn increment_jacobian(&self, x: F, y: F) -> [[F; 2]; 2] {
        let get = |c, p, q| {
            self.partial(c, p, q, x, y)
                .unwrap_or_else(|| finite_difference(self, c, p, q, x, y, F::lit(1e-6)))
        };
        [
            [get(Component::I, 1, 0), get(Component::I, 0, 1)],
            [get(Component::J, 1, 0), get(Component::J, 0, 1)],
        ]
    }

    /// Issues preventing this entry from meeting the smallness and area
    /// hypotheses for nonlinearity degree `n`; empty when compliant.
    pub fn compliance_issues(&self, n: usize) -> Vec<String> {
        match self {
            Self::PolynomialKick { betas, .. } if betas.len() > n + 1 => {
                vec![format!("poly-kick degree {} exceeds n = {n}", betas.len() - 1)]
            }
            Self::SinusoidalKick { .. } | Self::GaussianKick { .. } if n < 5 => {
                vec![format!("{} needs n >= 5 for the smallness condition, got n = {n}", self.tag())]
            }
            Self::GaussianKick { power, .. } if *power == 0 || power % 2 == 1 => {
                vec![format!("gauss-kick power must be even and positive, got {power}")]
            }
            _ => Vec::new(),
        }
    }
}

impl<F: Real> JumpMap<F, 2> for ImpulseEntry<F> {
    fn increment(&self, u: &[F; 2]) -> [F; 2] {
        ImpulseEntry::increment(self, u[0], u[1])
    }

    fn jacobian(&self, u: &[F; 2]) -> [[F; 2]; 2] {
        self.increment_jacobian(u[0], u[1])
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Central finite difference of order `(p, q)` with step `h`.
pub fn finite_difference<F: Real>(
    entry: &ImpulseEntry<F>,
    component: Component,
    p: u32,
    q: u32,
    x: F,
    y: F,
    h: F,
) -> F {
    let f = |x: F, y: F| match component {
        Component::I => entry.i(x, y),
        Component::J => entry.j(x, y),
    };
    let half = F::half();
    let mut acc = F::zero();
    for a in 0..=p {
        for b in 0..=q {
            let sign = if (a + b) % 2 == 0 { F::one() } else { -F::one() };
            let w = F::lit(binomial(p, a) * binomial(q, b));
            let dx = (F::lit(p as f64) * half - F::lit(a as f64)) * h;
            let dy = (F::lit(q as f64) * half - F::lit(b as f64)) * h;
            acc += sign * w * f(x + dx, y + dy);
        }
    }
    acc / h.powi((p + q) as i32)
}

/// `dI/dx + dJ/dy + dI/dx dJ/dy - dI/dy dJ/dx`; zero exactly when the
/// impulse map `(x, y) + (I, J)` preserves oriented area, `-2` for the
/// orientation-reversing area-preserving reflection.
pub fn area_identity<F: Real>(entry: &ImpulseEntry<F>, x: F, y: F) -> F {
    let jac = entry.increment_jacobian(x, y);
    let (ix, iy, jx, jy) = (jac[0][0], jac[0][1], jac[1][0], jac[1][1]);
    ix + jy + ix * jy - iy * jx
}
