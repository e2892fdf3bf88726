//! Time-1 map of a unit-periodic impulsive planar system, composed from
//! flow segments between impulse instants and the impulse maps at them.

use crate::error::{Error, Result};
use crate::impulsive::{apply_jump, ImpulsiveSystem};
use crate::linalg::{det2, identity, mat2_mul, Mat2};
use crate::ode::{integrate_segment_observed, SegmentOptions, SegmentOutcome, Tolerances, VectorField};
use crate::scalar::Real;

/// The orbit left the studied region (or blew up) before `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapEscape<F> {
    pub time: F,
    pub state: [F; 2],
}

impl<F: Real> From<MapEscape<F>> for Error {
    fn from(e: MapEscape<F>) -> Self {
        Error::Escaped {
            time: e.time.to_f64_lossy(),
            radius: (e.state[0] * e.state[0] + e.state[1] * e.state[1]).sqrt().to_f64_lossy(),
        }
    }
}

/// A map of the plane that diagnostics can iterate.
pub trait PlanarMap<F: Real>: Sync {
    fn apply(&self, p: [F; 2]) -> Result<[F; 2], MapEscape<F>>;

    /// Image together with the number of clockwise revolutions the path
    /// from `p` to its image makes around the origin, when the map knows it.
    fn apply_with_turns(&self, p: [F; 2]) -> Result<([F; 2], Option<F>), MapEscape<F>> {
        Ok((self.apply(p)?, None))
    }
}

impl<F: Real, M: PlanarMap<F> + ?Sized> PlanarMap<F> for &M {
    fn apply(&self, p: [F; 2]) -> Result<[F; 2], MapEscape<F>> {
        (**self).apply(p)
    }

    fn apply_with_turns(&self, p: [F; 2]) -> Result<([F; 2], Option<F>), MapEscape<F>> {
        (**self).apply_with_turns(p)
    }
}

/// Closure-backed [`PlanarMap`], mainly for tests.
pub struct FnMap<G>(pub G);

impl<F, G> PlanarMap<F> for FnMap<G>
where
    F: Real,
    G: Fn([F; 2]) -> [F; 2] + Sync,
{
    fn apply(&self, p: [F; 2]) -> Result<[F; 2], MapEscape<F>> {
        Ok((self.0)(p))
    }
}

/// Knobs for [`TimeOneMap`].
#[derive(Debug, Clone, Copy)]
pub struct MapOptions<F> {
    pub tol: Tolerances<F>,
    /// Euclidean radius in `(x, y)` beyond which an orbit counts as escaped.
    pub escape_radius: F,
    pub max_steps: usize,
}

impl<F: Real> Default for MapOptions<F> {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            escape_radius: F::lit(1e6),
            max_steps: 2_000_000,
        }
    }
}

impl<F: Real> MapOptions<F> {
    fn segment(&self) -> SegmentOptions<F> {
        SegmentOptions::new(self.tol, self.escape_radius)
            .with_escape_dims(2)
            .with_max_steps(self.max_steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianMethod {
    Variational,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianRecord<F> {
    pub matrix: Mat2<F>,
    pub determinant: F,
    pub method: JacobianMethod,
    /// Product of the determinants of every flow monodromy and jump
    /// Jacobian in the composition (variational method only).
    pub factor_product: Option<F>,
}

/// Generalized polar angle of `(x, y)` on the level curves of
/// `x^{2n+2}/(2n+2) + y^2/2`, increasing counterclockwise.
fn level_angle<F: Real>(degree: usize, p: &[F; 2]) -> F {
    let m = F::lit((2 * degree + 2) as f64);
    let h = p[0].abs().powi(2 * degree as i32 + 2) / m + F::half() * p[1] * p[1];
    if h == F::zero() {
        return F::zero();
    }
    let u = p[0] / (m * h).powf(F::one() / m);
    let v = p[1] / (F::two() * h).sqrt();
    let c = u.signum() * u.abs().powi(degree as i32 + 1);
    v.atan2(c)
}

struct AngleTracker<F> {
    degree: usize,
    last: F,
    swept: F,
}

impl<F: Real> AngleTracker<F> {
    fn new(degree: usize, p: &[F; 2]) -> Self {
        Self {
            degree,
            last: level_angle(degree, p),
            swept: F::zero(),
        }
    }

    fn visit(&mut self, p: &[F; 2]) {
        let a = level_angle(self.degree, p);
        let mut d = a - self.last;
        let pi = F::PI();
        if d > pi {
            d -= F::tau();
        } else if d < -pi {
            d += F::tau();
        }
        self.swept += d;
        self.last = a;
    }

    /// Clockwise revolutions.
    fn turns(&self) -> F {
        -self.swept / F::tau()
    }
}

/// Augmented field `(u' = F(t, u), Phi' = DF(t, u) Phi)` with `Phi`
/// flattened row-major after the state.
struct Variational<'a, V>(&'a V);

impl<F: Real, V: VectorField<F, 2>> VectorField<F, 6> for Variational<'_, V> {
    fn eval(&self, t: F, z: &[F; 6]) -> [F; 6] {
        let u = [z[0], z[1]];
        let f = self.0.eval(t, &u);
        let j = self.0.jacobian(t, &u);
        [
            f[0],
            f[1],
            j[0][0] * z[2] + j[0][1] * z[4],
            j[0][0] * z[3] + j[0][1] * z[5],
            j[1][0] * z[2] + j[1][1] * z[4],
            j[1][0] * z[3] + j[1][1] * z[5],
        ]
    }
}

/// The time-1 map `P = P_k o Phi_k o ... o P_1 o Phi_1 o P_0`, where `P_j`
/// is the flow from `t_j` to `t_{j+1}` (with `t_0 = 0`, `t_{k+1} = 1`)
/// and `Phi_j` the impulse map at `t_j`.
pub struct TimeOneMap<F: Real, V> {
    system: ImpulsiveSystem<F, V, 2>,
    options: MapOptions<F>,
    /// Degree `n` used to count revolutions on `h_0` level curves.
    winding_degree: Option<usize>,
}

impl<F: Real, V: VectorField<F, 2>> TimeOneMap<F, V> {
    pub fn new(system: ImpulsiveSystem<F, V, 2>, options: MapOptions<F>) -> Result<Self> {
        system.schedule().check_unit_condition()?;
        options.tol.validate()?;
        if !(options.escape_radius > F::zero()) {
            return Err(Error::InvalidArgument("escape radius must be positive".into()));
        }
        Ok(Self {
            system,
            options,
            winding_degree: None,
        })
    }

    /// Enables revolution counting with the level curves of degree `n`.
    pub fn with_winding_degree(mut self, n: usize) -> Self {
        self.winding_degree = Some(n);
        self
    }

    pub fn system(&self) -> &ImpulsiveSystem<F, V, 2> {
        &self.system
    }

    pub fn options(&self) -> &MapOptions<F> {
        &self.options
    }

    /// Segment boundaries `0 = s_0 < t_1 < ... < t_k < s_{k+1} = 1`.
    fn nodes(&self) -> Vec<F> {
        let mut nodes = Vec::with_capacity(self.system.schedule().len() + 2);
        nodes.push(F::zero());
        nodes.extend_from_slice(self.system.schedule().base_times());
        nodes.push(F::one());
        nodes
    }

    fn run(&self, p: [F; 2], mut tracker: Option<&mut AngleTracker<F>>) -> Result<[F; 2], MapEscape<F>> {
        let opts = self.options.segment();
        let nodes = self.nodes();
        let mut u = p;
        for (seg, w) in nodes.windows(2).enumerate() {
            if seg > 0 {
                u = apply_jump(&u, self.system.jump(seg as i64 - 1));
                if let Some(tr) = tracker.as_deref_mut() {
                    tr.visit(&u);
                }
            }
            let res = match tracker.as_deref_mut() {
                Some(tr) => integrate_segment_observed(self.system.field(), w[0], w[1], u, &opts, |_, s| tr.visit(s)),
                None => integrate_segment_observed(self.system.field(), w[0], w[1], u, &opts, |_, _| {}),
            }
            .map_err(|_| MapEscape { time: w[0], state: u })?;
            match res.outcome {
                SegmentOutcome::Reached { u: next, .. } => u = next,
                SegmentOutcome::Escaped { t, u, .. } => return Err(MapEscape { time: t, state: u }),
            }
        }
        if !(u[0] * u[0] + u[1] * u[1]).sqrt().le(&self.options.escape_radius) {
            return Err(MapEscape { time: F::one(), state: u });
        }
        Ok(u)
    }

    /// State at `t = 1` of the solution with state `p` at `t = 0+`.
    pub fn evaluate(&self, p: [F; 2]) -> Result<[F; 2], MapEscape<F>> {
        self.run(p, None)
    }

    /// Jacobian by integrating the variational equations along each flow
    /// segment and multiplying by `I + DL_j` at each impulse.
    pub fn jacobian(&self, p: [F; 2]) -> Result<JacobianRecord<F>, MapEscape<F>> {
        let opts = SegmentOptions::new(self.options.tol, self.options.escape_radius)
            .with_escape_dims(2)
            .with_max_steps(self.options.max_steps);
        let field = Variational(self.system.field());
        let nodes = self.nodes();
        let mut u = p;
        let mut total: Mat2<F> = identity();
        let mut product = F::one();
        for (seg, w) in nodes.windows(2).enumerate() {
            if seg > 0 {
                let jump = self.system.jump(seg as i64 - 1);
                let mut dj = jump.jacobian(&u);
                dj[0][0] += F::one();
                dj[1][1] += F::one();
                product *= det2(&dj);
                total = mat2_mul(&dj, &total);
                u = apply_jump(&u, jump);
            }
            let z0 = [u[0], u[1], F::one(), F::zero(), F::zero(), F::one()];
            let res = integrate_segment_observed(&field, w[0], w[1], z0, &opts, |_, _| {})
                .map_err(|_| MapEscape { time: w[0], state: u })?;
            match res.outcome {
                SegmentOutcome::Reached { u: z, .. } => {
                    let mono = [[z[2], z[3]], [z[4], z[5]]];
                    product *= det2(&mono);
                    total = mat2_mul(&mono, &total);
                    u = [z[0], z[1]];
                }
                SegmentOutcome::Escaped { t, u: z, .. } => {
                    return Err(MapEscape { time: t, state: [z[0], z[1]] })
                }
            }
        }
        Ok(JacobianRecord {
            matrix: total,
            determinant: det2(&total),
            method: JacobianMethod::Variational,
            factor_product: Some(product),
        })
    }

    /// Central-difference Jacobian with step `h * max(1, |p_i|)`.
    pub fn jacobian_fd(&self, p: [F; 2], h: F) -> Result<JacobianRecord<F>, MapEscape<F>> {
        let mut m = [[F::zero(); 2]; 2];
        for col in 0..2 {
            let step = h * p[col].abs().max(F::one());
            let mut up = p;
            let mut dn = p;
            up[col] += step;
            dn[col] -= step;
            let fp = self.evaluate(up)?;
            let fm = self.evaluate(dn)?;
            for row in 0..2 {
                m[row][col] = (fp[row] - fm[row]) / (step + step);
            }
        }
        Ok(JacobianRecord {
            matrix: m,
            determinant: det2(&m),
            method: JacobianMethod::FiniteDifference,
            factor_product: None,
        })
    }
}

/// Default finite-difference step for [`TimeOneMap::jacobian_fd`].
pub const FD_STEP: f64 = 1e-6;

impl<F: Real, V: VectorField<F, 2>> PlanarMap<F> for TimeOneMap<F, V> {
    fn apply(&self, p: [F; 2]) -> Result<[F; 2], MapEscape<F>> {
        self.evaluate(p)
    }

    fn apply_with_turns(&self, p: [F; 2]) -> Result<([F; 2], Option<F>), MapEscape<F>> {
        match self.winding_degree {
            Some(n) => {
                let mut tracker = AngleTracker::new(n, &p);
                let image = self.run(p, Some(&mut tracker))?;
                Ok((image, Some(tracker.turns())))
            }
            None => Ok((self.evaluate(p)?, None)),
        }
    }
}

/// Orbit `p, P(p), ..., P^N(p)`, truncated at the first escape.
#[derive(Debug, Clone)]
pub struct Orbit<F> {
    pub points: Vec<[F; 2]>,
    pub escape: Option<MapEscape<F>>,
}

impl<F> Orbit<F> {
    pub fn truncated(&self) -> bool {
        self.escape.is_some()
    }
}

pub fn iterate<F: Real, M: PlanarMap<F> + ?Sized>(map: &M, p: [F; 2], count: usize) -> Orbit<F> {
    let mut points = Vec::with_capacity(count + 1);
    points.push(p);
    let mut cur = p;
    for _ in 0..count {
        match map.apply(cur) {
            Ok(next) => {
                points.push(next);
                cur = next;
            }
            Err(e) => return Orbit { points, escape: Some(e) },
        }
    }
    Orbit { points, escape: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_angle_quadrants() {
        let a = |x: f64, y: f64| level_angle(1, &[x, y]);
        assert_eq!(a(1.0, 0.0), 0.0);
        assert!((a(0.0, 1.0) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((a(-2.0, 0.0) - std::f64::consts::PI).abs() < 1e-15);
        assert!((a(0.0, -1.0) + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn iterate_closure_rotation() {
        let w = 0.1_f64;
        let (s, c) = (std::f64::consts::TAU * w).sin_cos();
        let map = FnMap(move |p: [f64; 2]| [c * p[0] - s * p[1], s * p[0] + c * p[1]]);
        let orbit = iterate(&map, [1.0, 0.0], 25);
        assert_eq!(orbit.points.len(), 26);
        for (k, p) in orbit.points.iter().enumerate() {
            let ang = std::f64::consts::TAU * w * k as f64;
            assert!((p[0] - ang.cos()).abs() < 1e-13 && (p[1] - ang.sin()).abs() < 1e-13);
        }
        assert_eq!(iterate(&map, [0.3, 0.4], 0).points, vec![[0.3, 0.4]]);
    }
}
