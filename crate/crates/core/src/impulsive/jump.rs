use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{euclid_norm, Real};

/// Increment `L_j(u)` applied at an impulse instant.
pub trait JumpMap<F: Real, const M: usize>: Send + Sync {
    fn increment(&self, u: &[F; M]) -> [F; M];

    /// `dL_j/du`, row-major. Defaults to central differences.
    fn jacobian(&self, u: &[F; M]) -> [[F; M]; M] {
        let mut jac = [[F::zero(); M]; M];
        for col in 0..M {
            let h = F::lit(1e-6) * (F::one() + u[col].abs());
            let mut up = *u;
            let mut dn = *u;
            up[col] += h;
            dn[col] -= h;
            let lp = self.increment(&up);
            let lm = self.increment(&dn);
            for row in 0..M {
                jac[row][col] = (lp[row] - lm[row]) / (h + h);
            }
        }
        jac
    }
}

/// `L = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroJump;

impl<F: Real, const M: usize> JumpMap<F, M> for ZeroJump {
    fn increment(&self, _u: &[F; M]) -> [F; M] {
        [F::zero(); M]
    }

    fn jacobian(&self, _u: &[F; M]) -> [[F; M]; M] {
        [[F::zero(); M]; M]
    }
}

/// State independent shift.
#[derive(Debug, Clone, Copy)]
pub struct ConstantJump<F, const M: usize>(pub [F; M]);

impl<F: Real, const M: usize> JumpMap<F, M> for ConstantJump<F, M> {
    fn increment(&self, _u: &[F; M]) -> [F; M] {
        self.0
    }

    fn jacobian(&self, _u: &[F; M]) -> [[F; M]; M] {
        [[F::zero(); M]; M]
    }
}

/// Closure-backed jump with a finite-difference Jacobian.
#[derive(Clone, Copy)]
pub struct FnJump<G>(pub G);

impl<F, G, const M: usize> JumpMap<F, M> for FnJump<G>
where
    F: Real,
    G: Fn(&[F; M]) -> [F; M] + Send + Sync,
{
    fn increment(&self, u: &[F; M]) -> [F; M] {
        (self.0)(u)
    }
}

/// `u + L(u)`.
pub fn apply_jump<F: Real, const M: usize>(u_pre: &[F; M], jump: &(impl JumpMap<F, M> + ?Sized)) -> [F; M] {
    let inc = jump.increment(u_pre);
    let mut out = *u_pre;
    for i in 0..M {
        out[i] += inc[i];
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSolveOptions<F> {
    /// Residual target, scaled by `max(1, |u_post|)`.
    pub tol: F,
    pub max_iter: usize,
}

impl<F: Real> Default for JumpSolveOptions<F> {
    fn default() -> Self {
        Self {
            tol: F::lit(1e-12),
            max_iter: 50,
        }
    }
}

fn residual<F: Real, const M: usize>(
    v: &[F; M],
    u_post: &[F; M],
    jump: &(impl JumpMap<F, M> + ?Sized),
) -> [F; M] {
    let mut g = apply_jump(v, jump);
    for i in 0..M {
        g[i] -= u_post[i];
    }
    g
}

/// Solves `v + L(v) = u_post` by damped Newton iteration.
///
/// The residual target is `opts.tol * max(1, |u_post|)` so that large states
/// are not held to an absolute accuracy below their round-off.
pub fn solve_jump_equation<F: Real, const M: usize>(
    u_post: &[F; M],
    jump: &(impl JumpMap<F, M> + ?Sized),
    guess: Option<[F; M]>,
    opts: &JumpSolveOptions<F>,
) -> Result<[F; M]> {
    if !(opts.tol > F::zero()) {
        return Err(Error::InvalidArgument(format!("jump tolerance {} must be positive", opts.tol)));
    }
    let target = opts.tol * euclid_norm(u_post).max(F::one());
    let mut v = guess.unwrap_or(*u_post);
    let mut g = residual(&v, u_post, jump);
    let mut r = euclid_norm(&g);
    let fail = |r: F, it: usize| Error::JumpEquationUnsolvable {
        residual: r.to_f64_lossy(),
        iterations: it,
    };
    for iter in 0..opts.max_iter {
        if !r.is_finite() {
            return Err(fail(r, iter));
        }
        if r <= target {
            return Ok(v);
        }
        let mut jac = jump.jacobian(&v);
        for (i, row) in jac.iter_mut().enumerate() {
            row[i] += F::one();
        }
        let mut rhs = g;
        for x in rhs.iter_mut() {
            *x = -*x;
        }
        let step = linalg::solve(jac, rhs).ok_or_else(|| fail(r, iter))?;
        let mut lambda = F::one();
        loop {
            let mut trial = v;
            for i in 0..M {
                trial[i] += lambda * step[i];
            }
            let g_trial = residual(&trial, u_post, jump);
            let r_trial = euclid_norm(&g_trial);
            if r_trial.is_finite() && r_trial <= (F::one() - F::lit(1e-4) * lambda) * r {
                v = trial;
                g = g_trial;
                r = r_trial;
                break;
            }
            lambda *= F::half();
            if lambda < F::lit(1e-10) {
                // No descent: accept if already at round-off level.
                if r <= target {
                    return Ok(v);
                }
                return Err(fail(r, iter + 1));
            }
        }
    }
    if r <= target {
        Ok(v)
    } else {
        Err(fail(r, opts.max_iter))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_examples() {
        assert_eq!(apply_jump(&[3.0, -2.0], &ZeroJump), [3.0, -2.0]);
        assert_eq!(apply_jump(&[1.0], &ConstantJump([-1.0])), [0.0]);
        assert_eq!(apply_jump(&[1.0, 2.0], &ConstantJump([0.5, 0.0])), [1.5, 2.0]);
    }

    #[test]
    fn solve_identity_and_constant() {
        let o = JumpSolveOptions::default();
        assert_eq!(solve_jump_equation(&[4.0, 1.0], &ZeroJump, None, &o).unwrap(), [4.0, 1.0]);
        let v: [f64; 1] = solve_jump_equation(&[0.0], &ConstantJump([-1.0]), None, &o).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14);
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn linear_jump_matches_bisection() {
        let jump = FnJump(|v: &[f64; 1]| [0.1 * v[0]]);
        let v = solve_jump_equation(&[1.1], &jump, None, &JumpSolveOptions::default()).unwrap();
        let oracle = bisect(|x| x + 0.1 * x - 1.1, 0.0, 10.0);
        assert!((v[0] - 1.0).abs() < 1e-12);
        assert!((v[0] - oracle).abs() < 1e-12);
    }

    #[test]
    fn nonlinear_jump_matches_bisection() {
        let jump = FnJump(|v: &[f64; 1]| [0.3 * v[0].sin() + 0.2 * v[0].powi(3)]);
        let v = solve_jump_equation(&[5.0], &jump, None, &JumpSolveOptions::default()).unwrap();
        let oracle = bisect(|x| x + 0.3 * x.sin() + 0.2 * x.powi(3) - 5.0, 0.0, 10.0);
        assert!((v[0] - oracle).abs() < 1e-12, "{} vs {oracle}", v[0]);
    }

    #[test]
    fn non_invertible_jump_reported() {
        // v + L(v) = v^2 + 2 has no real preimage of 0.
        let jump = FnJump(|v: &[f64; 1]| [v[0] * v[0] - v[0] + 2.0]);
        let err = solve_jump_equation(&[0.0], &jump, None, &JumpSolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::JumpEquationUnsolvable { .. }));
        // Projection onto an axis: singular Jacobian of v + L(v).
        let jump = FnJump(|v: &[f64; 2]| [0.0, -v[1]]);
        let err = solve_jump_equation(&[1.0, 1.0], &jump, None, &JumpSolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::JumpEquationUnsolvable { .. }));
    }

    #[test]
    fn planar_shear_inverse() {
        let jump = FnJump(|v: &[f64; 2]| [0.0, 0.3 * v[0] + 0.1 * v[0].powi(3)]);
        let pre = [1.7, -0.4];
        let post = apply_jump(&pre, &jump);
        let v = solve_jump_equation(&post, &jump, Some([0.0, 0.0]), &JumpSolveOptions::default()).unwrap();
        assert!((v[0] - pre[0]).abs() < 1e-12 && (v[1] - pre[1]).abs() < 1e-12);
    }
}
