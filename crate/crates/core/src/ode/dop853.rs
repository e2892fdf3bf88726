use super::dense::{DenseSegment, DenseStep};
use super::tableau::*;
use super::{EscapeCause, SegmentOptions, SegmentOutcome, SegmentResult, StepStats, VectorField};
use crate::error::{Error, Result};
use crate::scalar::Real;

const SAFE: f64 = 0.9;
const FAC1: f64 = 0.333;
const FAC2: f64 = 6.0;

#[inline(always)]
fn c<F: Real>(x: f64) -> F {
    F::lit(x)
}

/// `y + h * sum(coef_i * k_i)`
#[inline(always)]
fn comb<F: Real, const M: usize>(y: &[F; M], h: F, terms: &[(f64, &[F; M])]) -> [F; M] {
    let mut out = *y;
    for i in 0..M {
        let mut acc = F::zero();
        for &(a, k) in terms {
            acc += c::<F>(a) * k[i];
        }
        out[i] += h * acc;
    }
    out
}

#[inline(always)]
fn lin<F: Real, const M: usize>(terms: &[(f64, &[F; M])]) -> [F; M] {
    let mut out = [F::zero(); M];
    for i in 0..M {
        for &(a, k) in terms {
            out[i] += c::<F>(a) * k[i];
        }
    }
    out
}

fn escape_norm<F: Real, const M: usize>(u: &[F; M], dims: usize) -> F {
    let d = dims.min(M);
    let mut s = F::zero();
    for x in &u[..d] {
        s += *x * *x;
    }
    s.sqrt()
}

fn all_finite<F: Real, const M: usize>(u: &[F; M]) -> bool {
    u.iter().all(|x| x.is_finite())
}

/// Initial step guess (Hairer's `hinit` for an order-8 method).
fn initial_step<F, V, const M: usize>(
    field: &V,
    t: F,
    y: &[F; M],
    f0: &[F; M],
    dir: F,
    hmax: F,
    opts: &SegmentOptions<F>,
) -> F
where
    F: Real,
    V: VectorField<F, M> + ?Sized,
{
    let tol = opts.tol;
    let mut dnf = F::zero();
    let mut dny = F::zero();
    for i in 0..M {
        let sk = tol.atol + tol.rtol * y[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y[i] / sk).powi(2);
    }
    let mut h = if dnf <= c(1e-10) || dny <= c(1e-10) {
        c(1e-6)
    } else {
        (dny / dnf).sqrt() * c(0.01)
    };
    h = h.min(hmax);
    let mut y1 = *y;
    for i in 0..M {
        y1[i] += dir * h * f0[i];
    }
    let f1 = field.eval(t + dir * h, &y1);
    let mut der2 = F::zero();
    for i in 0..M {
        let sk = tol.atol + tol.rtol * y[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.abs().max(dnf.sqrt());
    let h1 = if !der12.is_finite() {
        h * c(1e-3)
    } else if der12 <= c(1e-15) {
        c::<F>(1e-6).max(h * c(1e-3))
    } else {
        (c::<F>(0.01) / der12).powf(c(1.0 / 8.0))
    };
    (h * c(100.0)).min(h1).min(hmax)
}

/// [`super::integrate_segment`] with a callback invoked after every accepted
/// step with the new time and state (the last call is at `t_to` unless the
/// orbit escapes).
pub fn integrate_segment_observed<F, V, O, const M: usize>(
    field: &V,
    t_from: F,
    t_to: F,
    u0: [F; M],
    opts: &SegmentOptions<F>,
    mut observer: O,
) -> Result<SegmentResult<F, M>>
where
    F: Real,
    V: VectorField<F, M> + ?Sized,
    O: FnMut(F, &[F; M]),
{
    opts.tol.validate()?;
    if !(opts.escape_radius > F::zero()) {
        return Err(Error::InvalidArgument(format!(
            "escape radius must be positive, got {}",
            opts.escape_radius
        )));
    }
    if !t_from.is_finite() || !t_to.is_finite() {
        return Err(Error::InvalidArgument("non-finite integration bounds".into()));
    }

    let mut stats = StepStats::default();
    let mut dense = opts.dense.then(|| DenseSegment { steps: Vec::new() });
    let done = |outcome, dense, stats| Ok(SegmentResult { outcome, dense, stats });

    if t_from == t_to {
        return done(SegmentOutcome::Reached { t: t_to, u: u0 }, dense, stats);
    }

    let span = t_to - t_from;
    let dir = span.signum();
    let hmax = span.abs();
    let tol = opts.tol;
    let n_f = F::from_usize_lossy(M);

    let mut t = t_from;
    let mut y = u0;
    let mut k1 = field.eval(t, &y);
    stats.evals += 1;
    let mut h = initial_step(field, t, &y, &k1, dir, hmax, opts);
    stats.evals += 1;
    let mut last_rejected = false;
    let eps = F::epsilon();

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return done(
                SegmentOutcome::Escaped { t, u: y, cause: EscapeCause::StepBudget },
                dense,
                stats,
            );
        }
        if h < c::<F>(10.0) * eps * t.abs().max(F::one()) {
            return done(
                SegmentOutcome::Escaped { t, u: y, cause: EscapeCause::StepUnderflow },
                dense,
                stats,
            );
        }
        let mut last = false;
        if (t + dir * h * c(1.01) - t_to) * dir >= F::zero() {
            h = (t_to - t).abs();
            last = true;
        }
        let hs = dir * h;

        let k2 = field.eval(t + c::<F>(C2) * hs, &comb(&y, hs, &[(A21, &k1)]));
        let k3 = field.eval(t + c::<F>(C3) * hs, &comb(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = field.eval(t + c::<F>(C4) * hs, &comb(&y, hs, &[(A41, &k1), (A43, &k3)]));
        let k5 = field.eval(
            t + c::<F>(C5) * hs,
            &comb(&y, hs, &[(A51, &k1), (A53, &k3), (A54, &k4)]),
        );
        let k6 = field.eval(
            t + c::<F>(C6) * hs,
            &comb(&y, hs, &[(A61, &k1), (A64, &k4), (A65, &k5)]),
        );
        let k7 = field.eval(
            t + c::<F>(C7) * hs,
            &comb(&y, hs, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)]),
        );
        let k8 = field.eval(
            t + c::<F>(C8) * hs,
            &comb(&y, hs, &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]),
        );
        let k9 = field.eval(
            t + c::<F>(C9) * hs,
            &comb(
                &y,
                hs,
                &[(A91, &k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)],
            ),
        );
        let k10 = field.eval(
            t + c::<F>(C10) * hs,
            &comb(
                &y,
                hs,
                &[
                    (A101, &k1),
                    (A104, &k4),
                    (A105, &k5),
                    (A106, &k6),
                    (A107, &k7),
                    (A108, &k8),
                    (A109, &k9),
                ],
            ),
        );
        let k11 = field.eval(
            t + c::<F>(C11) * hs,
            &comb(
                &y,
                hs,
                &[
                    (A111, &k1),
                    (A114, &k4),
                    (A115, &k5),
                    (A116, &k6),
                    (A117, &k7),
                    (A118, &k8),
                    (A119, &k9),
                    (A1110, &k10),
                ],
            ),
        );
        let t_new = if last { t_to } else { t + hs };
        let y12 = comb(
            &y,
            hs,
            &[
                (A121, &k1),
                (A124, &k4),
                (A125, &k5),
                (A126, &k6),
                (A127, &k7),
                (A128, &k8),
                (A129, &k9),
                (A1210, &k10),
                (A1211, &k11),
            ],
        );
        let k12 = field.eval(t_new, &y12);
        stats.evals += 11;

        let kb = lin(&[
            (B1, &k1),
            (B6, &k6),
            (B7, &k7),
            (B8, &k8),
            (B9, &k9),
            (B10, &k10),
            (B11, &k11),
            (B12, &k12),
        ]);
        let mut y_new = y;
        for i in 0..M {
            y_new[i] += hs * kb[i];
        }

        let mut err = F::zero();
        let mut err2 = F::zero();
        for i in 0..M {
            let sk = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            let e5 = kb[i] - c::<F>(BHH1) * k1[i] - c::<F>(BHH2) * k9[i] - c::<F>(BHH3) * k12[i];
            err2 += (e5 / sk).powi(2);
            let e8 = c::<F>(ER1) * k1[i]
                + c::<F>(ER6) * k6[i]
                + c::<F>(ER7) * k7[i]
                + c::<F>(ER8) * k8[i]
                + c::<F>(ER9) * k9[i]
                + c::<F>(ER10) * k10[i]
                + c::<F>(ER11) * k11[i]
                + c::<F>(ER12) * k12[i];
            err += (e8 / sk).powi(2);
        }
        let mut deno = err + c::<F>(0.01) * err2;
        if deno <= F::zero() {
            deno = F::one();
        }
        let err = h * err * (F::one() / (deno * n_f)).sqrt();

        if !err.is_finite() {
            h = h * c(0.1);
            stats.rejected += 1;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(c(1.0 / 8.0));
        let fac = (c::<F>(1.0 / FAC2)).max((c::<F>(1.0 / FAC1)).min(fac11 / c(SAFE)));
        let mut h_new = h / fac;

        if err <= F::one() {
            stats.accepted += 1;
            let k_new = field.eval(t_new, &y_new);
            stats.evals += 1;

            if let Some(seg) = dense.as_mut() {
                let mut cont = [[F::zero(); M]; 8];
                let d_rows: [[f64; 12]; 4] = [
                    [D41, D46, D47, D48, D49, D410, D411, D412, D413, D414, D415, D416],
                    [D51, D56, D57, D58, D59, D510, D511, D512, D513, D514, D515, D516],
                    [D61, D66, D67, D68, D69, D610, D611, D612, D613, D614, D615, D616],
                    [D71, D76, D77, D78, D79, D710, D711, D712, D713, D714, D715, D716],
                ];
                let k14 = field.eval(
                    t + c::<F>(C14) * hs,
                    &comb(
                        &y,
                        hs,
                        &[
                            (A141, &k1),
                            (A147, &k7),
                            (A148, &k8),
                            (A149, &k9),
                            (A1410, &k10),
                            (A1411, &k11),
                            (A1412, &k12),
                            (A1413, &k_new),
                        ],
                    ),
                );
                let k15 = field.eval(
                    t + c::<F>(C15) * hs,
                    &comb(
                        &y,
                        hs,
                        &[
                            (A151, &k1),
                            (A156, &k6),
                            (A157, &k7),
                            (A158, &k8),
                            (A1511, &k11),
                            (A1512, &k12),
                            (A1513, &k_new),
                            (A1514, &k14),
                        ],
                    ),
                );
                let k16 = field.eval(
                    t + c::<F>(C16) * hs,
                    &comb(
                        &y,
                        hs,
                        &[
                            (A161, &k1),
                            (A166, &k6),
                            (A167, &k7),
                            (A168, &k8),
                            (A169, &k9),
                            (A1613, &k_new),
                            (A1614, &k14),
                            (A1615, &k15),
                        ],
                    ),
                );
                stats.evals += 3;
                let ks: [&[F; M]; 12] =
                    [&k1, &k6, &k7, &k8, &k9, &k10, &k11, &k12, &k_new, &k14, &k15, &k16];
                for i in 0..M {
                    let ydiff = y_new[i] - y[i];
                    let bspl = hs * k1[i] - ydiff;
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - hs * k_new[i] - bspl;
                    for (r, row) in d_rows.iter().enumerate() {
                        let mut acc = F::zero();
                        for (j, &d) in row.iter().enumerate() {
                            acc += c::<F>(d) * ks[j][i];
                        }
                        cont[4 + r][i] = hs * acc;
                    }
                }
                seg.steps.push(DenseStep { t0: t, h: t_new - t, cont });
            }

            t = t_new;
            y = y_new;
            k1 = k_new;
            observer(t, &y);

            if !all_finite(&y) || escape_norm(&y, opts.escape_dims) >= opts.escape_radius {
                return done(
                    SegmentOutcome::Escaped { t, u: y, cause: EscapeCause::Radius },
                    dense,
                    stats,
                );
            }
            if last {
                return done(SegmentOutcome::Reached { t, u: y }, dense, stats);
            }
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
        } else {
            h_new = h / (c::<F>(1.0 / FAC1)).min(fac11 / c(SAFE));
            stats.rejected += 1;
            last_rejected = true;
        }
        h = h_new.min(hmax);
    }
}
