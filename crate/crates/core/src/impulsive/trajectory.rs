use super::jump::{apply_jump, solve_jump_equation, JumpSolveOptions};
use super::ImpulsiveSystem;
use crate::error::{Error, Result};
use crate::ode::{integrate_segment, DenseSegment, EscapeCause, SegmentOptions, SegmentOutcome, VectorField};
use crate::scalar::Real;

/// Why the trajectory stops at one end of its maximal interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    HorizonReached,
    /// The state norm reached the escape radius.
    Escape,
    /// Backward continuation failed to invert an impulse.
    JumpEquationUnsolvable,
    /// The step size collapsed (finite-time blow-up) or the step budget ran
    /// out before the next impulse instant.
    Adjacency,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::HorizonReached => "horizon-reached",
            Termination::Escape => "escape",
            Termination::JumpEquationUnsolvable => "jump-equation-unsolvable",
            Termination::Adjacency => "adjacency",
        }
    }

    fn from_escape(cause: EscapeCause) -> Self {
        match cause {
            EscapeCause::Radius => Termination::Escape,
            EscapeCause::StepUnderflow | EscapeCause::StepBudget => Termination::Adjacency,
        }
    }
}

/// One end of the maximal interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint<F> {
    pub time: F,
    /// Whether the solution is defined at `time` itself.
    pub closed: bool,
    pub reason: Termination,
}

/// Smooth piece between consecutive impulse instants, stored with
/// increasing times. `u_start`/`u_end` are the exact one-sided limits the
/// integrator produced or started from.
#[derive(Debug, Clone)]
pub struct TrajectorySegment<F, const M: usize> {
    pub t_start: F,
    pub t_end: F,
    pub u_start: [F; M],
    pub u_end: [F; M],
    pub dense: DenseSegment<F, M>,
}

impl<F: Real, const M: usize> TrajectorySegment<F, M> {
    pub fn eval(&self, t: F) -> [F; M] {
        if t == self.t_start {
            self.u_start
        } else if t == self.t_end {
            self.u_end
        } else {
            self.dense.eval(t).unwrap_or(self.u_start)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord<F, const M: usize> {
    /// Global impulse index.
    pub index: i64,
    pub time: F,
    pub pre: [F; M],
    pub post: [F; M],
}

/// Solution of an impulsive initial value problem on its maximal interval
/// within the requested span.
#[derive(Debug, Clone)]
pub struct PiecewiseTrajectory<F, const M: usize> {
    pub tau: F,
    pub u0: [F; M],
    /// Ordered by time.
    pub segments: Vec<TrajectorySegment<F, M>>,
    /// Ordered by time.
    pub jumps: Vec<JumpRecord<F, M>>,
    pub left: Endpoint<F>,
    pub right: Endpoint<F>,
}

impl<F: Real, const M: usize> PiecewiseTrajectory<F, M> {
    pub fn contains(&self, t: F) -> bool {
        let left_ok = t > self.left.time || (t == self.left.time && self.left.closed);
        let right_ok = t < self.right.time || (t == self.right.time && self.right.closed);
        left_ok && right_ok
    }

    /// Left continuous value `u(t)`; `None` outside the maximal interval.
    pub fn value_at(&self, t: F) -> Option<[F; M]> {
        if !self.contains(t) {
            return None;
        }
        if let Ok(i) = self.jumps.binary_search_by(|r| r.time.partial_cmp(&t).unwrap()) {
            return Some(self.jumps[i].pre);
        }
        if t == self.tau {
            return Some(self.u0);
        }
        let idx = self.segments.partition_point(|s| s.t_end < t);
        let seg = self.segments.get(idx)?;
        Some(seg.eval(t))
    }

    /// State at the right end of the computed interval (the escape state if
    /// the right end is open).
    pub fn final_state(&self) -> [F; M] {
        self.segments.last().map_or(self.u0, |s| s.u_end)
    }

    /// State at the left end of the computed interval.
    pub fn initial_state(&self) -> [F; M] {
        match (self.jumps.first(), self.segments.first()) {
            (Some(j), _) if j.time == self.left.time => j.pre,
            (_, Some(s)) => s.u_start,
            _ => self.u0,
        }
    }

    pub fn reaches_horizon(&self) -> bool {
        self.left.reason == Termination::HorizonReached && self.right.reason == Termination::HorizonReached
    }
}

/// Options for [`solve_ivp`].
#[derive(Debug, Clone, Copy)]
pub struct IvpOptions<F> {
    pub segment: SegmentOptions<F>,
    pub jump: JumpSolveOptions<F>,
}

impl<F: Real> Default for IvpOptions<F> {
    fn default() -> Self {
        Self {
            segment: SegmentOptions::default(),
            jump: JumpSolveOptions::default(),
        }
    }
}

impl<F: Real> From<SegmentOptions<F>> for IvpOptions<F> {
    fn from(segment: SegmentOptions<F>) -> Self {
        Self {
            segment,
            jump: JumpSolveOptions::default(),
        }
    }
}

struct Sweep<F, const M: usize> {
    segments: Vec<TrajectorySegment<F, M>>,
    jumps: Vec<JumpRecord<F, M>>,
    end: Endpoint<F>,
}

fn segment_between<F: Real, const M: usize>(
    t_from: F,
    t_to: F,
    u_from: [F; M],
    u_to: [F; M],
    dense: DenseSegment<F, M>,
) -> TrajectorySegment<F, M> {
    if t_from <= t_to {
        TrajectorySegment { t_start: t_from, t_end: t_to, u_start: u_from, u_end: u_to, dense }
    } else {
        TrajectorySegment { t_start: t_to, t_end: t_from, u_start: u_to, u_end: u_from, dense }
    }
}

fn sweep_forward<F, V, const M: usize>(
    system: &ImpulsiveSystem<F, V, M>,
    tau: F,
    u0: [F; M],
    t_end: F,
    opts: &SegmentOptions<F>,
) -> Result<Sweep<F, M>>
where
    F: Real,
    V: VectorField<F, M>,
{
    let schedule = system.schedule();
    let mut out = Sweep {
        segments: Vec::new(),
        jumps: Vec::new(),
        end: Endpoint { time: tau, closed: true, reason: Termination::HorizonReached },
    };
    let mut t = tau;
    let mut u = u0;
    let mut j = schedule.next_after(tau);
    while t < t_end {
        let t_imp = schedule.time(j);
        let target = if t_imp < t_end { t_imp } else { t_end };
        let res = integrate_segment(system.field(), t, target, u, opts)?;
        let dense = res.dense.unwrap_or(DenseSegment { steps: Vec::new() });
        match res.outcome {
            SegmentOutcome::Reached { t: t_hit, u: u_hit } => {
                out.segments.push(segment_between(t, t_hit, u, u_hit, dense));
                t = t_hit;
                u = u_hit;
                if target == t_imp && t_imp < t_end {
                    let post = apply_jump(&u, system.jump(j));
                    out.jumps.push(JumpRecord { index: j, time: t, pre: u, post });
                    u = post;
                    j += 1;
                }
            }
            SegmentOutcome::Escaped { t: t_esc, u: u_esc, cause } => {
                out.segments.push(segment_between(t, t_esc, u, u_esc, dense));
                out.end = Endpoint { time: t_esc, closed: false, reason: Termination::from_escape(cause) };
                return Ok(out);
            }
        }
    }
    out.end.time = t;
    Ok(out)
}

fn sweep_backward<F, V, const M: usize>(
    system: &ImpulsiveSystem<F, V, M>,
    tau: F,
    u0: [F; M],
    t_end: F,
    opts: &IvpOptions<F>,
) -> Result<Sweep<F, M>>
where
    F: Real,
    V: VectorField<F, M>,
{
    let schedule = system.schedule();
    let mut out = Sweep {
        segments: Vec::new(),
        jumps: Vec::new(),
        end: Endpoint { time: tau, closed: true, reason: Termination::HorizonReached },
    };
    let mut t = tau;
    // Right limit of the solution at `t`.
    let mut u = u0;
    let mut j = schedule.prev_before(tau);
    loop {
        let t_imp = schedule.time(j);
        let target = if t_imp > t_end { t_imp } else { t_end };
        if t > target {
            let res = integrate_segment(system.field(), t, target, u, &opts.segment)?;
            let dense = res.dense.unwrap_or(DenseSegment { steps: Vec::new() });
            match res.outcome {
                SegmentOutcome::Reached { t: t_hit, u: u_hit } => {
                    out.segments.push(segment_between(t, t_hit, u, u_hit, dense));
                    t = t_hit;
                    u = u_hit;
                }
                SegmentOutcome::Escaped { t: t_esc, u: u_esc, cause } => {
                    out.segments.push(segment_between(t, t_esc, u, u_esc, dense));
                    out.end = Endpoint { time: t_esc, closed: false, reason: Termination::from_escape(cause) };
                    return Ok(out);
                }
            }
        }
        // `u` is now the right limit at `t`. If an impulse acts at `t` the
        // left continuous value is the preimage under the jump.
        if t == t_imp {
            match solve_jump_equation(&u, system.jump(j), None, &opts.jump) {
                Ok(pre) => {
                    out.jumps.push(JumpRecord { index: j, time: t, pre, post: u });
                    u = pre;
                    j -= 1;
                }
                Err(Error::JumpEquationUnsolvable { .. }) => {
                    out.end = Endpoint { time: t, closed: false, reason: Termination::JumpEquationUnsolvable };
                    return Ok(out);
                }
                Err(e) => return Err(e),
            }
        }
        if t <= t_end {
            out.end.time = t;
            return Ok(out);
        }
    }
}

/// Solves the impulsive initial value problem `u(tau+) = u0` on
/// `t_span = (t_lo, t_hi)` with `t_lo <= tau <= t_hi`.
///
/// A jump scheduled exactly at `tau` is not applied in either direction:
/// `u0` is both the value at `tau` and its right limit. Forward, the jump at
/// each instant is applied after the segment arriving there. Backward, the
/// pre-jump value is recovered from the jump equation; when that fails the
/// interval is open at the instant. An impulse at `t_hi` is not applied
/// (the value there is the left limit); one at `t_lo` is inverted so that
/// the value there is the left continuous one.
pub fn solve_ivp<F, V, const M: usize>(
    system: &ImpulsiveSystem<F, V, M>,
    tau: F,
    u0: [F; M],
    t_span: (F, F),
    opts: &IvpOptions<F>,
) -> Result<PiecewiseTrajectory<F, M>>
where
    F: Real,
    V: VectorField<F, M>,
{
    let (lo, hi) = t_span;
    if !(lo.is_finite() && hi.is_finite() && lo <= tau && tau <= hi) {
        return Err(Error::InvalidArgument(format!(
            "span [{lo}, {hi}] must be finite and contain tau = {tau}"
        )));
    }
    opts.segment.tol.validate()?;
    let mut seg_opts = opts.segment;
    seg_opts.dense = true;
    let opts = IvpOptions { segment: seg_opts, jump: opts.jump };

    let fwd = sweep_forward(system, tau, u0, hi, &opts.segment)?;
    let bwd = sweep_backward(system, tau, u0, lo, &opts)?;

    let mut segments: Vec<_> = bwd.segments.into_iter().rev().collect();
    segments.extend(fwd.segments);
    let mut jumps: Vec<_> = bwd.jumps.into_iter().rev().collect();
    jumps.extend(fwd.jumps);
    Ok(PiecewiseTrajectory {
        tau,
        u0,
        segments,
        jumps,
        left: bwd.end,
        right: fwd.end,
    })
}
