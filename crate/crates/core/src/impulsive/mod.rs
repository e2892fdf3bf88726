//! Impulsive ODE engine: `u' = F(t, u)` away from the impulse instants and
//! `u(t_j+) = u(t_j) + L_j(u(t_j))` at them.
//!
//! Trajectories are left continuous: the value stored at an impulse instant
//! is the pre-jump state. Backward continuation across an instant requires
//! inverting `v -> v + L_j(v)`, which may fail; in that case the left end of
//! the maximal interval is closed at that instant.

mod jump;
mod schedule;
mod trajectory;

pub use jump::{
    apply_jump, solve_jump_equation, ConstantJump, FnJump, JumpMap, JumpSolveOptions, ZeroJump,
};
pub use schedule::ImpulseSchedule;
pub use trajectory::{
    solve_ivp, Endpoint, IvpOptions, JumpRecord, PiecewiseTrajectory, Termination, TrajectorySegment,
};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ode::VectorField;
use crate::scalar::Real;

/// Vector field, periodic impulse schedule and one jump map per impulse of a
/// period, applied cyclically.
pub struct ImpulsiveSystem<F: Real, V, const M: usize> {
    field: V,
    schedule: ImpulseSchedule<F>,
    jumps: Vec<Arc<dyn JumpMap<F, M>>>,
}

impl<F: Real, V: Clone, const M: usize> Clone for ImpulsiveSystem<F, V, M> {
    fn clone(&self) -> Self {
        Self {
            field: self.field.clone(),
            schedule: self.schedule.clone(),
            jumps: self.jumps.clone(),
        }
    }
}

impl<F: Real, V: VectorField<F, M>, const M: usize> ImpulsiveSystem<F, V, M> {
    pub fn new(
        field: V,
        schedule: ImpulseSchedule<F>,
        jumps: Vec<Arc<dyn JumpMap<F, M>>>,
    ) -> Result<Self> {
        if jumps.len() != schedule.len() {
            return Err(Error::InvalidArgument(format!(
                "{} jump maps supplied for {} impulse times",
                jumps.len(),
                schedule.len()
            )));
        }
        Ok(Self {
            field,
            schedule,
            jumps,
        })
    }

    pub fn field(&self) -> &V {
        &self.field
    }

    pub fn schedule(&self) -> &ImpulseSchedule<F> {
        &self.schedule
    }

    pub fn jumps(&self) -> &[Arc<dyn JumpMap<F, M>>] {
        &self.jumps
    }

    /// Jump map acting at the impulse with global index `j`.
    pub fn jump(&self, j: i64) -> &dyn JumpMap<F, M> {
        self.jumps[self.schedule.slot(j)].as_ref()
    }

    pub const fn state_dim(&self) -> usize {
        M
    }
}
