use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poincare::PlanarMap;
use crate::scalar::{euclid_norm, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PointOutcome<F> {
    Bounded { max_radius: F },
    /// Index (1-based) of the first iterate outside the escape radius, or of
    /// the map application that failed.
    Escaped { iterate: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport<F> {
    pub grid: Vec<[F; 2]>,
    pub horizon: usize,
    pub escape_radius: F,
    pub outcomes: Vec<PointOutcome<F>>,
    pub fraction_bounded: F,
    /// Largest radius over the bounded points, zero if there are none.
    pub max_radius: F,
}

/// `side x side` uniform grid on `[lo, hi]^2`, row by row in `y`.
pub fn square_grid<F: Real>(lo: F, hi: F, side: usize) -> Vec<[F; 2]> {
    let step = if side > 1 {
        (hi - lo) / F::from_usize_lossy(side - 1)
    } else {
        F::zero()
    };
    let mut out = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            out.push([lo + step * F::from_usize_lossy(i), lo + step * F::from_usize_lossy(j)]);
        }
    }
    out
}

fn follow<F: Real, M: PlanarMap<F> + ?Sized>(map: &M, p0: [F; 2], horizon: usize, escape_radius: F) -> PointOutcome<F> {
    let mut p = p0;
    let mut max_radius = euclid_norm(&p);
    for k in 1..=horizon {
        p = match map.apply(p) {
            Ok(q) => q,
            Err(_) => return PointOutcome::Escaped { iterate: k },
        };
        let r = euclid_norm(&p);
        if !(r <= escape_radius) {
            return PointOutcome::Escaped { iterate: k };
        }
        max_radius = max_radius.max(r);
    }
    PointOutcome::Bounded { max_radius }
}

/// Iterates every grid point up to `horizon` times in parallel. Outcomes
/// are in grid order.
pub fn boundedness_sweep<F: Real, M: PlanarMap<F> + ?Sized>(
    map: &M,
    grid: &[[F; 2]],
    horizon: usize,
    escape_radius: F,
) -> Result<SweepReport<F>> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("sweep horizon must be at least 1".into()));
    }
    if !(escape_radius > F::zero()) {
        return Err(Error::InvalidArgument(format!("escape radius must be positive, got {escape_radius}")));
    }
    let outcomes: Vec<PointOutcome<F>> = grid.par_iter().map(|&p| follow(map, p, horizon, escape_radius)).collect();
    let mut bounded = 0usize;
    let mut max_radius = F::zero();
    for o in &outcomes {
        if let PointOutcome::Bounded { max_radius: r } = o {
            bounded += 1;
            max_radius = max_radius.max(*r);
        }
    }
    let fraction_bounded = if grid.is_empty() {
        F::one()
    } else {
        F::from_usize_lossy(bounded) / F::from_usize_lossy(grid.len())
    };
    Ok(SweepReport {
        grid: grid.to_vec(),
        horizon,
        escape_radius,
        outcomes,
        fraction_bounded,
        max_radius,
    })
}
