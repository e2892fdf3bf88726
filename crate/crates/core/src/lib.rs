//! Impulsive Duffing oscillators `x'' + x^{2n+1} + sum p_i(t) x^i = 0` with
//! jumps at prescribed times: solution operators, the time-1 map, the
//! action-angle chart of the unforced oscillator, Hölder smoothing and
//! numerical diagnostics for boundedness.
//!
//! The numerical core is generic over [`Real`]; the aliases below fix the
//! scalar to `f64`.

pub mod action_angle;
pub mod diagnostics;
pub mod duffing;
pub mod error;
pub mod impulsive;
pub mod linalg;
pub mod ode;
pub mod poincare;
pub mod quadrature;
pub mod scalar;
pub mod scenario;
pub mod smoothing;

pub use error::{Error, Result};
pub use scalar::Real;

/// Crate version, recorded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Chart = action_angle::ReferenceChart<f64>;
pub type AaPoint = action_angle::ActionAnglePoint<f64>;
pub type Params = duffing::DuffingParams<f64>;
pub type Signal = duffing::CoefficientSignal<f64>;
pub type Impulse = duffing::ImpulseEntry<f64>;
pub type System = duffing::DuffingSystem<f64>;
pub type Map = poincare::TimeOneMap<f64, duffing::DuffingField<f64>>;
pub type Rotation = diagnostics::RotationEstimate<f64>;
pub type Sweep = diagnostics::SweepReport<f64>;
pub type Verdict = diagnostics::CircleVerdict<f64>;
