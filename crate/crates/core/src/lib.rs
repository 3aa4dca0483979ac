//! Smoothed online quadratic optimization.
//!
//! Per round a player sees the minimizer `v_t` of the hitting cost
//! `½(x - v_t)ᵀA(x - v_t)`, picks `x_t`, and additionally pays
//! `½‖x_t - x_{t-1}‖²` for moving. This crate provides the interpolation
//! policies for that game (adaptive, fixed, regularized balanced descent and
//! the γ-family in between), the hindsight baselines, closed-form cost and
//! bound evaluators, seeded trace generators and a Monte Carlo harness.
//!
//! The numerical core is generic over [`Real`] (`f32`/`f64`); the sampling
//! and experiment layers work in `f64`. Aliases for the common instantiations
//! live at the crate root.

pub mod bounds;
pub mod environments;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod montecarlo;
pub mod policies;
pub mod scalar;
pub mod scenario;
pub mod schedules;
pub mod spectral;
pub mod trace;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use policies::{PolicyRun, PolicySpec};
pub use scalar::Real;
pub use schedules::{CoefficientSchedule, ScheduleKind};
pub use spectral::SpectralMatrix;
pub use trace::MinimizerTrace;

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type Spectral64 = SpectralMatrix<f64>;
pub type Spectral32 = SpectralMatrix<f32>;
pub type Schedule64 = CoefficientSchedule<f64>;
pub type Schedule32 = CoefficientSchedule<f32>;
pub type Trace64 = MinimizerTrace<f64>;
pub type Trace32 = MinimizerTrace<f32>;
pub type Run64 = PolicyRun<f64>;
pub type Run32 = PolicyRun<f32>;
