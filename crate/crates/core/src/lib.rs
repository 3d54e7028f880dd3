//! Boundary-cancellation toolkit for open-system quantum annealing.
//!
//! The crate builds time-dependent master-equation generators for a driven
//! system weakly coupled to an Ohmic bath (Davies–Lindblad, adiabatic
//! Redfield and Schrödinger-picture Redfield), integrates the resulting
//! density-matrix dynamics, and measures how the final-time error
//! `‖ρ(τ) − σ(τ)‖₁` decays with the anneal time `τ` when the schedule has
//! vanishing derivatives at the end of the anneal.
//!
//! Everything numerical is generic over the scalar type through
//! [`scalar::Real`]; the aliases below fix it to `f64`.

// `!(x > 0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bath;
pub mod error;
pub mod generators;
pub mod propagation;
pub mod qops;
pub mod quadrature;
pub mod qubit;
pub mod scalar;
pub mod schedules;
pub mod special;

#[cfg(test)]
pub(crate) mod test_util;

pub use error::{Error, Result};

pub type Operator = qops::Operator<f64>;
pub type SuperOperator = qops::SuperOperator<f64>;
pub type AnnealHamiltonian = schedules::AnnealHamiltonian<f64>;
pub type Schedule = schedules::Schedule<f64>;
pub type BathSpec = bath::BathSpec<f64>;
pub type GeneratorModel = generators::GeneratorModel<f64>;
pub type SprmeGrid = generators::SprmeGrid<f64>;
pub type Trajectory = propagation::Trajectory<f64>;
pub type SteadyStateResult = analysis::SteadyStateResult<f64>;
pub type AdiabaticSeries = analysis::AdiabaticSeries<f64>;
pub type BoundConstants = analysis::BoundConstants<f64>;
pub type ErrorPoint = analysis::ErrorPoint<f64>;
pub type PositivityReport = analysis::PositivityReport<f64>;
pub type HamiltonianCase = analysis::HamiltonianCase<f64>;
