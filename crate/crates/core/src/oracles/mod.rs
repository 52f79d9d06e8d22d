// SPDX-License-Identifier: Apache-2.0

//! Independent numerical checks of the closed-form models.

pub mod continuum;
pub mod linear_quad;
pub mod monte_carlo;
pub mod quadrature;

pub use continuum::{solve_discretized_continuum, ContinuumDiscretization, ContinuumRecord};
pub use linear_quad::{
    linear_detector_quadrature, quad_linear, quad_linear_branches, QuadLinearResult,
};
pub use monte_carlo::{mc_detector_outcomes, mc_linear, McEstimate, McLinearEstimates};
