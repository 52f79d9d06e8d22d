// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state is not normalized: |a|^2 + |b|^2 = {norm}")]
    NotNormalized { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid detector parameters: {0}")]
    InvalidDetector(String),

    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),

    #[error("outcome {outcome} has zero probability for this state")]
    ImpossibleOutcome { outcome: u8 },

    #[error("ensemble average is undefined: the detector destroys the qubit on outcome 1")]
    UndefinedAverage,

    #[error("intermediate state destroyed by outcome 1 of the first detector")]
    DestroyedIntermediate,

    #[error("superoperator violates its invariants: {0}")]
    InvariantViolation(String),

    #[error("off-diagonal gain {gain} exceeds the complete-positivity bound {bound} for outcome {outcome}")]
    InvalidChannel { outcome: u8, gain: f64, bound: f64 },

    #[error("analytic outcome-resolved decoherence requires kappa = 0 (got {kappa}); use the quadrature oracle")]
    AnalyticPathUnsupported { kappa: f64 },

    #[error("degenerate detector: {0}")]
    Degenerate(String),

    #[error("visibility ratio {v_ratio} is inconsistent with rho00*rho11 = {product}")]
    InconsistentData { v_ratio: f64, product: f64 },

    #[error("quadrature did not reach tolerance {requested:e}; achieved bound {achieved:e}")]
    Accuracy { requested: f64, achieved: f64 },

    #[error("continuum discretization rejected: {0}")]
    Discretization(String),

    #[error("time stepper lost accuracy: norm drift {drift:e} exceeds {limit:e}")]
    StepperAccuracy { drift: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
