// SPDX-License-Identifier: Apache-2.0

//! Quantum efficiency of binary-outcome QND qubit detectors.
//!
//! A detector is described by six numbers `(F0, F1, phi0, phi1, D0, D1)`:
//! measurement fidelities, outcome phases and extra decoherences beyond the
//! informational minimum. [`qnd`] applies such detectors to qubit states,
//! [`efficiency`] turns them into efficiency metrics, [`povm`] handles
//! general two-outcome channels, [`models`] builds detectors from physical
//! parameters and [`oracles`] re-derives model results numerically.

// `!(x > 0.0)` is how NaN gets rejected; reference constants keep all their digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod efficiency;
pub mod error;
pub mod models;
pub mod oracles;
pub mod povm;
pub mod qnd;
pub mod serde_inf;
pub mod special;
pub mod state;

pub use efficiency::{efficiency_report, EfficiencyReport, Metric, UndefinedReason};
pub use error::{Error, Result};
pub use models::ModelConfig;
pub use povm::{extract_qnd, from_qnd, BinarySuperoperator, QndVerdict};
pub use qnd::{
    apply_outcome, average_transform, compose_sequential, d_min, ensemble_gain,
    outcome_probabilities, Outcome, OutcomeBranch, OutcomeResult, PostState, QndDetector,
};
pub use state::{PureState, QubitState};
