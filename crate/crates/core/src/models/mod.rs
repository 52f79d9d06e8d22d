// SPDX-License-Identifier: Apache-2.0

//! Concrete detector models, each mapping physical parameters to a
//! [`QndDetector`].

pub mod indirect;
pub mod linear;
pub mod phase;
pub mod tunneling;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qnd::QndDetector;

pub use indirect::{indirect_projective_detector, IndirectProjectiveConfig};
pub use linear::{
    linear_d0, linear_detector, linear_ensemble_eta, linear_fidelities, LinearDetectorConfig,
};
pub use phase::{
    estimate_d0_from_visibility, null_result_product, phase_qubit_detector, visibility,
    visibility_from_product, PhaseQubitConfig,
};
pub use tunneling::{tunneling_detector, tunneling_ensemble, TunnelingConfig, TunnelingEnsemble};

/// Any model configuration, tagged by `"model"` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelConfig {
    Linear(LinearDetectorConfig),
    Tunneling(TunnelingConfig),
    PhaseQubit(PhaseQubitConfig),
    Indirect(IndirectProjectiveConfig),
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Linear(_) => "linear",
            ModelConfig::Tunneling(_) => "tunneling",
            ModelConfig::PhaseQubit(_) => "phase_qubit",
            ModelConfig::Indirect(_) => "indirect",
        }
    }

    /// Closed-form detector. A linear config with `kappa != 0` has no
    /// closed form; see [`crate::oracles::linear_quad::linear_detector_quadrature`].
    pub fn detector(&self) -> Result<QndDetector> {
        match self {
            ModelConfig::Linear(c) => linear_detector(c),
            ModelConfig::Tunneling(c) => tunneling_detector(c),
            ModelConfig::PhaseQubit(c) => Ok(phase_qubit_detector(c)),
            ModelConfig::Indirect(c) => Ok(indirect_projective_detector(c)),
        }
    }
}
