// SPDX-License-Identifier: Apache-2.0

//! Phase qubit read out by tunneling out of the well.
//!
//! Tunneling (outcome 1) destroys the qubit; the null result (outcome 0) is
//! a partial collapse that is ideal in theory. Its extra decoherence can be
//! inferred from the visibility of tomography oscillations after the null
//! result.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qnd::QndDetector;
use crate::state::PureState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhaseRepr", into = "PhaseRepr")]
pub struct PhaseQubitConfig {
    /// Tunneling probability from `|1>`.
    pub p: f64,
    /// Tunneling probability from `|0>`.
    pub p0: f64,
    pub phi0: f64,
}

impl PhaseQubitConfig {
    pub fn new(p: f64, p0: f64, phi0: f64) -> Result<Self> {
        for (name, x) in [("p", p), ("p0", p0)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidConfig(format!("{name} = {x} outside [0, 1]")));
            }
        }
        if !phi0.is_finite() {
            return Err(Error::InvalidConfig(format!("phi0 = {phi0} is not finite")));
        }
        Ok(Self { p, p0, phi0 })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhaseRepr {
    p: f64,
    #[serde(default)]
    p0: f64,
    #[serde(default)]
    phi0: f64,
}

impl TryFrom<PhaseRepr> for PhaseQubitConfig {
    type Error = Error;

    fn try_from(r: PhaseRepr) -> Result<Self> {
        Self::new(r.p, r.p0, r.phi0)
    }
}

impl From<PhaseQubitConfig> for PhaseRepr {
    fn from(c: PhaseQubitConfig) -> Self {
        PhaseRepr {
            p: c.p,
            p0: c.p0,
            phi0: c.phi0,
        }
    }
}

/// `F0 = 1 - p0`, `F1 = p`, `D0 = 0`, destroyed on outcome 1.
pub fn phase_qubit_detector(cfg: &PhaseQubitConfig) -> QndDetector {
    QndDetector::destructive(1.0 - cfg.p0, cfg.p, cfg.phi0, 0.0).expect("validated config")
}

/// `sqrt(1 - 4 rho00 rho11 (1 - e^{-2 D0}))` for the null-result populations.
pub fn visibility(rho00: f64, rho11: f64, d0: f64) -> f64 {
    visibility_from_product(rho00 * rho11, d0)
}

pub fn visibility_from_product(product: f64, d0: f64) -> f64 {
    let loss = -(-2.0 * d0).exp_m1();
    (1.0 - 4.0 * product * loss).max(0.0).sqrt()
}

/// `rho00 * rho11` after a null result at tunneling probability `p` (no
/// tunneling from `|0>`).
pub fn null_result_product(p: f64, initial: &PureState) -> f64 {
    let w0 = initial.amp0().norm_sqr();
    let w1 = (1.0 - p) * initial.amp1().norm_sqr();
    let total = w0 + w1;
    w0 * w1 / (total * total)
}

/// Inverts [`visibility_from_product`]:
/// `D0 = -ln[1 - (1 - v^2) / (4 rho00 rho11)] / 2`.
pub fn estimate_d0_from_visibility(v_ratio: f64, p: f64, initial: &PureState) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!("p = {p} outside [0, 1]")));
    }
    let product = null_result_product(p, initial);
    d0_from_product(v_ratio, product)
}

pub fn d0_from_product(v_ratio: f64, product: f64) -> Result<f64> {
    let inconsistent = Error::InconsistentData { v_ratio, product };
    if !(v_ratio > 0.0 && v_ratio <= 1.0) || !product.is_finite() {
        return Err(inconsistent);
    }
    if v_ratio == 1.0 {
        return Ok(0.0);
    }
    if product <= 0.0 {
        return Err(inconsistent);
    }
    // 1 - v^2 without cancellation near v = 1
    let x = (1.0 - v_ratio) * (1.0 + v_ratio) / (4.0 * product);
    if x >= 1.0 {
        return Err(inconsistent);
    }
    Ok(-0.5 * (-x).ln_1p())
}
