// SPDX-License-Identifier: Apache-2.0

//! Linear detector with a threshold on the time-integrated output.
//!
//! Everything is dimensionless. The record `r` is Gaussian with variance 1/2
//! and mean `-s` for `|0>`, `+s` for `|1>`; outcome 0 means `r < r_th`.
//! `gamma_t` is extra dephasing and `kappa` the correlation between output
//! noise and back-action (which makes the coherence phase depend on `r`).

use serde::{Deserialize, Serialize};

use crate::efficiency::{Metric, UndefinedReason};
use crate::error::{Error, Result};
use crate::qnd::{d_min, QndDetector};
use crate::special::{ln_lower_mass, lower_mass};

/// Rounding slack below zero accepted for `D0` before it counts as a bug.
const D_NEGATIVE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LinearRepr", into = "LinearRepr")]
pub struct LinearDetectorConfig {
    pub s: f64,
    pub r_th: f64,
    pub gamma_t: f64,
    pub kappa: f64,
}

impl LinearDetectorConfig {
    pub fn new(s: f64, r_th: f64, gamma_t: f64, kappa: f64) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "s = {s} must be finite and >= 0"
            )));
        }
        if !(gamma_t >= 0.0 && gamma_t.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gamma_t = {gamma_t} must be finite and >= 0"
            )));
        }
        if r_th.is_nan() || !kappa.is_finite() {
            return Err(Error::InvalidConfig(
                "r_th and kappa must be numbers".into(),
            ));
        }
        Ok(Self {
            s,
            r_th,
            gamma_t,
            kappa,
        })
    }

    /// `s` and `r_th` only; no extra dephasing, no noise correlation.
    pub fn ideal(s: f64, r_th: f64) -> Result<Self> {
        Self::new(s, r_th, 0.0, 0.0)
    }

    /// Converts raw units. `delta_i = I1 - I0`, `spectral_density` is the
    /// output noise density `S`, `i_th` the current threshold, `k` the
    /// noise-correlation coefficient `K`, `gamma` the extra dephasing rate.
    #[allow(clippy::too_many_arguments)]
    pub fn from_physical(
        i0: f64,
        i1: f64,
        spectral_density: f64,
        t: f64,
        i_th: f64,
        gamma: f64,
        k: f64,
    ) -> Result<Self> {
        let delta_i = i1 - i0;
        if !(delta_i > 0.0) || !(spectral_density > 0.0) || !(t >= 0.0) {
            return Err(Error::InvalidConfig(
                "need I1 > I0, S > 0 and t >= 0".into(),
            ));
        }
        let scale = (t / spectral_density).sqrt();
        Self::new(
            0.5 * delta_i * scale,
            (i_th - 0.5 * (i0 + i1)) * scale,
            gamma * t,
            k * spectral_density / delta_i,
        )
    }

    /// The same detector with the threshold reflected, `r_th -> -r_th`.
    /// Together with relabeling the basis states this swaps the two outcomes.
    pub fn mirrored(&self) -> Self {
        Self {
            r_th: -self.r_th,
            ..*self
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearRepr {
    s: f64,
    r_th: f64,
    #[serde(default)]
    gamma_t: f64,
    #[serde(default)]
    kappa: f64,
}

impl TryFrom<LinearRepr> for LinearDetectorConfig {
    type Error = Error;

    fn try_from(r: LinearRepr) -> Result<Self> {
        Self::new(r.s, r.r_th, r.gamma_t, r.kappa)
    }
}

impl From<LinearDetectorConfig> for LinearRepr {
    fn from(c: LinearDetectorConfig) -> Self {
        LinearRepr {
            s: c.s,
            r_th: c.r_th,
            gamma_t: c.gamma_t,
            kappa: c.kappa,
        }
    }
}

/// `(F0, F1) = ([1 + erf(r_th + s)]/2, [1 + erf(s - r_th)]/2)`.
pub fn linear_fidelities(cfg: &LinearDetectorConfig) -> (f64, f64) {
    (lower_mass(cfg.r_th + cfg.s), lower_mass(cfg.s - cfg.r_th))
}

/// Outcome-0 decoherence
/// `D0 = gamma_t + s^2 - ln([1 + erf(r_th)]/2) + ln sqrt(F0 (1-F1))`.
///
/// `+inf` when the outcome-0 weight of either basis state underflows.
pub fn linear_d0(cfg: &LinearDetectorConfig) -> Result<f64> {
    if cfg.kappa != 0.0 {
        return Err(Error::AnalyticPathUnsupported { kappa: cfg.kappa });
    }
    let (s, r) = (cfg.s, cfg.r_th);
    // ln F0 and ln(1 - F1) straight from erfc.
    let ln_f0 = ln_lower_mass(r + s);
    let ln_not_f1 = ln_lower_mass(r - s);
    let ln_mid = ln_lower_mass(r);
    if !ln_f0.is_finite() || !ln_not_f1.is_finite() || !ln_mid.is_finite() {
        return Ok(f64::INFINITY);
    }
    let d0 = cfg.gamma_t + s * s - ln_mid + 0.5 * (ln_f0 + ln_not_f1);
    if d0 < -D_NEGATIVE_SLACK {
        return Err(Error::InvariantViolation(format!(
            "D0 = {d0:e} < 0 for {cfg:?}"
        )));
    }
    Ok(d0.max(0.0))
}

/// `D1` via the mirror rule: `linear_d0` at `r_th -> -r_th`.
pub fn linear_d1(cfg: &LinearDetectorConfig) -> Result<f64> {
    linear_d0(&cfg.mirrored())
}

pub fn linear_detector(cfg: &LinearDetectorConfig) -> Result<QndDetector> {
    let (f0, f1) = linear_fidelities(cfg);
    QndDetector::new(f0, f1, 0.0, 0.0, linear_d0(cfg)?, linear_d1(cfg)?)
}

/// `(eta, eta_tilde)` from the ensemble decoherence
/// `D_av = gamma_t + s^2 (1 + kappa^2)`; `eta_tilde` drops the `kappa^2`
/// term. Valid for any `kappa`.
pub fn linear_ensemble_eta(cfg: &LinearDetectorConfig) -> (Metric, Metric) {
    let (f0, f1) = linear_fidelities(cfg);
    let dm = d_min(f0, f1);
    let s2 = cfg.s * cfg.s;
    let eval = |den: f64| {
        if den == 0.0 {
            Metric::Undefined(UndefinedReason::ZeroOverZero)
        } else {
            Metric::Value(dm / den)
        }
    };
    (
        eval(cfg.gamma_t + s2 * (1.0 + cfg.kappa * cfg.kappa)),
        eval(cfg.gamma_t + s2),
    )
}
