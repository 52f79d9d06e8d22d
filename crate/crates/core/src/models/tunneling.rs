// SPDX-License-Identifier: Apache-2.0

//! Qubit states tunneling at rates `Γ0 < Γ1` into a wide-band continuum.
//!
//! Outcome 1 (tunneled) leaves the qubit entangled with the continuum
//! states, whose partial distinguishability gives `D1 > 0`. With
//! `h(x) = (1 - e^{-x}) / x`,
//!
//! ```text
//! D1 = [ln h(Γ0 t) + ln h(Γ1 t)] / 2 - ln h((Γ0 + Γ1) t / 2)
//! ```
//!
//! which equals the textbook form
//! `-ln[(2 sqrt(Γ0Γ1)/(Γ0+Γ1)) (1 - e^{-(Γ0+Γ1)t/2}) / sqrt((1-e^{-Γ0t})(1-e^{-Γ1t}))]`
//! but has no `0 * inf` at `Γ0 = 0` and no cancellation at small `Γt`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::efficiency::{Metric, UndefinedReason};
use crate::error::{Error, Result};
use crate::qnd::{coherence_decay, d_min, QndDetector};
use crate::serde_inf;
use crate::special::one_minus_exp_neg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TunnelingRepr", into = "TunnelingRepr")]
pub struct TunnelingConfig {
    pub g0t: f64,
    pub g1t: f64,
    pub phi1: f64,
}

impl TunnelingConfig {
    pub fn new(g0t: f64, g1t: f64, phi1: f64) -> Result<Self> {
        if !(g0t >= 0.0 && g0t.is_finite()) || !(g1t >= 0.0 && g1t.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "g0t = {g0t}, g1t = {g1t} must be finite and >= 0"
            )));
        }
        if g1t < g0t {
            return Err(Error::InvalidConfig(format!(
                "need g1t >= g0t, got {g1t} < {g0t}"
            )));
        }
        if !phi1.is_finite() {
            return Err(Error::InvalidConfig(format!("phi1 = {phi1} is not finite")));
        }
        Ok(Self { g0t, g1t, phi1 })
    }

    /// Parameterized by the rate ratio `Γ1/Γ0 >= 1` (may be `inf`) and the
    /// outcome-1 fidelity `F1 in (0, 1)`.
    pub fn from_ratio_f1(ratio: f64, f1: f64, phi1: f64) -> Result<Self> {
        if !(ratio >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "ratio = {ratio} must be >= 1"
            )));
        }
        if !(f1 > 0.0 && f1 < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "f1 = {f1} must lie in (0, 1)"
            )));
        }
        let g1t = -(-f1).ln_1p();
        Self::new(g1t / ratio, g1t, phi1)
    }

    fn check_informative(&self) -> Result<()> {
        if self.g1t == 0.0 {
            return Err(Error::Degenerate(
                "g0t = g1t = 0: no tunneling, outcome 1 never occurs".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TunnelingRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g0t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g1t: Option<f64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        deserialize_with = "serde_inf::deserialize_opt"
    )]
    ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f1: Option<f64>,
    #[serde(default)]
    phi1: f64,
}

impl TryFrom<TunnelingRepr> for TunnelingConfig {
    type Error = Error;

    fn try_from(r: TunnelingRepr) -> Result<Self> {
        match (r.g0t, r.g1t, r.ratio, r.f1) {
            (Some(g0), Some(g1), None, None) => Self::new(g0, g1, r.phi1),
            (None, None, Some(ratio), Some(f1)) => Self::from_ratio_f1(ratio, f1, r.phi1),
            _ => Err(Error::InvalidConfig(
                "tunneling config needs either {g0t, g1t} or {ratio, f1}".into(),
            )),
        }
    }
}

impl From<TunnelingConfig> for TunnelingRepr {
    fn from(c: TunnelingConfig) -> Self {
        TunnelingRepr {
            g0t: Some(c.g0t),
            g1t: Some(c.g1t),
            ratio: None,
            f1: None,
            phi1: c.phi1,
        }
    }
}

/// `ln[(1 - e^{-x}) / x]`, `0` at `x = 0`.
fn ln_h(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (one_minus_exp_neg(x) / x).ln()
    }
}

/// `2 sqrt(Γ0Γ1) / (Γ0 + Γ1)`: overlap of the two continuum wavepackets'
/// energy profiles.
fn prefactor(g0: f64, g1: f64) -> f64 {
    2.0 * (g0 * g1).sqrt() / (g0 + g1)
}

/// `1 - prefactor`, as `(sqrt(Γ1) - sqrt(Γ0))^2 / (Γ0 + Γ1)`.
fn one_minus_prefactor(g0: f64, g1: f64) -> f64 {
    let d = g1.sqrt() - g0.sqrt();
    d * d / (g0 + g1)
}

pub fn tunneling_d1(cfg: &TunnelingConfig) -> Result<f64> {
    cfg.check_informative()?;
    let d1 = 0.5 * (ln_h(cfg.g0t) + ln_h(cfg.g1t)) - ln_h(0.5 * (cfg.g0t + cfg.g1t));
    Ok(d1.max(0.0))
}

/// `F0 = e^{-Γ0t}`, `F1 = 1 - e^{-Γ1t}`, `D0 = 0`, `phi0 = 0`.
pub fn tunneling_detector(cfg: &TunnelingConfig) -> Result<QndDetector> {
    let d1 = tunneling_d1(cfg)?;
    QndDetector::new(
        (-cfg.g0t).exp(),
        one_minus_exp_neg(cfg.g1t),
        0.0,
        cfg.phi1,
        0.0,
        d1,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingEnsemble {
    pub d_av: f64,
    pub phi_av: f64,
    pub eta: Metric,
    /// Same expression with `phi1 = 0`; equals `eta` when `phi1 = 0`.
    pub eta_tilde: Metric,
}

/// Ensemble gain `e^{-(Γ0+Γ1)t/2} + pre e^{i phi1} (1 - e^{-(Γ0+Γ1)t/2})`.
pub fn tunneling_ensemble(cfg: &TunnelingConfig) -> Result<TunnelingEnsemble> {
    cfg.check_informative()?;
    let (g0, g1) = (cfg.g0t, cfg.g1t);
    let m = one_minus_exp_neg(0.5 * (g0 + g1));
    let pre = prefactor(g0, g1);
    let decay = |phi: f64| {
        // gain = 1 - z with z = m [(1 - pre) + pre (1 - e^{i phi})]
        let s = (0.5 * phi).sin();
        let z = Complex64::new(
            m * (one_minus_prefactor(g0, g1) + 2.0 * pre * s * s),
            -m * pre * phi.sin(),
        );
        let g = Complex64::new(1.0, 0.0) - z;
        (
            coherence_decay(g.norm_sqr(), || 2.0 * z.re - z.norm_sqr()),
            g,
        )
    };
    let (d_av, g) = decay(cfg.phi1);
    let (d_av_real, _) = decay(0.0);
    let dm = d_min((-g0).exp(), one_minus_exp_neg(g1));
    let eta = |d: f64| {
        if d.is_infinite() {
            Metric::Value(0.0)
        } else if d == 0.0 {
            Metric::Undefined(UndefinedReason::ZeroOverZero)
        } else {
            Metric::Value(dm / d)
        }
    };
    Ok(TunnelingEnsemble {
        d_av,
        phi_av: g.arg(),
        eta: eta(d_av),
        eta_tilde: eta(d_av_real),
    })
}

/// `F1 -> 1` limit of `D1`: `-ln[2 sqrt(Γ0Γ1)/(Γ0+Γ1)]`.
pub fn saturated_d1(ratio: f64) -> f64 {
    -prefactor(1.0, ratio).ln()
}
