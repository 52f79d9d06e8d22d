// SPDX-License-Identifier: Apache-2.0

//! The six-parameter binary-outcome QND detector.
//!
//! Outcome `i` acts on a density matrix as a diagonal scaling map: the
//! populations are multiplied by the outcome likelihoods and the coherence
//! `rho01` by a complex gain,
//!
//! ```text
//! outcome 0:  rho00 -> F0 rho00,      rho11 -> (1-F1) rho11,  rho01 -> sqrt(F0 (1-F1)) e^{-D0} e^{i phi0} rho01
//! outcome 1:  rho00 -> (1-F0) rho00,  rho11 -> F1 rho11,      rho01 -> sqrt((1-F0) F1) e^{-D1} e^{i phi1} rho01
//! ```
//!
//! followed by division by the outcome probability. [`OutcomeBranch`] is that
//! unnormalized map; QND maps compose by multiplying weights and gains.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_inf;
use crate::state::QubitState;

/// Measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Zero, Outcome::One];

    pub fn index(self) -> u8 {
        match self {
            Outcome::Zero => 0,
            Outcome::One => 1,
        }
    }
}

impl From<Outcome> for u8 {
    fn from(o: Outcome) -> u8 {
        o.index()
    }
}

impl TryFrom<u8> for Outcome {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Outcome::Zero),
            1 => Ok(Outcome::One),
            other => Err(format!("outcome must be 0 or 1, got {other}")),
        }
    }
}

/// Maps an angle onto `(-pi, pi]`.
pub fn canonical_phase(phi: f64) -> f64 {
    let x = phi.rem_euclid(2.0 * PI);
    if x > PI {
        x - 2.0 * PI
    } else {
        x
    }
}

/// Binary-outcome QND detector `(F0, F1, phi0, phi1, D0, D1)`.
///
/// `destroys_on_1` marks detectors (such as the phase-qubit switching
/// readout) after which the qubit no longer exists when outcome 1 occurs;
/// `d1` is then `+inf` and `phi1` is `0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DetectorRepr", into = "DetectorRepr")]
pub struct QndDetector {
    f0: f64,
    f1: f64,
    phi0: f64,
    phi1: f64,
    d0: f64,
    d1: f64,
    destroys_on_1: bool,
}

impl QndDetector {
    pub fn new(f0: f64, f1: f64, phi0: f64, phi1: f64, d0: f64, d1: f64) -> Result<Self> {
        Self::validated(f0, f1, phi0, phi1, d0, d1, false)
    }

    /// A detector that destroys the qubit on outcome 1.
    pub fn destructive(f0: f64, f1: f64, phi0: f64, d0: f64) -> Result<Self> {
        Self::validated(f0, f1, phi0, 0.0, d0, f64::INFINITY, true)
    }

    /// `D0 = D1 = 0`, equal phases: transforms pure states into pure states.
    pub fn ideal(f0: f64, f1: f64) -> Result<Self> {
        Self::new(f0, f1, 0.0, 0.0, 0.0, 0.0)
    }

    fn validated(
        f0: f64,
        f1: f64,
        phi0: f64,
        phi1: f64,
        d0: f64,
        d1: f64,
        destroys_on_1: bool,
    ) -> Result<Self> {
        for (name, f) in [("f0", f0), ("f1", f1)] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidDetector(format!(
                    "{name} = {f} outside [0, 1]"
                )));
            }
        }
        for (name, d) in [("d0", d0), ("d1", d1)] {
            if d.is_nan() || d < 0.0 {
                return Err(Error::InvalidDetector(format!("{name} = {d} must be >= 0")));
            }
        }
        for (name, p) in [("phi0", phi0), ("phi1", phi1)] {
            if !p.is_finite() {
                return Err(Error::InvalidDetector(format!(
                    "{name} = {p} is not finite"
                )));
            }
        }
        if destroys_on_1 && d1 != f64::INFINITY {
            return Err(Error::InvalidDetector(
                "destroys_on_1 requires d1 = inf".into(),
            ));
        }
        Ok(Self {
            f0,
            f1,
            phi0: canonical_phase(phi0),
            phi1: if destroys_on_1 {
                0.0
            } else {
                canonical_phase(phi1)
            },
            d0,
            d1,
            destroys_on_1,
        })
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }
    pub fn f1(&self) -> f64 {
        self.f1
    }
    pub fn phi0(&self) -> f64 {
        self.phi0
    }
    pub fn phi1(&self) -> f64 {
        self.phi1
    }
    pub fn d0(&self) -> f64 {
        self.d0
    }
    pub fn d1(&self) -> f64 {
        self.d1
    }
    pub fn destroys_on_1(&self) -> bool {
        self.destroys_on_1
    }

    pub fn d(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::Zero => self.d0,
            Outcome::One => self.d1,
        }
    }

    pub fn phi(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::Zero => self.phi0,
            Outcome::One => self.phi1,
        }
    }

    /// `sqrt(F0 (1-F1))` for outcome 0, `sqrt((1-F0) F1)` for outcome 1: the
    /// largest coherence gain the outcome permits.
    pub fn informational_gain(&self, outcome: Outcome) -> f64 {
        let (w0, w1) = self.weights(outcome);
        (w0 * w1).sqrt()
    }

    fn weights(&self, outcome: Outcome) -> (f64, f64) {
        match outcome {
            Outcome::Zero => (self.f0, 1.0 - self.f1),
            Outcome::One => (1.0 - self.f0, self.f1),
        }
    }

    /// Unnormalized map of one outcome. For a destructive detector the
    /// outcome-1 branch still carries the correct weights (its probability is
    /// meaningful) but its gain is zero and the post-state is not physical.
    pub fn branch(&self, outcome: Outcome) -> OutcomeBranch {
        let (w0, w1) = self.weights(outcome);
        let d = self.d(outcome);
        let gain = if d.is_infinite() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar((w0 * w1).sqrt() * (-d).exp(), self.phi(outcome))
        };
        OutcomeBranch { w0, w1, gain }
    }

    /// Whether outcome `outcome` leaves no qubit behind.
    pub fn destroys(&self, outcome: Outcome) -> bool {
        self.destroys_on_1 && outcome == Outcome::One
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectorRepr {
    f0: f64,
    f1: f64,
    #[serde(default)]
    phi0: f64,
    #[serde(default)]
    phi1: f64,
    #[serde(default, with = "serde_inf")]
    d0: f64,
    #[serde(
        default,
        serialize_with = "serialize_opt_inf",
        deserialize_with = "serde_inf::deserialize_opt"
    )]
    d1: Option<f64>,
    #[serde(default)]
    destroys_on_1: bool,
}

fn serialize_opt_inf<S: serde::Serializer>(
    x: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => serde_inf::serialize(v, s),
        None => s.serialize_none(),
    }
}

impl TryFrom<DetectorRepr> for QndDetector {
    type Error = Error;

    fn try_from(r: DetectorRepr) -> Result<Self> {
        let d1 =
            r.d1.unwrap_or(if r.destroys_on_1 { f64::INFINITY } else { 0.0 });
        Self::validated(r.f0, r.f1, r.phi0, r.phi1, r.d0, d1, r.destroys_on_1)
    }
}

impl From<QndDetector> for DetectorRepr {
    fn from(d: QndDetector) -> Self {
        DetectorRepr {
            f0: d.f0,
            f1: d.f1,
            phi0: d.phi0,
            phi1: d.phi1,
            d0: d.d0,
            d1: Some(d.d1),
            destroys_on_1: d.destroys_on_1,
        }
    }
}

/// Unnormalized diagonal-scaling map of a single measurement outcome:
/// `rho00 -> w0 rho00`, `rho11 -> w1 rho11`, `rho01 -> gain rho01`.
///
/// Complete positivity requires `|gain| <= sqrt(w0 w1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeBranch {
    pub w0: f64,
    pub w1: f64,
    pub gain: Complex64,
}

impl OutcomeBranch {
    pub fn probability(&self, state: &QubitState) -> f64 {
        self.w0 * state.rho00() + self.w1 * state.rho11()
    }

    /// Normalized post-measurement state.
    pub fn post_state(&self, state: &QubitState, outcome: Outcome) -> Result<QubitState> {
        let p = self.probability(state);
        if p <= 0.0 {
            return Err(Error::ImpossibleOutcome {
                outcome: outcome.index(),
            });
        }
        QubitState::new(self.w0 * state.rho00() / p, self.gain * state.rho01() / p)
    }

    /// The map "apply `self`, then `next`".
    pub fn then(&self, next: &OutcomeBranch) -> OutcomeBranch {
        OutcomeBranch {
            w0: self.w0 * next.w0,
            w1: self.w1 * next.w1,
            gain: self.gain * next.gain,
        }
    }
}

/// Post-measurement qubit, or nothing if the outcome destroyed it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PostState {
    State(QubitState),
    Destroyed,
}

impl PostState {
    pub fn state(&self) -> Option<&QubitState> {
        match self {
            PostState::State(s) => Some(s),
            PostState::Destroyed => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeResult {
    pub outcome: Outcome,
    pub probability: f64,
    pub post_state: PostState,
}

/// `P0 = F0 rho00 + (1-F1) rho11`, `P1 = (1-F0) rho00 + F1 rho11`.
///
/// Each is summed from its own weights rather than as `1 - P_other`, which
/// would lose the relative accuracy of a rare outcome.
pub fn outcome_probabilities(state: &QubitState, det: &QndDetector) -> (f64, f64) {
    let p = |o| {
        let (w0, w1) = det.weights(o);
        w0 * state.rho00() + w1 * state.rho11()
    };
    (p(Outcome::Zero), p(Outcome::One))
}

/// Applies the measurement and conditions on `outcome`.
pub fn apply_outcome(
    state: &QubitState,
    det: &QndDetector,
    outcome: Outcome,
) -> Result<OutcomeResult> {
    let (p0, p1) = outcome_probabilities(state, det);
    let probability = match outcome {
        Outcome::Zero => p0,
        Outcome::One => p1,
    };
    if probability <= 0.0 {
        return Err(Error::ImpossibleOutcome {
            outcome: outcome.index(),
        });
    }
    let post_state = if det.destroys(outcome) {
        PostState::Destroyed
    } else {
        let b = det.branch(outcome);
        PostState::State(QubitState::new(
            b.w0 * state.rho00() / probability,
            b.gain * state.rho01() / probability,
        )?)
    };
    Ok(OutcomeResult {
        outcome,
        probability,
        post_state,
    })
}

/// Ensemble gain `e^{-D_av} e^{i phi_av}`: the sum of both outcome gains.
pub fn ensemble_gain(det: &QndDetector) -> Result<Complex64> {
    if det.destroys_on_1 {
        return Err(Error::UndefinedAverage);
    }
    Ok(det.branch(Outcome::Zero).gain + det.branch(Outcome::One).gain)
}

/// State averaged over both outcomes: populations unchanged, coherence
/// multiplied by the ensemble gain.
pub fn average_transform(state: &QubitState, det: &QndDetector) -> Result<QubitState> {
    let g = ensemble_gain(det)?;
    QubitState::new(state.rho00(), g * state.rho01())
}

/// `sqrt(F0 F1) - sqrt((1-F0)(1-F1))`. The informational coherence factor
/// satisfies `[sqrt(F0(1-F1)) + sqrt((1-F0)F1)]^2 = 1 - delta^2`.
pub(crate) fn distinguishability(f0: f64, f1: f64) -> f64 {
    (f0 * f1).sqrt() - ((1.0 - f0) * (1.0 - f1)).sqrt()
}

/// Informational lower bound on ensemble decoherence,
/// `-ln[sqrt(F0(1-F1)) + sqrt((1-F0)F1)]`; `+inf` for `F0 = F1 = 1` or
/// `F0 = F1 = 0`.
pub fn d_min(f0: f64, f1: f64) -> f64 {
    let a = (f0 * (1.0 - f1)).sqrt();
    let b = ((1.0 - f0) * f1).sqrt();
    let delta = distinguishability(f0, f1);
    coherence_decay((a + b) * (a + b), || delta * delta)
}

/// `-ln |g|` given `|g|^2` and, separately, `1 - |g|^2` computed as a sum of
/// nonnegative terms. The second form keeps small decoherences accurate; the
/// first is used once `|g|` is small and `1 - |g|^2` has no digits left.
pub(crate) fn coherence_decay(g_sq: f64, loss: impl FnOnce() -> f64) -> f64 {
    if g_sq >= 0.25 {
        -0.5 * (-loss()).ln_1p()
    } else if g_sq > 0.0 {
        -0.5 * g_sq.ln()
    } else {
        f64::INFINITY
    }
}

/// Sequential application of two detectors for the outcome pair
/// `(outcome_a, outcome_b)`, as a single unnormalized map. The joint
/// probability is `branch.probability(state)` and the final state is
/// `branch.post_state(state)`.
pub fn compose_sequential(
    det_a: &QndDetector,
    det_b: &QndDetector,
    outcome_a: Outcome,
    outcome_b: Outcome,
) -> Result<OutcomeBranch> {
    if det_a.destroys(outcome_a) || det_b.destroys(outcome_b) {
        return Err(Error::DestroyedIntermediate);
    }
    Ok(det_a.branch(outcome_a).then(&det_b.branch(outcome_b)))
}
