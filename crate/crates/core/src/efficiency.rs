// SPDX-License-Identifier: Apache-2.0

//! Quantum-efficiency metrics of a QND detector.
//!
//! With `a = sqrt(F0(1-F1))`, `b = sqrt((1-F0)F1)` and `dphi = phi1 - phi0`:
//!
//! | metric            | definition                                              |
//! |-------------------|---------------------------------------------------------|
//! | `d_min`           | `-ln(a + b)`                                            |
//! | `d_av`, `phi_av`  | `e^{-D_av + i phi_av} = a e^{-D0+i phi0} + b e^{-D1+i phi1}` |
//! | `eta`             | `D_min / D_av`                                          |
//! | `eta_tilde`       | `D_min / -ln(a e^{-D0} + b e^{-D1})`                     |
//! | `eta_tilde_tilde` | `-ln|a + b e^{i dphi}| / D_av`                          |
//! | `eta0`, `eta1`    | `D_min / (D_i + D_min)`                                 |
//! | `eta0_tilde`      | `-ln a / (D0 - ln a)`                                   |
//! | `eta1_tilde`      | `-ln b / (D1 - ln b)`                                   |
//!
//! The phase difference in `eta_tilde_tilde` is the relative phase of the two
//! outcomes, `phi1 - phi0`.
//!
//! Infinite ingredients resolve by limits: a finite quantity over `+inf` is
//! 0, and an outcome metric `A / (D + A)` with `A = +inf`, `D` finite is 1.
//! `0/0` and `inf/inf` are reported as undefined, and so is everything when
//! `F0 = F1 = 1`, where `D_min` itself is infinite.

use std::fmt;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::qnd::{coherence_decay, d_min, distinguishability, ensemble_gain, QndDetector};

/// Why a metric has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UndefinedReason {
    /// Requires the post-measurement state of a destroyed outcome.
    DestroyedBranch,
    /// Numerator and denominator both vanish.
    ZeroOverZero,
    /// Numerator and denominator both diverge (perfect-fidelity limit).
    ProjectiveLimit,
}

impl UndefinedReason {
    pub fn code(self) -> &'static str {
        match self {
            UndefinedReason::DestroyedBranch => "destroyed-branch",
            UndefinedReason::ZeroOverZero => "zero-over-zero",
            UndefinedReason::ProjectiveLimit => "projective-limit",
        }
    }
}

impl fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// A metric value or the reason it is undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Value(f64),
    Undefined(UndefinedReason),
}

impl Metric {
    pub fn value(self) -> Option<f64> {
        match self {
            Metric::Value(v) => Some(v),
            Metric::Undefined(_) => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, Metric::Value(_))
    }

    /// Panics on undefined metrics; for tests and known-good configurations.
    pub fn unwrap(self) -> f64 {
        match self {
            Metric::Value(v) => v,
            Metric::Undefined(r) => panic!("metric undefined: {r}"),
        }
    }

    pub fn reason(self) -> Option<UndefinedReason> {
        match self {
            Metric::Value(_) => None,
            Metric::Undefined(r) => Some(r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    pub d_min: f64,
    pub d_av: Metric,
    pub phi_av: Metric,
    pub eta: Metric,
    pub eta_tilde: Metric,
    pub eta_tilde_tilde: Metric,
    pub eta0: Metric,
    pub eta1: Metric,
    pub eta0_tilde: Metric,
    pub eta1_tilde: Metric,
}

impl EfficiencyReport {
    /// `(name, metric)` pairs in a fixed order, `d_min` first.
    pub fn entries(&self) -> [(&'static str, Metric); 10] {
        [
            ("d_min", Metric::Value(self.d_min)),
            ("d_av", self.d_av),
            ("phi_av", self.phi_av),
            ("eta", self.eta),
            ("eta_tilde", self.eta_tilde),
            ("eta_tilde_tilde", self.eta_tilde_tilde),
            ("eta0", self.eta0),
            ("eta1", self.eta1),
            ("eta0_tilde", self.eta0_tilde),
            ("eta1_tilde", self.eta1_tilde),
        ]
    }

    /// The seven efficiencies.
    pub fn efficiencies(&self) -> [(&'static str, Metric); 7] {
        let e = self.entries();
        [e[3], e[4], e[5], e[6], e[7], e[8], e[9]]
    }

    pub fn get(&self, name: &str) -> Option<Metric> {
        self.entries()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, m)| m)
    }
}

/// Serialized as a flat object; undefined metrics are `null` with a sibling
/// `<name>_undefined_reason`, and infinite values are the string `"inf"`.
impl Serialize for EfficiencyReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        for (name, metric) in self.entries() {
            match metric {
                Metric::Value(v) if v.is_infinite() => map.serialize_entry(name, "inf")?,
                Metric::Value(v) => map.serialize_entry(name, &v)?,
                Metric::Undefined(r) => {
                    map.serialize_entry(name, &Option::<f64>::None)?;
                    map.serialize_entry(&format!("{name}_undefined_reason"), r.code())?;
                }
            }
        }
        map.end()
    }
}

fn ratio(num: f64, den: f64) -> Metric {
    match (num, den) {
        (n, d) if n == 0.0 && d == 0.0 => Metric::Undefined(UndefinedReason::ZeroOverZero),
        (n, d) if n.is_infinite() && d.is_infinite() => {
            Metric::Undefined(UndefinedReason::ProjectiveLimit)
        }
        (_, d) if d.is_infinite() => Metric::Value(0.0),
        (n, d) => Metric::Value(n / d),
    }
}

/// `A / (D + A)`, evaluated as `1 / (1 + D/A)` so that `A = inf` gives 1.
fn outcome_ratio(a: f64, d: f64) -> Metric {
    match (a, d) {
        (a, d) if a == 0.0 && d == 0.0 => Metric::Undefined(UndefinedReason::ZeroOverZero),
        (a, d) if a.is_infinite() && d.is_infinite() => {
            Metric::Undefined(UndefinedReason::ProjectiveLimit)
        }
        (a, _) if a.is_infinite() => Metric::Value(1.0),
        (_, d) if d.is_infinite() => Metric::Value(0.0),
        (a, d) => Metric::Value(a / (d + a)),
    }
}

/// `1 - e^{-2d}`, exact at `d = inf`.
fn damp_loss(d: f64) -> f64 {
    -(-2.0 * d).exp_m1()
}

/// `1 - e^{-(d0+d1)} cos(dphi)` as a sum of nonnegative terms.
fn cross_loss(d0: f64, d1: f64, dphi: f64) -> f64 {
    let x = d0 + d1;
    let s = (0.5 * dphi).sin();
    -(-x).exp_m1() + (-x).exp() * 2.0 * s * s
}

/// Decoherence `-ln |a e^{-d0} + b e^{-d1 + i dphi}|`.
///
/// `1 - |g|^2 = delta^2 + a^2 (1 - e^{-2 d0}) + b^2 (1 - e^{-2 d1})
///            + 2ab (1 - e^{-(d0+d1)} cos dphi)`, which is never below the
/// `D_min` loss `delta^2`, so the computed value never drops below `D_min`.
fn combined_decay(a: f64, b: f64, delta_sq: f64, d0: f64, d1: f64, dphi: f64) -> f64 {
    let g = num_complex::Complex64::new(a * (-d0).exp(), 0.0)
        + num_complex::Complex64::from_polar(b * (-d1).exp(), dphi);
    coherence_decay(g.norm_sqr(), || {
        delta_sq
            + a * a * damp_loss(d0)
            + b * b * damp_loss(d1)
            + 2.0 * a * b * cross_loss(d0, d1, dphi)
    })
}

pub fn efficiency_report(det: &QndDetector) -> EfficiencyReport {
    let (f0, f1) = (det.f0(), det.f1());
    let a = (f0 * (1.0 - f1)).sqrt();
    let b = ((1.0 - f0) * f1).sqrt();
    let delta = distinguishability(f0, f1);
    let delta_sq = delta * delta;
    let d_min = d_min(f0, f1);
    let (d0, d1) = (det.d0(), det.d1());
    let dphi = det.phi1() - det.phi0();

    let eta0_tilde_num = if a > 0.0 { -a.ln() } else { f64::INFINITY };
    let eta1_tilde_num = if b > 0.0 { -b.ln() } else { f64::INFINITY };

    if d_min.is_infinite() {
        let u = Metric::Undefined(UndefinedReason::ProjectiveLimit);
        let (d_av, phi_av) = if det.destroys_on_1() {
            let u = Metric::Undefined(UndefinedReason::DestroyedBranch);
            (u, u)
        } else {
            let g = ensemble_gain(det).expect("non-destructive");
            (Metric::Value(f64::INFINITY), Metric::Value(g.arg()))
        };
        return EfficiencyReport {
            d_min,
            d_av,
            phi_av,
            eta: u,
            eta_tilde: u,
            eta_tilde_tilde: u,
            eta0: u,
            eta1: u,
            eta0_tilde: u,
            eta1_tilde: u,
        };
    }

    let eta0 = outcome_ratio(d_min, d0);
    let eta0_tilde = outcome_ratio(eta0_tilde_num, d0);

    if det.destroys_on_1() {
        let u = Metric::Undefined(UndefinedReason::DestroyedBranch);
        return EfficiencyReport {
            d_min,
            d_av: u,
            phi_av: u,
            eta: u,
            eta_tilde: u,
            eta_tilde_tilde: u,
            eta0,
            eta1: u,
            eta0_tilde,
            eta1_tilde: u,
        };
    }

    let gain = ensemble_gain(det).expect("non-destructive");
    let d_av = combined_decay(a, b, delta_sq, d0, d1, dphi);
    let phi_av = if gain.norm() > 0.0 { gain.arg() } else { 0.0 };
    let d_tilde = combined_decay(a, b, delta_sq, d0, d1, 0.0);
    let d_phase_only = combined_decay(a, b, delta_sq, 0.0, 0.0, dphi);

    EfficiencyReport {
        d_min,
        d_av: Metric::Value(d_av),
        phi_av: Metric::Value(phi_av),
        eta: ratio(d_min, d_av),
        eta_tilde: ratio(d_min, d_tilde),
        eta_tilde_tilde: ratio(d_phase_only, d_av),
        eta0,
        eta1: outcome_ratio(d_min, d1),
        eta0_tilde,
        eta1_tilde: outcome_ratio(eta1_tilde_num, d1),
    }
}
