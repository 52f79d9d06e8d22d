// SPDX-License-Identifier: Apache-2.0

//! Threshold detector by direct integration over the measurement record.
//!
//! For a record value `r` the unnormalized conditioned state has
//! `rho00 e^{-(r+s)^2}/sqrt(pi)`, `rho11 e^{-(r-s)^2}/sqrt(pi)` and
//! `rho01 e^{-gamma_t} e^{-r^2-s^2}/sqrt(pi) e^{2i kappa s r}`. Integrating
//! each factor over `r < r_th` (outcome 0) or `r > r_th` (outcome 1) gives the
//! outcome branches without using any of the closed forms in
//! [`crate::models::linear`].

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::linear::LinearDetectorConfig;
use crate::oracles::quadrature::{integrate, Tolerance};
use crate::qnd::{Outcome, OutcomeBranch, QndDetector};
use crate::special::erfc;
use crate::state::QubitState;

/// Relative accuracy requested on top of the caller's absolute tolerance, so
/// that tiny outcome weights still resolve their logarithms.
const REL_TOL: f64 = 1e-12;
const MAX_INTERVALS: usize = 4000;
/// Record cutoff in units of the Gaussian width beyond the signal.
const CUTOFF: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearQuadrature {
    pub branches: [OutcomeBranch; 2],
    /// Bound on the absolute error of every branch entry, truncation included.
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadLinearResult {
    pub p0: f64,
    pub post0: Option<QubitState>,
    pub p1: f64,
    pub post1: Option<QubitState>,
    /// Absolute error bound on the branch weights and gains.
    pub error_bound: f64,
}

/// Mass of the variance-1/2 Gaussian above `x`.
fn upper(x: f64) -> f64 {
    0.5 * erfc(x)
}

/// Integrates both outcome branches to absolute accuracy `tol`.
pub fn quad_linear_branches(cfg: &LinearDetectorConfig, tol: f64) -> Result<LinearQuadrature> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tol = {tol} must be > 0")));
    }
    let s = cfg.s;
    let r_th = cfg.r_th;
    let damp = (-cfg.gamma_t - s * s).exp() / PI.sqrt();
    let kphase = 2.0 * cfg.kappa * s;
    let f = |r: f64| {
        let (sin, cos) = (kphase * r).sin_cos();
        let g = damp * (-r * r).exp();
        [
            (-(r + s) * (r + s)).exp() / PI.sqrt(),
            (-(r - s) * (r - s)).exp() / PI.sqrt(),
            g * cos,
            g * sin,
        ]
    };
    // The truncation follows the threshold when it lies outside the bulk.
    let lo = (-CUTOFF - s).min(r_th - CUTOFF);
    let hi = (CUTOFF + s).max(r_th + CUTOFF);
    let t = Tolerance {
        abs: tol,
        rel: REL_TOL,
    };
    let below = integrate(f, lo, r_th, t, MAX_INTERVALS)?;
    let above = integrate(f, r_th, hi, t, MAX_INTERVALS)?;

    // Gaussian tails: largest of the three masses cut off on each side.
    let tail_lo = upper(-(lo + s)).max(upper(-(lo - s)));
    let tail_hi = upper(hi - s).max(upper(hi + s));
    let error = below.max_error().max(above.max_error()) + tail_lo.max(tail_hi);
    if error > tol {
        return Err(Error::Accuracy {
            requested: tol,
            achieved: error,
        });
    }
    let branch = |v: [f64; 4]| OutcomeBranch {
        w0: v[0],
        w1: v[1],
        gain: Complex64::new(v[2], v[3]),
    };
    Ok(LinearQuadrature {
        branches: [branch(below.value), branch(above.value)],
        error,
    })
}

/// Outcome probabilities and conditioned states by quadrature. A post-state
/// is `None` when its outcome has zero probability.
pub fn quad_linear(
    cfg: &LinearDetectorConfig,
    state: &QubitState,
    tol: f64,
) -> Result<QuadLinearResult> {
    let q = quad_linear_branches(cfg, tol)?;
    let post = |o: Outcome| {
        let b = &q.branches[o.index() as usize];
        if b.probability(state) > 0.0 {
            b.post_state(state, o).map(Some)
        } else {
            Ok(None)
        }
    };
    Ok(QuadLinearResult {
        p0: q.branches[0].probability(state),
        post0: post(Outcome::Zero)?,
        p1: q.branches[1].probability(state),
        post1: post(Outcome::One)?,
        error_bound: q.error,
    })
}

/// Six-parameter detector from the integrated branches. Works for any
/// `kappa`, where the coherence picks up outcome-dependent phases.
pub fn linear_detector_quadrature(cfg: &LinearDetectorConfig, tol: f64) -> Result<QndDetector> {
    let q = quad_linear_branches(cfg, tol)?;
    let [b0, b1] = q.branches;
    let (f0, f1) = (b0.w0.clamp(0.0, 1.0), b1.w1.clamp(0.0, 1.0));
    let extract = |b: &OutcomeBranch| {
        let bound = (b.w0 * b.w1).sqrt();
        let g = b.gain.norm();
        if g == 0.0 || bound == 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            ((bound / g).ln().max(0.0), b.gain.arg())
        }
    };
    let (d0, phi0) = extract(&b0);
    let (d1, phi1) = extract(&b1);
    QndDetector::new(f0, f1, phi0, phi1, d0, d1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::linear::{linear_d0, linear_detector};

    #[test]
    fn basis_state_is_untouched() {
        let cfg = LinearDetectorConfig::ideal(0.5, 0.2).unwrap();
        let r = quad_linear(&cfg, &QubitState::ground(), 1e-12).unwrap();
        assert_eq!(r.post0.unwrap().rho00(), 1.0);
        assert_eq!(r.post1.unwrap().rho00(), 1.0);
        assert!((r.p0 - crate::special::lower_mass(0.7)).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let cfg = LinearDetectorConfig::new(1.2, -0.4, 0.1, 0.3).unwrap();
        let r = quad_linear(&cfg, &QubitState::equal_superposition(), 1e-12).unwrap();
        assert!((r.p0 + r.p1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ensemble_multiplier() {
        for (s, r, g, k) in [
            (0.5, 0.3, 0.0, 0.0),
            (1.0, -0.5, 0.2, 0.7),
            (2.0, 1.0, 0.0, 1.5),
        ] {
            let cfg = LinearDetectorConfig::new(s, r, g, k).unwrap();
            let q = quad_linear_branches(&cfg, 1e-12).unwrap();
            let total = q.branches[0].gain + q.branches[1].gain;
            let expected = (-(g + s * s * (1.0 + k * k))).exp();
            assert!(
                (total - Complex64::new(expected, 0.0)).norm() < 1e-10,
                "{cfg:?}"
            );
        }
    }

    #[test]
    fn matches_closed_form_d0() {
        for s in [0.1, 1.0, 2.0] {
            for r in [-1.5, 0.0, 1.5] {
                let cfg = LinearDetectorConfig::ideal(s, r).unwrap();
                let quad = linear_detector_quadrature(&cfg, 1e-13).unwrap();
                let analytic = linear_d0(&cfg).unwrap();
                assert!((quad.d0() - analytic).abs() < 1e-8, "{s} {r}");
                let det = linear_detector(&cfg).unwrap();
                assert!((quad.d1() - det.d1()).abs() < 1e-8);
                assert!(quad.phi0().abs() < 1e-15);
            }
        }
    }

    #[test]
    fn kappa_gives_outcome_phases() {
        let cfg = LinearDetectorConfig::new(1.0, 0.5, 0.0, 0.5).unwrap();
        let det = linear_detector_quadrature(&cfg, 1e-12).unwrap();
        assert!(det.phi0().abs() > 1e-3);
        assert!(det.phi1().abs() > 1e-3);
    }

    #[test]
    fn far_threshold_keeps_relative_accuracy() {
        let cfg = LinearDetectorConfig::ideal(1.0, -9.0).unwrap();
        let q = quad_linear_branches(&cfg, 1e-12).unwrap();
        let f0 = crate::special::lower_mass(-8.0);
        assert!((q.branches[0].w0 / f0 - 1.0).abs() < 1e-10);
    }
}
