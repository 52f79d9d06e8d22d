// SPDX-License-Identifier: Apache-2.0

//! Tunneling detector by direct Schrödinger evolution.
//!
//! Each qubit state `j` has a well amplitude `a_j` coupled with constant
//! amplitude `T_j` to `M` continuum levels spread uniformly over
//! `[-W/2, W/2]` (`hbar = 1`):
//!
//! ```text
//! da_j/dt   = -i sum_k conj(T_j) b_jk
//! db_jk/dt  = -i eps_k b_jk - i T_j a_j
//! ```
//!
//! with `T_j = sqrt(Γ_j / (2 pi rho))` for level density `rho`. Only the
//! symmetric combination `u = sum_k |k> / sqrt(M)` couples to the well, so a
//! Strang step is a diagonal phase, an exact 2x2 rotation between `a` and
//! `<u|b>`, and another phase. Three Strang steps with Yoshida weights give
//! a 4th-order unitary integrator.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::tunneling::TunnelingConfig;

pub const DEFAULT_LEVELS: usize = 4001;
/// Bandwidth in units of `Γ1`.
pub const DEFAULT_BANDWIDTH_RATIO: f64 = 200.0;
/// Largest `W * dt` chosen by the defaults.
pub const DEFAULT_W_DT: f64 = 0.05;
pub const NORM_LIMIT: f64 = 1e-8;
/// Rise of `|a_j|^2` above its running minimum that counts as a recurrence.
const RECURRENCE_RISE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuumDiscretization {
    pub levels: usize,
    pub bandwidth: f64,
    pub dt: f64,
}

impl ContinuumDiscretization {
    /// `M = 4001`, `W = 200 Γ1`, `W dt <= 0.05`, with `Γ1 = g1t / t`.
    pub fn default_for(cfg: &TunnelingConfig, t: f64) -> Self {
        Self::with_bandwidth(cfg, t, DEFAULT_LEVELS, DEFAULT_BANDWIDTH_RATIO)
    }

    /// `levels` levels over `bandwidth_ratio * Γ1`, default time step.
    pub fn with_bandwidth(
        cfg: &TunnelingConfig,
        t: f64,
        levels: usize,
        bandwidth_ratio: f64,
    ) -> Self {
        let bandwidth = bandwidth_ratio * cfg.g1t / t;
        Self {
            levels,
            bandwidth,
            dt: DEFAULT_W_DT / bandwidth,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.bandwidth / (self.levels - 1) as f64
    }

    /// Time at which the discrete spectrum first rephases.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.spacing()
    }

    fn validate(&self, gamma1: f64, t: f64) -> Result<()> {
        if self.levels < 3 || !(self.bandwidth > 0.0) || !(self.dt > 0.0) || !(t > 0.0) {
            return Err(Error::Discretization(format!(
                "bad discretization {self:?} for t = {t}"
            )));
        }
        if self.bandwidth < 100.0 * gamma1 {
            return Err(Error::Discretization(format!(
                "bandwidth {} is below 100 * Γ1 = {}",
                self.bandwidth,
                100.0 * gamma1
            )));
        }
        if t > 0.1 * self.recurrence_time() {
            return Err(Error::Discretization(format!(
                "t = {t} exceeds a tenth of the recurrence time {}",
                self.recurrence_time()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuumRecord {
    pub f0: f64,
    pub f1: f64,
    pub d1: f64,
    pub phi1: f64,
    #[serde(serialize_with = "ser_complex")]
    pub overlap: Complex64,
    /// Largest `| |a|^2 + sum |b|^2 - 1 |` seen over both trajectories.
    pub norm_drift: f64,
    pub steps: usize,
    pub discretization: ContinuumDiscretization,
    pub t: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    [z.re, z.im].serialize(s)
}

struct Branch {
    a: Complex64,
    b: Vec<Complex64>,
}

/// One Strang step of length `h`, given `e^{-i eps_k h/2}` and the rotation
/// `(cos, sin)` of angle `Ω h`.
fn strang(
    br: &mut Branch,
    half_phase: &[Complex64],
    cos: f64,
    sin: f64,
    e_theta: Complex64,
    u: f64,
) {
    let mut sum = Complex64::new(0.0, 0.0);
    for (b, ph) in br.b.iter_mut().zip(half_phase) {
        *b *= ph;
        sum += *b;
    }
    let p = sum * u;
    let i = Complex64::i();
    let a_new = br.a * cos - i * e_theta.conj() * sin * p;
    let p_new = p * cos - i * e_theta * sin * br.a;
    br.a = a_new;
    let delta = (p_new - p) * u;
    for (b, ph) in br.b.iter_mut().zip(half_phase) {
        *b = (*b + delta) * ph;
    }
}

fn norm_sq(br: &Branch) -> f64 {
    br.a.norm_sqr() + br.b.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

struct Trajectory {
    branch: Branch,
    drift: f64,
}

fn evolve(
    coupling: Complex64,
    disc: &ContinuumDiscretization,
    t: f64,
    steps: usize,
) -> Result<Trajectory> {
    let m = disc.levels;
    let h = t / steps as f64;
    let eps: Vec<f64> = (0..m)
        .map(|k| -0.5 * disc.bandwidth + k as f64 * disc.spacing())
        .collect();
    let u = 1.0 / (m as f64).sqrt();
    let omega = coupling.norm() * (m as f64).sqrt();
    let e_theta = if coupling.norm() > 0.0 {
        coupling / coupling.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };

    let w1 = 1.0 / (2.0 - 2f64.cbrt());
    let w0 = -2f64.cbrt() * w1;
    let prep = |w: f64| {
        let phase: Vec<Complex64> = eps
            .iter()
            .map(|e| Complex64::from_polar(1.0, -0.5 * e * w * h))
            .collect();
        let (sin, cos) = (omega * w * h).sin_cos();
        (phase, cos, sin)
    };
    let (ph1, c1, s1) = prep(w1);
    let (ph0, c0, s0) = prep(w0);

    let mut br = Branch {
        a: Complex64::new(1.0, 0.0),
        b: vec![Complex64::new(0.0, 0.0); m],
    };
    let mut drift: f64 = 0.0;
    let mut min_pop: f64 = 1.0;
    let check_every = (steps / 200).max(1);
    for n in 1..=steps {
        strang(&mut br, &ph1, c1, s1, e_theta, u);
        strang(&mut br, &ph0, c0, s0, e_theta, u);
        strang(&mut br, &ph1, c1, s1, e_theta, u);
        let pop = br.a.norm_sqr();
        min_pop = min_pop.min(pop);
        if pop - min_pop > RECURRENCE_RISE {
            return Err(Error::Discretization(format!(
                "well population rose from {min_pop} to {pop} at step {n}: recurrence"
            )));
        }
        if n % check_every == 0 || n == steps {
            drift = drift.max((norm_sq(&br) - 1.0).abs());
            if drift > NORM_LIMIT {
                return Err(Error::StepperAccuracy {
                    drift,
                    limit: NORM_LIMIT,
                });
            }
        }
    }
    Ok(Trajectory { branch: br, drift })
}

/// Number of fixed steps covering `t` with step at most `disc.dt`.
pub fn step_count(disc: &ContinuumDiscretization, t: f64) -> usize {
    ((t / disc.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Evolves both qubit branches for time `t` with rates `Γ_j = g_jt / t` and
/// reads off the detector parameters.
pub fn solve_discretized_continuum(
    cfg: &TunnelingConfig,
    disc: &ContinuumDiscretization,
    t: f64,
) -> Result<ContinuumRecord> {
    if cfg.g1t == 0.0 {
        return Err(Error::Degenerate("g1t = 0: nothing tunnels".into()));
    }
    let gamma0 = cfg.g0t / t;
    let gamma1 = cfg.g1t / t;
    disc.validate(gamma1, t)?;
    let density = 1.0 / disc.spacing();
    let t0 = Complex64::from_polar((gamma0 / (2.0 * PI * density)).sqrt(), cfg.phi1);
    let t1 = Complex64::new((gamma1 / (2.0 * PI * density)).sqrt(), 0.0);
    let steps = step_count(disc, t);

    let (r0, r1) = rayon::join(|| evolve(t0, disc, t, steps), || evolve(t1, disc, t, steps));
    let (r0, r1) = (r0?, r1?);

    let overlap: Complex64 = r0
        .branch
        .b
        .iter()
        .zip(&r1.branch.b)
        .map(|(x, y)| x * y.conj())
        .sum();
    let tunneled0: f64 = r0.branch.b.iter().map(|z| z.norm_sqr()).sum();
    let tunneled1: f64 = r1.branch.b.iter().map(|z| z.norm_sqr()).sum();
    let bound = (tunneled0 * tunneled1).sqrt();
    let (d1, phi1) = if overlap.norm() > 0.0 && bound > 0.0 {
        ((bound / overlap.norm()).ln(), overlap.arg())
    } else {
        (f64::INFINITY, 0.0)
    };
    Ok(ContinuumRecord {
        f0: r0.branch.a.norm_sqr(),
        f1: 1.0 - r1.branch.a.norm_sqr(),
        d1,
        phi1,
        overlap,
        norm_drift: r0.drift.max(r1.drift),
        steps,
        discretization: *disc,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::tunneling::{tunneling_detector, TunnelingConfig};
    use std::f64::consts::LN_2;

    fn small_disc(levels: usize, dt: f64) -> ContinuumDiscretization {
        ContinuumDiscretization {
            levels,
            bandwidth: 100.0,
            dt,
        }
    }

    #[test]
    fn identical_branches_do_not_decohere() {
        let cfg = TunnelingConfig::new(LN_2, LN_2, 0.0).unwrap();
        let rec = solve_discretized_continuum(
            &cfg,
            &ContinuumDiscretization::default_for(&cfg, 1.0),
            1.0,
        )
        .unwrap();
        assert!(rec.d1.abs() < 1e-10);
        assert!((rec.f0 + rec.f1 - 1.0).abs() < 1e-12);
        assert!(rec.norm_drift < 1e-10);
    }

    #[test]
    fn real_couplings_give_zero_phase() {
        let cfg = TunnelingConfig::new(0.3, 0.9, 0.0).unwrap();
        let rec = solve_discretized_continuum(&cfg, &small_disc(801, 0.01), 1.0).unwrap();
        assert!(rec.phi1.abs() < 1e-6);
    }

    #[test]
    fn coupling_phase_appears_in_overlap() {
        let cfg = TunnelingConfig::new(0.3, 0.9, 0.4).unwrap();
        let rec = solve_discretized_continuum(&cfg, &small_disc(801, 0.01), 1.0).unwrap();
        assert!((rec.phi1 - 0.4).abs() < 1e-6);
    }

    #[test]
    fn decoherence_close_to_closed_form() {
        let cfg = TunnelingConfig::from_ratio_f1(3.0, 0.5, 0.0).unwrap();
        let rec = solve_discretized_continuum(
            &cfg,
            &ContinuumDiscretization::default_for(&cfg, 1.0),
            1.0,
        )
        .unwrap();
        let det = tunneling_detector(&cfg).unwrap();
        assert!(
            (rec.d1 - det.d1()).abs() < 1e-3,
            "{} vs {}",
            rec.d1,
            det.d1()
        );
    }

    #[test]
    fn fourth_order_in_time_step() {
        let cfg = TunnelingConfig::new(0.4, 1.0, 0.0).unwrap();
        let run = |dt: f64| {
            let disc = ContinuumDiscretization {
                levels: 201,
                bandwidth: 100.0,
                dt,
            };
            solve_discretized_continuum(&cfg, &disc, 1.0).unwrap()
        };
        let reference = run(1e-4);
        let err = |dt| {
            let r = run(dt);
            (r.overlap - reference.overlap).norm()
        };
        let (e1, e2) = (err(0.04), err(0.02));
        let ratio = e1 / e2;
        assert!(
            (12.0..20.0).contains(&ratio),
            "ratio {ratio}, errors {e1:e} {e2:e}"
        );
    }

    #[test]
    fn refining_levels_changes_d1_little() {
        let cfg = TunnelingConfig::from_ratio_f1(3.0, 0.5, 0.0).unwrap();
        let base = ContinuumDiscretization::default_for(&cfg, 1.0);
        let fine = ContinuumDiscretization {
            levels: 2 * base.levels - 1,
            ..base
        };
        let a = solve_discretized_continuum(&cfg, &base, 1.0).unwrap();
        let b = solve_discretized_continuum(&cfg, &fine, 1.0).unwrap();
        assert!((a.d1 - b.d1).abs() < 1e-4);
    }

    #[test]
    fn wider_band_shrinks_fidelity_residual() {
        let cfg = TunnelingConfig::from_ratio_f1(3.0, 0.5, 0.0).unwrap();
        let det = tunneling_detector(&cfg).unwrap();
        let residual = |ratio: f64, levels: usize| {
            let disc = ContinuumDiscretization::with_bandwidth(&cfg, 1.0, levels, ratio);
            let r = solve_discretized_continuum(&cfg, &disc, 1.0).unwrap();
            (r.f1 - det.f1()).abs()
        };
        let narrow = residual(200.0, 4001);
        let wide = residual(800.0, 16001);
        assert!(wide < narrow / 3.0, "{narrow:e} -> {wide:e}");
    }

    #[test]
    fn narrow_band_rejected() {
        let cfg = TunnelingConfig::new(0.3, 0.9, 0.0).unwrap();
        let disc = ContinuumDiscretization::with_bandwidth(&cfg, 1.0, 4001, 50.0);
        assert!(matches!(
            solve_discretized_continuum(&cfg, &disc, 1.0),
            Err(Error::Discretization(_))
        ));
    }

    #[test]
    fn too_long_for_level_spacing_rejected() {
        let cfg = TunnelingConfig::new(0.3, 0.9, 0.0).unwrap();
        let disc = ContinuumDiscretization {
            levels: 101,
            bandwidth: 100.0,
            dt: 0.01,
        };
        // spacing 1, recurrence 2 pi, limit 0.63
        assert!(solve_discretized_continuum(&cfg, &disc, 1.0).is_err());
    }
}
