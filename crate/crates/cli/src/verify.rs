// SPDX-License-Identifier: Apache-2.0

//! Oracle cross-check suites behind `qeff verify`.
//!
//! Each check aggregates many evaluations: it records the worst residual,
//! the config that produced it, and how many evaluations exceeded the
//! tolerance. Non-gating checks are reported but do not fail the suite.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use qnd_efficiency::models::linear::{linear_detector, LinearDetectorConfig};
use qnd_efficiency::models::tunneling::{tunneling_detector, TunnelingConfig};
use qnd_efficiency::oracles::{
    linear_detector_quadrature, mc_linear, quad_linear, solve_discretized_continuum,
    ContinuumDiscretization,
};
use qnd_efficiency::povm::{
    check_completeness, extract_qnd, from_qnd, random_channel, BinarySuperoperator,
};
use qnd_efficiency::povm::{EXTRACTION_TOL, STRUCTURAL_TOL};
use qnd_efficiency::{
    apply_outcome, average_transform, efficiency_report, outcome_probabilities, Metric, Outcome,
    QndDetector, QndVerdict, QubitState,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    LinearQuad,
    LinearMc,
    TunnelingOde,
    PovmRoundtrip,
    Properties,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::LinearQuad,
        Suite::LinearMc,
        Suite::TunnelingOde,
        Suite::PovmRoundtrip,
        Suite::Properties,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub gating: bool,
    pub evaluations: usize,
    pub violations: usize,
    /// Config that produced the worst residual.
    pub config: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed || !c.gating);
        Self {
            suite,
            passed,
            seed,
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Monte Carlo samples per config, or detectors for the random suites.
    pub samples: Option<u64>,
    /// Absolute quadrature tolerance.
    pub quad_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            samples: None,
            quad_tol: 1e-13,
        }
    }
}

/// Worst-residual accumulator for one check.
#[derive(Debug, Clone)]
struct Acc {
    name: &'static str,
    tolerance: f64,
    gating: bool,
    worst: f64,
    config: Value,
    evaluations: usize,
    violations: usize,
}

impl Acc {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            gating: true,
            worst: 0.0,
            config: Value::Null,
            evaluations: 0,
            violations: 0,
        }
    }

    fn informational(mut self) -> Self {
        self.gating = false;
        self
    }

    fn add(&mut self, residual: f64, config: impl FnOnce() -> Value) {
        let r = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual
        };
        self.evaluations += 1;
        if r > self.tolerance {
            self.violations += 1;
        }
        if r > self.worst || (self.config.is_null() && self.evaluations == 1) {
            self.worst = r;
            self.config = config();
        }
    }

    /// Folds `other` (same check, later evaluations) into `self`.
    fn merge(&mut self, other: Acc) {
        self.evaluations += other.evaluations;
        self.violations += other.violations;
        if other.worst > self.worst {
            self.worst = other.worst;
            self.config = other.config;
        }
    }

    fn finish(self) -> Check {
        Check {
            name: self.name.into(),
            residual: self.worst,
            tolerance: self.tolerance,
            passed: self.violations == 0,
            gating: self.gating,
            evaluations: self.evaluations,
            violations: self.violations,
            config: self.config,
        }
    }
}

fn merge_all(parts: Vec<Vec<Acc>>) -> Vec<Check> {
    let mut it = parts.into_iter();
    let mut total = it.next().unwrap_or_default();
    for part in it {
        for (a, b) in total.iter_mut().zip(part) {
            a.merge(b);
        }
    }
    total.into_iter().map(Acc::finish).collect()
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    match suite {
        Suite::LinearQuad => linear_quad(opts),
        Suite::LinearMc => linear_mc(opts),
        Suite::TunnelingOde => tunneling_ode(opts),
        Suite::PovmRoundtrip => povm_roundtrip(opts),
        Suite::Properties => properties(opts),
    }
}

pub const QUAD_S: [f64; 5] = [0.1, 0.5, 1.0, 1.5, 2.0];
pub const QUAD_R_TH: [f64; 5] = [-1.5, -0.5, 0.0, 0.5, 1.5];

fn linear_quad(opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let state = QubitState::new(0.4, Complex64::new(0.3, -0.2))?;
    let grid: Vec<(f64, f64)> = QUAD_S
        .iter()
        .flat_map(|&s| QUAD_R_TH.iter().map(move |&r| (s, r)))
        .collect();
    let parts = grid
        .par_iter()
        .map(|&(s, r_th)| -> Result<Vec<Acc>, CliError> {
            let mut d0 = Acc::new("d0", 1e-8);
            let mut d1 = Acc::new("d1", 1e-8);
            let mut diag = Acc::new("conditioned_rho00", 1e-10);
            let mut prob = Acc::new("outcome_probability", 1e-10);
            let cfg = LinearDetectorConfig::ideal(s, r_th)?;
            let conf = || json!({ "s": s, "r_th": r_th });
            let analytic = linear_detector(&cfg)?;
            let quad = linear_detector_quadrature(&cfg, opts.quad_tol)?;
            d0.add((analytic.d0() - quad.d0()).abs(), conf);
            d1.add((analytic.d1() - quad.d1()).abs(), conf);
            let q = quad_linear(&cfg, &state, opts.quad_tol)?;
            for (o, p, post) in [
                (Outcome::Zero, q.p0, q.post0),
                (Outcome::One, q.p1, q.post1),
            ] {
                let a = apply_outcome(&state, &analytic, o)?;
                prob.add((a.probability - p).abs(), conf);
                let exact = a.post_state.state().map(|x| x.rho00()).unwrap_or(f64::NAN);
                diag.add(
                    (exact - post.map(|x| x.rho00()).unwrap_or(f64::NAN)).abs(),
                    conf,
                );
            }
            Ok(vec![d0, d1, diag, prob])
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SuiteReport::new(
        Suite::LinearQuad,
        opts.seed,
        merge_all(parts),
    ))
}

pub const MC_CONFIGS: [(f64, f64); 3] = [(0.5, 0.0), (1.0, -0.5), (1.5, 0.8)];
pub const MC_DEFAULT_SAMPLES: u64 = 1_000_000;
const MC_SIGMAS: f64 = 4.0;

fn linear_mc(opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let n = opts.samples.unwrap_or(MC_DEFAULT_SAMPLES);
    let state = QubitState::new(0.4, Complex64::new(0.3, -0.2))?;
    let mut f0 = Acc::new("f0_z", MC_SIGMAS);
    let mut f1 = Acc::new("f1_z", MC_SIGMAS);
    let mut p0 = Acc::new("p0_z", MC_SIGMAS);
    let mut rerun = Acc::new("same_seed_rerun", 0.0);
    for (i, &(s, r_th)) in MC_CONFIGS.iter().enumerate() {
        let cfg = LinearDetectorConfig::ideal(s, r_th)?;
        let seed = opts.seed.wrapping_add(i as u64);
        let det = linear_detector(&cfg)?;
        let est = mc_linear(&cfg, &state, n, seed)?;
        let conf = || json!({ "s": s, "r_th": r_th, "seed": seed, "samples": n });
        f0.add(est.f0.z_score(det.f0()).abs(), conf);
        f1.add(est.f1.z_score(det.f1()).abs(), conf);
        p0.add(
            est.p0.z_score(outcome_probabilities(&state, &det).0).abs(),
            conf,
        );
        let again = mc_linear(&cfg, &state, n, seed)?;
        let diff = [
            (est.f0.value, again.f0.value),
            (est.f1.value, again.f1.value),
            (est.p0.value, again.p0.value),
        ]
        .iter()
        .map(|(a, b)| {
            if a.to_bits() == b.to_bits() {
                0.0
            } else {
                (a - b).abs().max(f64::MIN_POSITIVE)
            }
        })
        .fold(0.0, f64::max);
        rerun.add(diff, conf);
    }
    let checks = [f0, f1, p0, rerun].into_iter().map(Acc::finish).collect();
    Ok(SuiteReport::new(Suite::LinearMc, opts.seed, checks))
}

pub const ODE_RATIOS: [f64; 3] = [1.5, 3.0, 100.0];
pub const ODE_G1T: [f64; 3] = [0.1, LN_2, 3.0];

/// Tunneling configs checked by the ODE suite: the ratio × `Γ1 t` grid, then
/// each ratio at `F1 = 1/2`.
pub fn ode_configs() -> Vec<TunnelingConfig> {
    let mut v: Vec<TunnelingConfig> = ODE_RATIOS
        .iter()
        .flat_map(|&ratio| {
            ODE_G1T
                .iter()
                .map(move |&g1t| TunnelingConfig::new(g1t / ratio, g1t, 0.0))
        })
        .collect::<Result<_, _>>()
        .expect("valid grid");
    v.extend(
        ODE_RATIOS
            .iter()
            .map(|&r| TunnelingConfig::from_ratio_f1(r, 0.5, 0.0).expect("valid ratio")),
    );
    v
}

fn tunneling_ode(opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let configs = ode_configs();
    let parts = configs
        .par_iter()
        .map(|cfg| -> Result<Vec<Acc>, CliError> {
            let mut d1 = Acc::new("d1", 1e-2);
            let mut norm = Acc::new("norm_drift", qnd_efficiency::oracles::continuum::NORM_LIMIT);
            // The finite band keeps a virtual population of order Γ1/W in the
            // continuum, which sits above this tolerance at W = 200 Γ1.
            let mut f0 = Acc::new("f0", 1e-3).informational();
            let mut f1 = Acc::new("f1", 1e-3).informational();
            let analytic = tunneling_detector(cfg)?;
            let disc = ContinuumDiscretization::default_for(cfg, 1.0);
            let rec = solve_discretized_continuum(cfg, &disc, 1.0)?;
            let conf = || {
                json!({
                    "g0t": cfg.g0t, "g1t": cfg.g1t, "ratio": cfg.g1t / cfg.g0t,
                    "levels": disc.levels, "bandwidth": disc.bandwidth, "dt": disc.dt,
                    "ode": { "f0": rec.f0, "f1": rec.f1, "d1": rec.d1 },
                    "analytic": { "f0": analytic.f0(), "f1": analytic.f1(), "d1": analytic.d1() },
                })
            };
            d1.add((rec.d1 - analytic.d1()).abs(), conf);
            norm.add(rec.norm_drift, conf);
            f0.add((rec.f0 - analytic.f0()).abs(), conf);
            f1.add((rec.f1 - analytic.f1()).abs(), conf);
            Ok(vec![d1, norm, f0, f1])
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SuiteReport::new(
        Suite::TunnelingOde,
        opts.seed,
        merge_all(parts),
    ))
}

pub const POVM_DEFAULT_DETECTORS: u64 = 1000;

fn wrapped(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn povm_roundtrip(opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let n = opts.samples.unwrap_or(POVM_DEFAULT_DETECTORS);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dets: Vec<QndDetector> = (0..n)
        .map(|_| {
            QndDetector::new(
                rng.random_range(0.01..0.99),
                rng.random_range(0.01..0.99),
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
                rng.random_range(0.0..5.0),
                rng.random_range(0.0..5.0),
            )
        })
        .collect::<Result<_, _>>()?;
    let parts = dets
        .par_iter()
        .map(|det| -> Result<Vec<Acc>, CliError> {
            let mut id = Acc::new("extract_identity", STRUCTURAL_TOL);
            let mut choi = Acc::new("choi_psd", STRUCTURAL_TOL);
            let mut complete = Acc::new("completeness", STRUCTURAL_TOL);
            let conf = || serde_json::to_value(det).expect("detector serializes");
            let sup = from_qnd(det)?;
            let check = sup.check();
            choi.add((-check.min_choi_eigenvalue).max(0.0), conf);
            complete.add(check.completeness_residual, conf);
            let residual = match extract_qnd(&sup, EXTRACTION_TOL)? {
                QndVerdict::Qnd(b) => [
                    (det.f0() - b.f0()).abs(),
                    (det.f1() - b.f1()).abs(),
                    wrapped(det.phi0(), b.phi0()),
                    wrapped(det.phi1(), b.phi1()),
                    (det.d0() - b.d0()).abs(),
                    (det.d1() - b.d1()).abs(),
                ]
                .into_iter()
                .fold(0.0, f64::max),
                QndVerdict::NotQnd { .. } => f64::INFINITY,
            };
            id.add(residual, conf);
            Ok(vec![id, choi, complete])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut checks = merge_all(parts);

    // A valid channel scaled by 1.01 must fail the completeness check; a
    // generic random channel must be classified as not QND.
    let mut scaled = Acc::new("scaled_channel_rejected", 0.0);
    let mut generic = Acc::new("generic_channel_not_qnd", 0.0);
    for _ in 0..20 {
        let sup = random_channel(&mut rng, 2);
        let bigger = BinarySuperoperator::from_maps(
            sup.map(Outcome::Zero) * Complex64::new(1.01, 0.0),
            sup.map(Outcome::One) * Complex64::new(1.01, 0.0),
        );
        let (ok, res) = check_completeness(&bigger);
        scaled.add(
            if ok { 1.0 } else { 0.0 },
            || json!({ "completeness_residual": res }),
        );
        let verdict = extract_qnd(&sup, EXTRACTION_TOL)?;
        generic.add(
            if matches!(verdict, QndVerdict::Qnd(_)) {
                1.0
            } else {
                0.0
            },
            || Value::Null,
        );
    }
    checks.push(scaled.finish());
    checks.push(generic.finish());
    Ok(SuiteReport::new(Suite::PovmRoundtrip, opts.seed, checks))
}

pub const PROPERTY_DEFAULT_DETECTORS: u64 = 10_000;
pub const PROPERTY_STATES: usize = 100;
const PROPERTY_TOL: f64 = 1e-12;

/// Fidelity in `[0, 1]`, exactly 0 or 1 one time in twenty each.
fn random_fidelity(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..20) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random(),
    }
}

/// `Exp(1)` decoherence, exactly 0 one time in ten.
fn random_d(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_range(0..10) == 0 {
        0.0
    } else {
        rng.sample(Exp1)
    }
}

fn random_detector(rng: &mut ChaCha8Rng) -> QndDetector {
    let (f0, f1) = (random_fidelity(rng), random_fidelity(rng));
    let phi0 = rng.random_range(-PI..PI);
    let d0 = random_d(rng);
    if rng.random_range(0..20) == 0 {
        return QndDetector::destructive(f0, f1, phi0, d0).expect("valid destructive detector");
    }
    let phi1 = rng.random_range(-PI..PI);
    QndDetector::new(f0, f1, phi0, phi1, d0, random_d(rng)).expect("valid detector")
}

fn random_state(rng: &mut ChaCha8Rng) -> QubitState {
    let r: f64 = rng.random();
    let m: f64 = rng.random();
    let ph = rng.random_range(-PI..PI);
    QubitState::new(r, Complex64::from_polar(m * (r * (1.0 - r)).sqrt(), ph))
        .expect("inside the Bloch ball")
}

/// How far `v` lies outside `[0, 1]`.
fn unit_excess(v: f64) -> f64 {
    (-v).max(v - 1.0).max(0.0)
}

fn properties(opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let n = opts.samples.unwrap_or(PROPERTY_DEFAULT_DETECTORS);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dets: Vec<QndDetector> = (0..n).map(|_| random_detector(&mut rng)).collect();
    let states: Vec<QubitState> = (0..PROPERTY_STATES)
        .map(|_| random_state(&mut rng))
        .collect();

    let parts: Vec<Vec<Acc>> = dets
        .par_iter()
        .map(|det| {
            let mut p_sum = Acc::new("p0_plus_p1", PROPERTY_TOL);
            let mut positive = Acc::new("post_state_positive", PROPERTY_TOL);
            let mut mixture = Acc::new("average_is_mixture", PROPERTY_TOL);
            let mut d_av = Acc::new("d_av_at_least_d_min", PROPERTY_TOL);
            let mut bounds: Vec<Acc> = ["eta", "eta_tilde", "eta_tilde_tilde", "eta0", "eta1"]
                .into_iter()
                .map(|m| Acc::new(bound_name(m), PROPERTY_TOL))
                .collect();
            let mut between = Acc::new("eta_tilde_between_eta0_eta1", PROPERTY_TOL);
            let mut tilde0 = Acc::new("eta0_tilde_at_least_eta0", PROPERTY_TOL);
            let mut tilde1 = Acc::new("eta1_tilde_at_least_eta1", PROPERTY_TOL);
            let dconf = || json!({ "detector": det });

            let r = efficiency_report(det);
            if let Metric::Value(v) = r.d_av {
                d_av.add((r.d_min - v).max(0.0), dconf);
            }
            for acc in bounds.iter_mut() {
                let name = acc.name.trim_end_matches("_in_unit_interval");
                if let Metric::Value(v) = r.get(name).expect("known metric") {
                    acc.add(unit_excess(v), dconf);
                }
            }
            if let (Metric::Value(e0), Metric::Value(e1), Metric::Value(et)) =
                (r.eta0, r.eta1, r.eta_tilde)
            {
                between.add((e0.min(e1) - et).max(et - e0.max(e1)).max(0.0), dconf);
            }
            for (acc, plain, tilde) in [
                (&mut tilde0, r.eta0, r.eta0_tilde),
                (&mut tilde1, r.eta1, r.eta1_tilde),
            ] {
                if let (Metric::Value(p), Metric::Value(t)) = (plain, tilde) {
                    acc.add((p - t).max(0.0), dconf);
                }
            }

            for s in &states {
                let sconf = || json!({ "detector": det, "state": s });
                let (p0, p1) = outcome_probabilities(s, det);
                p_sum.add((p0 + p1 - 1.0).abs(), sconf);
                let (mut rho00, mut rho01) = (0.0, Complex64::new(0.0, 0.0));
                for (o, p) in [(Outcome::Zero, p0), (Outcome::One, p1)] {
                    let res = match apply_outcome(s, det, o) {
                        Ok(res) => res,
                        Err(_) if p <= 0.0 => continue,
                        // A possible outcome with no valid post-state.
                        Err(_) => {
                            positive.add(f64::INFINITY, sconf);
                            continue;
                        }
                    };
                    if let Some(post) = res.post_state.state() {
                        positive.add((-post.purity_defect()).max(0.0), sconf);
                        rho00 += res.probability * post.rho00();
                        rho01 += res.probability * post.rho01();
                    }
                }
                if let Ok(avg) = average_transform(s, det) {
                    mixture.add(
                        (avg.rho00() - rho00)
                            .abs()
                            .max((avg.rho01() - rho01).norm()),
                        sconf,
                    );
                }
            }
            let mut all = vec![p_sum, positive, mixture, d_av];
            all.append(&mut bounds);
            all.extend([between, tilde0, tilde1]);
            all
        })
        .collect();
    Ok(SuiteReport::new(
        Suite::Properties,
        opts.seed,
        merge_all(parts),
    ))
}

fn bound_name(metric: &str) -> &'static str {
    match metric {
        "eta" => "eta_in_unit_interval",
        "eta_tilde" => "eta_tilde_in_unit_interval",
        "eta_tilde_tilde" => "eta_tilde_tilde_in_unit_interval",
        "eta0" => "eta0_in_unit_interval",
        "eta1" => "eta1_in_unit_interval",
        _ => unreachable!("fixed metric list"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_keeps_worst_config() {
        let mut a = Acc::new("x", 0.5);
        a.add(0.1, || json!(1));
        a.add(0.7, || json!(2));
        a.add(0.3, || json!(3));
        let mut b = Acc::new("x", 0.5);
        b.add(f64::NAN, || json!(4));
        a.merge(b);
        let c = a.finish();
        assert_eq!(c.config, json!(4));
        assert_eq!((c.evaluations, c.violations), (4, 2));
        assert!(!c.passed);
    }

    #[test]
    fn informational_checks_do_not_gate() {
        let mut bad = Acc::new("f", 0.0).informational();
        bad.add(1.0, || Value::Null);
        let r = SuiteReport::new(Suite::TunnelingOde, 0, vec![bad.finish()]);
        assert!(r.passed);
    }

    #[test]
    fn small_property_run_is_deterministic() {
        let opts = VerifyOptions {
            samples: Some(50),
            ..Default::default()
        };
        let a = properties(&opts).unwrap();
        let b = properties(&opts).unwrap();
        assert_eq!(a, b);
        assert!(a.check("p0_plus_p1").unwrap().passed);
    }

    #[test]
    fn small_povm_run_passes() {
        let r = povm_roundtrip(&VerifyOptions {
            samples: Some(50),
            ..Default::default()
        })
        .unwrap();
        assert!(r.passed, "{r:#?}");
    }

    #[test]
    fn phase_difference_wraps() {
        assert!(wrapped(PI - 1e-12, -PI + 1e-12) < 1e-11);
    }
}
