// SPDX-License-Identifier: Apache-2.0

//! Seeded Monte Carlo sampling of measurement records and outcomes.
//!
//! Samples are split into fixed-size chunks; chunk `i` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `i`. Chunks only produce
//! integer counts, so the totals do not depend on how many threads ran them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::models::linear::LinearDetectorConfig;
use crate::qnd::{outcome_probabilities, QndDetector};
use crate::state::QubitState;

pub const MIN_SAMPLES: u64 = 1000;
const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    /// Sample standard deviation over `sqrt(n_samples)`.
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Mean of `n` Bernoulli samples with `hits` successes. With no samples
    /// the value is NaN.
    pub fn from_counts(hits: u64, n: u64, seed: u64) -> Self {
        if n == 0 {
            return Self {
                value: f64::NAN,
                std_error: f64::NAN,
                n_samples: 0,
                seed,
            };
        }
        let p = hits as f64 / n as f64;
        let std_error = if n > 1 {
            (p * (1.0 - p) / (n - 1) as f64).sqrt()
        } else {
            f64::NAN
        };
        Self {
            value: p,
            std_error,
            n_samples: n,
            seed,
        }
    }

    /// `|value - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.value - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McLinearEstimates {
    pub p0: McEstimate,
    pub f0: McEstimate,
    pub f1: McEstimate,
    /// `rho00` conditioned on outcome 0.
    pub rho00_given_0: McEstimate,
    /// `rho00` conditioned on outcome 1.
    pub rho00_given_1: McEstimate,
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn check_n(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "need at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    Ok(())
}

/// Runs `body(rng, len)` on every chunk and sums the returned count arrays.
fn chunked<const K: usize>(
    n: u64,
    seed: u64,
    body: impl Fn(&mut ChaCha8Rng, u64) -> [u64; K] + Sync,
) -> [u64; K] {
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|i| {
            let len = CHUNK.min(n - i * CHUNK);
            body(&mut chunk_rng(seed, i), len)
        })
        .reduce(|| [0; K], |a, b| std::array::from_fn(|k| a[k] + b[k]))
}

/// Samples the basis state from `diag(rho)`, then the record
/// `r ~ N(-s or +s, 1/2)`, and thresholds at `r_th`.
pub fn mc_linear(
    cfg: &LinearDetectorConfig,
    state: &QubitState,
    n: u64,
    seed: u64,
) -> Result<McLinearEstimates> {
    check_n(n)?;
    let rho11 = state.rho11();
    let noise = Normal::new(0.0, FRAC_1_SQRT_2).expect("finite width");
    // counts: state 0, outcome 0, (state 0 & outcome 0), (state 1 & outcome 1)
    let [n_s0, n_o0, n_00, n_11] = chunked(n, seed, |rng, len| {
        let mut c = [0u64; 4];
        for _ in 0..len {
            let excited = rng.random::<f64>() < rho11;
            let mean = if excited { cfg.s } else { -cfg.s };
            let out0 = mean + noise.sample(rng) < cfg.r_th;
            c[0] += (!excited) as u64;
            c[1] += out0 as u64;
            c[2] += (!excited && out0) as u64;
            c[3] += (excited && !out0) as u64;
        }
        c
    });
    let n_s1 = n - n_s0;
    let n_o1 = n - n_o0;
    Ok(McLinearEstimates {
        p0: McEstimate::from_counts(n_o0, n, seed),
        f0: McEstimate::from_counts(n_00, n_s0, seed),
        f1: McEstimate::from_counts(n_11, n_s1, seed),
        rho00_given_0: McEstimate::from_counts(n_00, n_o0, seed),
        rho00_given_1: McEstimate::from_counts(n_s0 - n_00, n_o1, seed),
    })
}

/// Bernoulli sampling of the outcome with the analytic `P0`.
pub fn mc_detector_outcomes(
    det: &QndDetector,
    state: &QubitState,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_n(n)?;
    let (p0, _) = outcome_probabilities(state, det);
    let [hits] = chunked(n, seed, |rng, len| {
        [(0..len).filter(|_| rng.random::<f64>() < p0).count() as u64]
    });
    Ok(McEstimate::from_counts(hits, n, seed))
}
