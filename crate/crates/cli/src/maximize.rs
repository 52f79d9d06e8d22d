// SPDX-License-Identifier: Apache-2.0

//! Grid search plus zoom refinement of a linear-detector metric over
//! `(s, r_th)`.

use rayon::prelude::*;
use serde::Serialize;

use qnd_efficiency::models::LinearDetectorConfig;
use qnd_efficiency::ModelConfig;

use crate::eval::{evaluate, is_metric, InputConfig};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct MaximizeOptions {
    pub metric: String,
    pub s_range: (f64, f64),
    pub r_th_range: (f64, f64),
    pub gamma_t: f64,
    /// Refinement stops once both grid spacings are below this.
    pub resolution: f64,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self {
            metric: "eta0".into(),
            s_range: (0.01, 3.0),
            r_th_range: (-4.0, 4.0),
            gamma_t: 0.0,
            resolution: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolution {
    pub s: f64,
    pub r_th: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximizeResult {
    pub metric: String,
    pub s: f64,
    pub r_th: f64,
    pub value: f64,
    pub resolution: Resolution,
    pub evaluations: usize,
    pub s_at_domain_edge: bool,
    pub r_th_at_domain_edge: bool,
}

const COARSE: (usize, usize) = (61, 81);
const FINE: usize = 21;
const MAX_ZOOMS: usize = 80;
const EDGE_FRACTION: f64 = 1e-6;

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<(), CliError> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(CliError::Config(format!(
            "{name} range [{lo}, {hi}] is not a finite interval"
        )));
    }
    Ok(())
}

fn axis(lo: f64, hi: f64, n: usize) -> (Vec<f64>, f64) {
    if lo == hi || n < 2 {
        return (vec![lo], 0.0);
    }
    let h = (hi - lo) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
    v[n - 1] = hi;
    (v, h)
}

pub fn maximize(opts: &MaximizeOptions) -> Result<MaximizeResult, CliError> {
    if !is_metric(&opts.metric) {
        return Err(CliError::Config(format!(
            "unknown metric `{}`",
            opts.metric
        )));
    }
    check_range("s", opts.s_range)?;
    check_range("r_th", opts.r_th_range)?;
    if opts.s_range.0 < 0.0 {
        return Err(CliError::Config("s must be nonnegative".into()));
    }
    LinearDetectorConfig::new(opts.s_range.0, opts.r_th_range.0, opts.gamma_t, 0.0)?;

    let value_at = |s: f64, r: f64| -> f64 {
        LinearDetectorConfig::new(s, r, opts.gamma_t, 0.0)
            .ok()
            .and_then(|c| evaluate(&InputConfig::Model(ModelConfig::Linear(c))).ok())
            .and_then(|e| e.metric(&opts.metric))
            .filter(|v| !v.is_nan())
            .unwrap_or(f64::NEG_INFINITY)
    };

    let (mut s_win, mut r_win) = (opts.s_range, opts.r_th_range);
    let mut n = COARSE;
    let mut evaluations = 0;
    let mut best = (f64::NEG_INFINITY, opts.s_range.0, opts.r_th_range.0);
    let mut res = Resolution { s: 0.0, r_th: 0.0 };
    for _ in 0..MAX_ZOOMS {
        let (ss, hs) = axis(s_win.0, s_win.1, n.0);
        let (rs, hr) = axis(r_win.0, r_win.1, n.1);
        let points: Vec<(f64, f64)> = ss
            .iter()
            .flat_map(|&s| rs.iter().map(move |&r| (s, r)))
            .collect();
        evaluations += points.len();
        // Ties go to the first grid point, which keeps the search deterministic.
        let round = points
            .par_iter()
            .map(|&(s, r)| (value_at(s, r), s, r))
            .collect::<Vec<_>>()
            .into_iter()
            .fold(best, |acc, p| if p.0 > acc.0 { p } else { acc });
        best = round;
        res = Resolution { s: hs, r_th: hr };
        if hs <= opts.resolution && hr <= opts.resolution {
            break;
        }
        let shrink = |(lo, hi): (f64, f64), c: f64, h: f64, dom: (f64, f64)| {
            if lo == hi {
                (lo, hi)
            } else {
                ((c - 2.0 * h).max(dom.0), (c + 2.0 * h).min(dom.1))
            }
        };
        s_win = shrink(s_win, best.1, hs, opts.s_range);
        r_win = shrink(r_win, best.2, hr, opts.r_th_range);
        n = (FINE, FINE);
    }
    if best.0 == f64::NEG_INFINITY {
        return Err(CliError::Config(format!(
            "{} is undefined everywhere on the domain",
            opts.metric
        )));
    }
    // Near-flat maxima at a bound pick up rounding noise, so "at the edge"
    // allows a sliver of the domain width.
    let edge = |x: f64, (lo, hi): (f64, f64)| {
        lo < hi && ((x - lo).min(hi - x) <= EDGE_FRACTION * (hi - lo))
    };
    Ok(MaximizeResult {
        metric: opts.metric.clone(),
        s: best.1,
        r_th: best.2,
        value: best.0,
        resolution: res,
        evaluations,
        s_at_domain_edge: edge(best.1, opts.s_range),
        r_th_at_domain_edge: edge(best.2, opts.r_th_range),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_domain() {
        let r = maximize(&MaximizeOptions {
            s_range: (1.0, 1.0),
            r_th_range: (0.0, 0.0),
            ..Default::default()
        })
        .unwrap();
        assert_eq!((r.s, r.r_th), (1.0, 0.0));
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn eta_at_symmetric_threshold_prefers_weak_measurement() {
        let r = maximize(&MaximizeOptions {
            metric: "eta".into(),
            r_th_range: (0.0, 0.0),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(r.s, 0.01);
        assert!(r.s_at_domain_edge);
        assert!(r.value < 2.0 / std::f64::consts::PI);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(maximize(&MaximizeOptions {
            metric: "nope".into(),
            ..Default::default()
        })
        .is_err());
        assert!(maximize(&MaximizeOptions {
            s_range: (2.0, 1.0),
            ..Default::default()
        })
        .is_err());
    }
}
