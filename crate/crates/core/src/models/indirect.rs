// SPDX-License-Identifier: Apache-2.0

//! Qubit entangled with an ancilla that is then measured projectively.
//!
//! `|0>|A> -> c00|0>|0_A> + c10|0>|1_A>` and `|1>|A> -> c01|1>|0_A> + c11|1>|1_A>`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qnd::QndDetector;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IndirectRepr", into = "IndirectRepr")]
pub struct IndirectProjectiveConfig {
    pub c00: Complex64,
    pub c01: Complex64,
    pub c10: Complex64,
    pub c11: Complex64,
}

impl IndirectProjectiveConfig {
    pub fn new(c00: Complex64, c01: Complex64, c10: Complex64, c11: Complex64) -> Result<Self> {
        let col0 = c00.norm_sqr() + c10.norm_sqr();
        let col1 = c01.norm_sqr() + c11.norm_sqr();
        for (name, n) in [("|c00|^2 + |c10|^2", col0), ("|c01|^2 + |c11|^2", col1)] {
            if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidConfig(format!("{name} = {n}, expected 1")));
            }
        }
        Ok(Self { c00, c01, c10, c11 })
    }
}

/// `F0 = |c00|^2`, `F1 = |c11|^2`, `phi0 = arg(c00 c01*)`,
/// `phi1 = arg(c10 c11*)`, `D0 = D1 = 0`.
pub fn indirect_projective_detector(cfg: &IndirectProjectiveConfig) -> QndDetector {
    let f0 = cfg.c00.norm_sqr().min(1.0);
    let f1 = cfg.c11.norm_sqr().min(1.0);
    let phase = |z: Complex64| if z.norm() > 0.0 { z.arg() } else { 0.0 };
    QndDetector::new(
        f0,
        f1,
        phase(cfg.c00 * cfg.c01.conj()),
        phase(cfg.c10 * cfg.c11.conj()),
        0.0,
        0.0,
    )
    .expect("normalized columns give valid fidelities")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndirectRepr {
    /// `c00, c01, c10, c11` as `[re, im]`.
    c: [[f64; 2]; 4],
}

impl TryFrom<IndirectRepr> for IndirectProjectiveConfig {
    type Error = Error;

    fn try_from(r: IndirectRepr) -> Result<Self> {
        let z = |i: usize| Complex64::new(r.c[i][0], r.c[i][1]);
        Self::new(z(0), z(1), z(2), z(3))
    }
}

impl From<IndirectProjectiveConfig> for IndirectRepr {
    fn from(c: IndirectProjectiveConfig) -> Self {
        let p = |z: Complex64| [z.re, z.im];
        IndirectRepr {
            c: [p(c.c00), p(c.c01), p(c.c10), p(c.c11)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efficiency::efficiency_report;
    use std::f64::consts::FRAC_PI_4;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn projective() {
        let cfg = IndirectProjectiveConfig::new(r(1.0), r(0.0), r(0.0), r(1.0)).unwrap();
        let d = indirect_projective_detector(&cfg);
        assert_eq!((d.f0(), d.f1(), d.d0(), d.d1()), (1.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn real_amplitudes_are_fully_efficient() {
        let cfg = IndirectProjectiveConfig::new(
            r(0.9f64.sqrt()),
            r(0.2f64.sqrt()),
            r(0.1f64.sqrt()),
            r(0.8f64.sqrt()),
        )
        .unwrap();
        let rep = efficiency_report(&indirect_projective_detector(&cfg));
        for (name, m) in rep.efficiencies() {
            assert!((m.unwrap() - 1.0).abs() < 1e-12, "{name}");
        }
    }

    #[test]
    fn complex_amplitude_lowers_only_eta() {
        let (a, b) = (0.9f64.sqrt(), 0.1f64.sqrt());
        let cfg =
            IndirectProjectiveConfig::new(r(a), r(b), Complex64::from_polar(b, FRAC_PI_4), r(a))
                .unwrap();
        let det = indirect_projective_detector(&cfg);
        assert!((det.phi1() - FRAC_PI_4).abs() < 1e-15);
        let rep = efficiency_report(&det);
        // Direct evaluation: ensemble gain a*b + b*a e^{i pi/4} against the bound 2ab.
        let g = (r(a * b) + Complex64::from_polar(a * b, FRAC_PI_4)).norm();
        let expected = (2.0 * a * b).ln() / g.ln();
        assert!((rep.eta.unwrap() - expected).abs() < 1e-12);
        assert!(rep.eta.unwrap() < 1.0);
        assert!((rep.eta_tilde.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized_columns() {
        assert!(IndirectProjectiveConfig::new(r(1.0), r(0.0), r(0.1), r(1.0)).is_err());
        let bad = r#"{"c":[[1,0],[0,0],[0,0],[0.5,0]]}"#;
        assert!(serde_json::from_str::<IndirectProjectiveConfig>(bad).is_err());
    }
}
