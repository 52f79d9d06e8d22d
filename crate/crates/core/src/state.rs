// SPDX-License-Identifier: Apache-2.0

//! Single-qubit pure states and density matrices.
//!
//! A [`QubitState`] stores only `rho00` and `rho01`; `rho11 = 1 - rho00` and
//! `rho10 = conj(rho01)` are derived, so trace and Hermiticity hold by
//! construction. Positivity `|rho01|^2 <= rho00 * rho11` is checked on every
//! construction. Nothing is clamped: a state that fails the check is an error.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for normalization and positivity checks.
pub const STATE_TOL: f64 = 1e-12;

/// `alpha |0> + beta |1>` with `|alpha|^2 + |beta|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amp0: Complex64,
    amp1: Complex64,
}

impl PureState {
    pub fn new(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let norm = amp0.norm_sqr() + amp1.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amp0, amp1 })
    }

    /// `(|0> + |1>) / sqrt(2)`.
    pub fn equal_superposition() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { amp0: a, amp1: a }
    }

    pub fn amp0(&self) -> Complex64 {
        self.amp0
    }

    pub fn amp1(&self) -> Complex64 {
        self.amp1
    }
}

/// A valid single-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct QubitState {
    rho00: f64,
    rho01: Complex64,
}

impl QubitState {
    /// Builds a state from `rho00` and `rho01`, rejecting anything outside
    /// `[0, 1]` or violating positivity by more than [`STATE_TOL`].
    pub fn new(rho00: f64, rho01: Complex64) -> Result<Self> {
        if !rho00.is_finite() || !rho01.re.is_finite() || !rho01.im.is_finite() {
            return Err(Error::InvalidState("non-finite matrix element".into()));
        }
        if !(-STATE_TOL..=1.0 + STATE_TOL).contains(&rho00) {
            return Err(Error::InvalidState(format!(
                "rho00 = {rho00} outside [0, 1]"
            )));
        }
        let defect = rho00 * (1.0 - rho00) - rho01.norm_sqr();
        if defect < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "positivity violated: rho00*rho11 - |rho01|^2 = {defect:e}"
            )));
        }
        Ok(Self { rho00, rho01 })
    }

    pub fn from_pure(state: &PureState) -> Self {
        Self {
            rho00: state.amp0.norm_sqr(),
            rho01: state.amp0 * state.amp1.conj(),
        }
    }

    /// Normalizes and converts raw amplitudes.
    pub fn from_amplitudes(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        PureState::new(amp0, amp1).map(|p| Self::from_pure(&p))
    }

    pub fn ground() -> Self {
        Self {
            rho00: 1.0,
            rho01: Complex64::new(0.0, 0.0),
        }
    }

    pub fn excited() -> Self {
        Self {
            rho00: 0.0,
            rho01: Complex64::new(0.0, 0.0),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho00: 0.5,
            rho01: Complex64::new(0.0, 0.0),
        }
    }

    pub fn equal_superposition() -> Self {
        Self::from_pure(&PureState::equal_superposition())
    }

    pub fn rho00(&self) -> f64 {
        self.rho00
    }

    pub fn rho11(&self) -> f64 {
        1.0 - self.rho00
    }

    pub fn rho01(&self) -> Complex64 {
        self.rho01
    }

    pub fn rho10(&self) -> Complex64 {
        self.rho01.conj()
    }

    /// `rho00 * rho11 - |rho01|^2`; zero for pure states, 1/4 when maximally mixed.
    pub fn purity_defect(&self) -> f64 {
        self.rho00 * self.rho11() - self.rho01.norm_sqr()
    }

    /// Row-major 2x2 matrix.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.rho00, 0.0), self.rho01],
            [self.rho10(), Complex64::new(self.rho11(), 0.0)],
        ]
    }

    /// Row-major vectorization `(rho00, rho01, rho10, rho11)`.
    pub fn vectorized(&self) -> [Complex64; 4] {
        let m = self.matrix();
        [m[0][0], m[0][1], m[1][0], m[1][1]]
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    rho00: f64,
    rho01_re: f64,
    rho01_im: f64,
}

impl TryFrom<StateRepr> for QubitState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        QubitState::new(r.rho00, Complex64::new(r.rho01_re, r.rho01_im))
    }
}

impl From<QubitState> for StateRepr {
    fn from(s: QubitState) -> Self {
        StateRepr {
            rho00: s.rho00,
            rho01_re: s.rho01.re,
            rho01_im: s.rho01.im,
        }
    }
}
