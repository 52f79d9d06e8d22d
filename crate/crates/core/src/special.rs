// SPDX-License-Identifier: Apache-2.0

//! Error-function helpers.
//!
//! Fidelities of the threshold detector are Gaussian tail masses, and their
//! logarithms feed directly into decoherence parameters. Everything here is
//! written in terms of `erfc` so that masses close to 0 keep full relative
//! precision instead of being computed as `1 - (something close to 1)`.

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `[1 + erf(x)] / 2`, the mass of a unit-variance-1/2 Gaussian below `x`.
pub fn lower_mass(x: f64) -> f64 {
    0.5 * erfc(-x)
}

/// `ln([1 + erf(x)] / 2)`; `-inf` once the mass underflows.
pub fn ln_lower_mass(x: f64) -> f64 {
    let m = lower_mass(x);
    if m > 0.0 {
        m.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `1 - e^{-x}` for `x >= 0` without cancellation at small `x`.
pub fn one_minus_exp_neg(x: f64) -> f64 {
    -(-x).exp_m1()
}
