// SPDX-License-Identifier: Apache-2.0

//! General two-outcome measurement channels.
//!
//! Each outcome is a linear map on 2x2 operators, stored as the 4x4 matrix
//! acting on the row-major vectorization `(rho00, rho01, rho10, rho11)`. A
//! Kraus operator `M` contributes `M ⊗ conj(M)`. The Choi matrix is the
//! reshuffle `J[(i,k),(j,l)] = S[(k,l),(i,j)]`; the map is completely
//! positive iff `J` is positive semidefinite.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qnd::{Outcome, OutcomeResult, PostState, QndDetector};
use crate::state::QubitState;

/// Tolerance for the Hermiticity, positivity and completeness checks.
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Default tolerance for the QND verdict in [`extract_qnd`].
pub const EXTRACTION_TOL: f64 = 1e-8;

pub type SuperMatrix = Matrix4<Complex64>;

fn vidx(k: usize, l: usize) -> usize {
    2 * k + l
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "SuperRepr", into = "SuperRepr")]
pub struct BinarySuperoperator {
    maps: [SuperMatrix; 2],
}

/// Result of the structural checks on one map pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelCheck {
    /// Largest `|J - J^dagger|` entry over both Choi matrices.
    pub hermiticity_residual: f64,
    /// Smallest Choi eigenvalue over both maps.
    pub min_choi_eigenvalue: f64,
    /// Largest violation of trace preservation of `S0 + S1`.
    pub completeness_residual: f64,
}

impl ChannelCheck {
    pub fn is_valid(&self) -> bool {
        self.hermiticity_residual <= STRUCTURAL_TOL
            && self.min_choi_eigenvalue >= -STRUCTURAL_TOL
            && self.completeness_residual <= STRUCTURAL_TOL
    }
}

impl BinarySuperoperator {
    /// Wraps two maps without checking anything; see [`Self::check`].
    pub fn from_maps(map0: SuperMatrix, map1: SuperMatrix) -> Self {
        Self { maps: [map0, map1] }
    }

    pub fn from_kraus(kraus0: &[Matrix2<Complex64>], kraus1: &[Matrix2<Complex64>]) -> Self {
        Self::from_maps(kraus_map(kraus0), kraus_map(kraus1))
    }

    /// Both outcomes leave the state alone, each with probability 1/2.
    pub fn coin_flip() -> Self {
        let half = SuperMatrix::identity() * Complex64::new(0.5, 0.0);
        Self::from_maps(half, half)
    }

    pub fn map(&self, outcome: Outcome) -> &SuperMatrix {
        &self.maps[outcome.index() as usize]
    }

    pub fn choi(&self, outcome: Outcome) -> SuperMatrix {
        choi_matrix(self.map(outcome))
    }

    pub fn check(&self) -> ChannelCheck {
        let mut herm: f64 = 0.0;
        let mut min_eig = f64::INFINITY;
        for o in Outcome::BOTH {
            let j = self.choi(o);
            herm = herm.max(
                (j - j.adjoint())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max),
            );
            let h = (j + j.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(h).eigenvalues;
            min_eig = min_eig.min(eig.iter().cloned().fold(f64::INFINITY, f64::min));
        }
        ChannelCheck {
            hermiticity_residual: herm,
            min_choi_eigenvalue: min_eig,
            completeness_residual: check_completeness(self).1,
        }
    }

    /// Unnormalized output `S[rho]` as a row-major 2x2 matrix.
    pub fn act(&self, outcome: Outcome, state: &QubitState) -> [[Complex64; 2]; 2] {
        let v = nalgebra::Vector4::from(state.vectorized());
        let out = self.map(outcome) * v;
        [[out[0], out[1]], [out[2], out[3]]]
    }
}

fn kraus_map(kraus: &[Matrix2<Complex64>]) -> SuperMatrix {
    let mut s = SuperMatrix::zeros();
    for m in kraus {
        for k in 0..2 {
            for l in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        s[(vidx(k, l), vidx(i, j))] += m[(k, i)] * m[(l, j)].conj();
                    }
                }
            }
        }
    }
    s
}

fn choi_matrix(s: &SuperMatrix) -> SuperMatrix {
    let mut j = SuperMatrix::zeros();
    for i in 0..2 {
        for jj in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    j[(vidx(i, k), vidx(jj, l))] = s[(vidx(k, l), vidx(i, jj))];
                }
            }
        }
    }
    j
}

/// Trace preservation of `S0 + S1`: `sum_k (S0+S1)[(k,k),(i,j)] = delta_ij`
/// for every input basis element. Returns `(holds, max violation)`.
pub fn check_completeness(sup: &BinarySuperoperator) -> (bool, f64) {
    let total = sup.maps[0] + sup.maps[1];
    let mut residual: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let tr = total[(vidx(0, 0), vidx(i, j))] + total[(vidx(1, 1), vidx(i, j))];
            let target = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((tr - Complex64::new(target, 0.0)).norm());
        }
    }
    (residual <= STRUCTURAL_TOL, residual)
}

/// Applies outcome `outcome` of a validated channel to `state`.
pub fn apply(
    sup: &BinarySuperoperator,
    state: &QubitState,
    outcome: Outcome,
) -> Result<OutcomeResult> {
    let chk = sup.check();
    if !chk.is_valid() {
        return Err(Error::InvariantViolation(format!("{chk:?}")));
    }
    let m = sup.act(outcome, state);
    let p = m[0][0].re + m[1][1].re;
    if p <= 0.0 {
        return Err(Error::ImpossibleOutcome {
            outcome: outcome.index(),
        });
    }
    let post = QubitState::new(m[0][0].re / p, m[0][1] / p)?;
    Ok(OutcomeResult {
        outcome,
        probability: p,
        post_state: PostState::State(post),
    })
}

/// Superoperator pair of a non-destructive QND detector.
pub fn from_qnd(det: &QndDetector) -> Result<BinarySuperoperator> {
    if det.destroys_on_1() {
        return Err(Error::InvalidDetector(
            "a detector that destroys the qubit has no outcome-1 superoperator".into(),
        ));
    }
    let mut maps = [SuperMatrix::zeros(), SuperMatrix::zeros()];
    for o in Outcome::BOTH {
        let b = det.branch(o);
        let s = &mut maps[o.index() as usize];
        s[(vidx(0, 0), vidx(0, 0))] = Complex64::new(b.w0, 0.0);
        s[(vidx(1, 1), vidx(1, 1))] = Complex64::new(b.w1, 0.0);
        s[(vidx(0, 1), vidx(0, 1))] = b.gain;
        s[(vidx(1, 0), vidx(1, 0))] = b.gain.conj();
    }
    Ok(BinarySuperoperator { maps })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QndVerdict {
    Qnd(QndDetector),
    /// Basis states are not preserved; `residual` is the largest offending entry.
    NotQnd {
        residual: f64,
    },
}

/// Recognizes a QND channel and recovers its six parameters.
pub fn extract_qnd(sup: &BinarySuperoperator, tol: f64) -> Result<QndVerdict> {
    let chk = sup.check();
    if !chk.is_valid() {
        return Err(Error::InvariantViolation(format!("{chk:?}")));
    }
    // S_i[|0><0|] must stay on |0><0| and S_i[|1><1|] on |1><1|.
    let mut residual: f64 = 0.0;
    for s in &sup.maps {
        for (k, l) in [(0, 1), (1, 0), (1, 1)] {
            residual = residual.max(s[(vidx(k, l), vidx(0, 0))].norm());
        }
        for (k, l) in [(0, 0), (0, 1), (1, 0)] {
            residual = residual.max(s[(vidx(k, l), vidx(1, 1))].norm());
        }
    }
    if residual > tol {
        return Ok(QndVerdict::NotQnd { residual });
    }
    let s0 = &sup.maps[0];
    let s1 = &sup.maps[1];
    let f0 = unit_interval(s0[(vidx(0, 0), vidx(0, 0))].re, tol, "F0")?;
    let f1 = unit_interval(s1[(vidx(1, 1), vidx(1, 1))].re, tol, "F1")?;

    let mut d = [0.0; 2];
    let mut phi = [0.0; 2];
    for (idx, (s, bound)) in [
        (s0, (f0 * (1.0 - f1)).sqrt()),
        (s1, ((1.0 - f0) * f1).sqrt()),
    ]
    .into_iter()
    .enumerate()
    {
        let c = s[(vidx(0, 1), vidx(0, 1))];
        let g = c.norm();
        if g > bound + tol {
            return Err(Error::InvalidChannel {
                outcome: idx as u8,
                gain: g,
                bound,
            });
        }
        if g == 0.0 {
            d[idx] = f64::INFINITY;
            phi[idx] = 0.0;
        } else {
            d[idx] = (-(g / bound).ln()).max(0.0);
            phi[idx] = c.arg();
        }
    }
    QndDetector::new(f0, f1, phi[0], phi[1], d[0], d[1]).map(QndVerdict::Qnd)
}

fn unit_interval(x: f64, tol: f64, name: &str) -> Result<f64> {
    if !(-tol..=1.0 + tol).contains(&x) {
        return Err(Error::InvariantViolation(format!(
            "{name} = {x} outside [0, 1]"
        )));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Random valid two-outcome channel: `n_kraus` Gaussian Kraus operators per
/// outcome, jointly rescaled by `G^{-1/2}` with `G = sum_k K_k^dagger K_k` so
/// that completeness holds.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, n_kraus: usize) -> BinarySuperoperator {
    let n = n_kraus.max(1);
    let mut gauss = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let ops: Vec<Matrix2<Complex64>> = (0..2 * n)
        .map(|_| Matrix2::new(gauss(), gauss(), gauss(), gauss()))
        .collect();
    let g: Matrix2<Complex64> = ops.iter().map(|k| k.adjoint() * k).sum();
    let eig = SymmetricEigen::new(g);
    let inv_sqrt =
        Matrix2::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.powf(-0.5), 0.0)));
    let g_inv_sqrt = eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    let ops: Vec<_> = ops.iter().map(|k| k * g_inv_sqrt).collect();
    BinarySuperoperator::from_kraus(&ops[..n], &ops[n..])
}

#[derive(Serialize, Deserialize)]
struct SuperRepr {
    map0: Vec<[f64; 2]>,
    map1: Vec<[f64; 2]>,
}

impl From<SuperRepr> for BinarySuperoperator {
    fn from(r: SuperRepr) -> Self {
        let conv = |v: &[[f64; 2]]| {
            let mut m = SuperMatrix::zeros();
            for (idx, z) in v.iter().take(16).enumerate() {
                m[(idx / 4, idx % 4)] = Complex64::new(z[0], z[1]);
            }
            m
        };
        Self::from_maps(conv(&r.map0), conv(&r.map1))
    }
}

impl From<BinarySuperoperator> for SuperRepr {
    fn from(s: BinarySuperoperator) -> Self {
        let conv = |m: &SuperMatrix| {
            (0..16)
                .map(|idx| {
                    let z = m[(idx / 4, idx % 4)];
                    [z.re, z.im]
                })
                .collect()
        };
        SuperRepr {
            map0: conv(&s.maps[0]),
            map1: conv(&s.maps[1]),
        }
    }
}
