// SPDX-License-Identifier: Apache-2.0

//! Globally adaptive 7/15-point Gauss-Kronrod quadrature of vector-valued
//! integrands on finite intervals.

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1], then Kronrod and Gauss weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Component `c` converges once its error estimate is below
/// `min(abs, rel * |value_c|)`, or below the roundoff floor
/// `100 eps * integral |f_c|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<const N: usize> {
    pub value: [f64; N],
    /// Per-component error estimate.
    pub error: [f64; N],
    pub intervals: usize,
}

impl<const N: usize> QuadResult<N> {
    pub fn max_error(&self) -> f64 {
        self.error.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy)]
struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    abs: [f64; N],
}

fn gk15<const N: usize, F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64) -> Piece<N> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    let mut abs = [0.0; N];
    let fc = f(center);
    for c in 0..N {
        kron[c] = WGK[7] * fc[c];
        gauss[c] = WG[3] * fc[c];
        abs[c] = WGK[7] * fc[c].abs();
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        for c in 0..N {
            kron[c] += WGK[j] * (f1[c] + f2[c]);
            abs[c] += WGK[j] * (f1[c].abs() + f2[c].abs());
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * (f1[c] + f2[c]);
            }
        }
    }
    let mut piece = Piece {
        a,
        b,
        value: [0.0; N],
        error: [0.0; N],
        abs: [0.0; N],
    };
    for c in 0..N {
        piece.value[c] = kron[c] * half;
        piece.error[c] = ((kron[c] - gauss[c]) * half).abs();
        piece.abs[c] = abs[c] * half.abs();
    }
    piece
}

/// Integrates `f` over `[a, b]`, bisecting the worst piece until every
/// component meets `tol` or `max_intervals` pieces are in use.
pub fn integrate<const N: usize, F: Fn(f64) -> [f64; N]>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_intervals: usize,
) -> Result<QuadResult<N>> {
    if a == b {
        return Ok(QuadResult {
            value: [0.0; N],
            error: [0.0; N],
            intervals: 0,
        });
    }
    let mut pieces = vec![gk15(&f, a, b)];
    loop {
        let mut value = [0.0; N];
        let mut error = [0.0; N];
        let mut absint = [0.0; N];
        for p in &pieces {
            for c in 0..N {
                value[c] += p.value[c];
                error[c] += p.error[c];
                absint[c] += p.abs[c];
            }
        }
        let target: [f64; N] = std::array::from_fn(|c| {
            tol.abs
                .min(tol.rel * value[c].abs())
                .max(100.0 * f64::EPSILON * absint[c])
        });
        if (0..N).all(|c| error[c] <= target[c]) {
            return Ok(QuadResult {
                value,
                error,
                intervals: pieces.len(),
            });
        }
        if pieces.len() >= max_intervals {
            let achieved = error.iter().cloned().fold(0.0, f64::max);
            return Err(Error::Accuracy {
                requested: tol.abs,
                achieved,
            });
        }
        let score = |p: &Piece<N>| {
            (0..N)
                .map(|c| {
                    if target[c] > 0.0 {
                        p.error[c] / target[c]
                    } else {
                        p.error[c] * 1e300
                    }
                })
                .fold(0.0, f64::max)
        };
        let worst = (0..pieces.len())
            .max_by(|&i, &j| score(&pieces[i]).total_cmp(&score(&pieces[j])))
            .expect("nonempty");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        pieces.push(gk15(&f, p.a, mid));
        pieces.push(gk15(&f, mid, p.b));
    }
}
