// SPDX-License-Identifier: Apache-2.0

use qnd_efficiency::models::linear::{linear_d0, linear_detector, LinearDetectorConfig};
use qnd_efficiency::models::tunneling::{tunneling_detector, TunnelingConfig};
use qnd_efficiency::oracles::{
    linear_detector_quadrature, quad_linear, solve_discretized_continuum, ContinuumDiscretization,
};
use qnd_efficiency::povm::{extract_qnd, from_qnd, QndVerdict, EXTRACTION_TOL};
use qnd_efficiency::{apply_outcome, Outcome, QubitState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn quadrature_grid_matches_closed_form() {
    let state = QubitState::new(0.4, num_complex::Complex64::new(0.3, -0.2)).unwrap();
    for s in [0.1, 0.5, 1.0, 1.5, 2.0] {
        for r in [-1.5, -0.5, 0.0, 0.5, 1.5] {
            let cfg = LinearDetectorConfig::ideal(s, r).unwrap();
            let quad = linear_detector_quadrature(&cfg, 1e-13).unwrap();
            assert!((quad.d0() - linear_d0(&cfg).unwrap()).abs() < 1e-8);

            let det = linear_detector(&cfg).unwrap();
            let q = quad_linear(&cfg, &state, 1e-13).unwrap();
            for (o, post, p) in [
                (Outcome::Zero, q.post0, q.p0),
                (Outcome::One, q.post1, q.p1),
            ] {
                let a = apply_outcome(&state, &det, o).unwrap();
                assert!((a.probability - p).abs() < 1e-10);
                let diag = a.post_state.state().unwrap().rho00();
                assert!(
                    (diag - post.unwrap().rho00()).abs() < 1e-10,
                    "{s} {r} {o:?}"
                );
            }
        }
    }
}

#[test]
fn continuum_oracle_decoherence_within_budget() {
    for ratio in [1.5, 3.0, 100.0] {
        let cfg = TunnelingConfig::from_ratio_f1(ratio, 0.5, 0.0).unwrap();
        let disc = ContinuumDiscretization::default_for(&cfg, 1.0);
        let rec = solve_discretized_continuum(&cfg, &disc, 1.0).unwrap();
        let det = tunneling_detector(&cfg).unwrap();
        assert!((rec.d1 - det.d1()).abs() < 1e-2, "ratio {ratio}");
        assert!(rec.norm_drift < 1e-8);
    }
}

#[test]
fn diagonal_kraus_channels_are_recovered_exactly() {
    use nalgebra::Matrix2;
    use num_complex::Complex64;
    use qnd_efficiency::povm::BinarySuperoperator;
    use rand::Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        // Several diagonal Kraus operators per outcome mix phases, so D > 0.
        let mut raw: Vec<(Complex64, Complex64)> = (0..6)
            .map(|_| {
                let z = |rng: &mut ChaCha8Rng| {
                    Complex64::from_polar(rng.random_range(0.1..1.0), rng.random_range(-3.0..3.0))
                };
                (z(&mut rng), z(&mut rng))
            })
            .collect();
        let n0: f64 = raw.iter().map(|k| k.0.norm_sqr()).sum::<f64>().sqrt();
        let n1: f64 = raw.iter().map(|k| k.1.norm_sqr()).sum::<f64>().sqrt();
        for k in raw.iter_mut() {
            k.0 /= n0;
            k.1 /= n1;
        }
        let ops: Vec<Matrix2<Complex64>> = raw
            .iter()
            .map(|&(x, y)| Matrix2::new(x, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), y))
            .collect();
        let sup = BinarySuperoperator::from_kraus(&ops[..3], &ops[3..]);
        let det = match extract_qnd(&sup, EXTRACTION_TOL).unwrap() {
            QndVerdict::Qnd(d) => d,
            v => panic!("{v:?}"),
        };
        assert!(det.d0() > 0.0 && det.d1() > 0.0);
        let back = from_qnd(&det).unwrap();
        for o in Outcome::BOTH {
            assert!((back.map(o) - sup.map(o)).iter().all(|z| z.norm() < 1e-12));
        }
    }
}
