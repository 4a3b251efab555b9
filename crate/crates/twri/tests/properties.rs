use num_complex::Complex64;
use proptest::prelude::*;

use twri::app::build_ensemble;
use twri::model::{ModelParams, Packet, Shape};
use twri::ode::Tolerance;
use twri::oracle::{packets_window, transfer_matrix};
use twri::recon::evolve;

fn packets(shift: f64) -> Vec<Packet> {
    vec![
        Packet::with_support(1, Shape::Sech, 1.0, 1.0, -6.0 + shift, 5.5, 1e-2).unwrap(),
        Packet::with_support(2, Shape::Gaussian, 0.8, 1.2, 5.0 + shift, 4.5, 1e-2).unwrap(),
    ]
}

fn tight() -> Tolerance {
    Tolerance { abs: 1e-13, rel: 1e-13, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn composition_law(split in 0.05f64..0.95, re in -1.0f64..1.0, im in -0.3f64..0.3) {
        let params = ModelParams::with_epsilon(0.5).unwrap();
        let ps = packets(0.0);
        let (a, c) = packets_window(&ps).unwrap();
        let b = a + split * (c - a);
        let lam = Complex64::new(re, im);
        let whole = transfer_matrix(&ps, lam, &params, (a, c), tight()).unwrap();
        let left = transfer_matrix(&ps, lam, &params, (a, b), tight()).unwrap();
        let right = transfer_matrix(&ps, lam, &params, (b, c), tight()).unwrap();
        let err = right.compose(&left).max_diff(&whole);
        prop_assert!(err <= 1e-9 * whole.max_abs().max(1.0), "error {err:e}");
    }

    #[test]
    fn translation_conjugates_by_phases(shift in -3.0f64..3.0, re in -1.0f64..1.0) {
        let params = ModelParams::with_epsilon(0.5).unwrap();
        let lax = params.lax().unwrap();
        let lam = Complex64::new(re, 0.0);
        let (a, c) = packets_window(&packets(0.0)).unwrap();
        let t0 = transfer_matrix(&packets(0.0), lam, &params, (a, c), tight()).unwrap();
        let t1 = transfer_matrix(&packets(shift), lam, &params, (a + shift, c + shift), tight()).unwrap();
        for m in 0..3 {
            for n in 0..3 {
                let phase = (Complex64::i() * lam * (lax.a[m] - lax.a[n]) * shift / params.epsilon).exp();
                prop_assert!((t1.get(m, n) - t0.get(m, n) * phase).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn evolution_is_a_group(t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let params = ModelParams::with_epsilon(0.4).unwrap();
        let e = build_ensemble(&params, &packets(0.0)).unwrap();
        let twice = evolve(&evolve(&e, t1).unwrap(), t1 + t2).unwrap();
        let once = evolve(&e, t1 + t2).unwrap();
        prop_assert!((twice.time - once.time).abs() < 1e-14);
        for (p, q) in twice.poles.iter().zip(&once.poles) {
            prop_assert_eq!(p.lambda, q.lambda);
            prop_assert!((p.log_norming - q.log_norming).norm() <= 1e-10 * q.log_norming.norm().max(1.0));
        }
    }
}
