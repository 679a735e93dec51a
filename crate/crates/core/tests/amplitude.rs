use num_complex::Complex64;
use proptest::prelude::*;
use thdisk::amplitude::{
    equilibria_eteh, equilibria_eth, equilibria_teh, from_complex, integrate, planar_reduction, stability, to_complex,
    ComplexSix, EthPolar, EtehPolar, Pairing, StabilityLabel, TehPolar, VectorField,
};

/// Field residual relative to the size of the cubic terms at `x`.
fn residual(sys: &dyn VectorField, x: &[f64]) -> f64 {
    let mut out = vec![0.0; sys.dim()];
    sys.eval(x, &mut out);
    let scale = x.iter().fold(1.0f64, |a, v| a.max(v.abs())).powi(3);
    out.iter().fold(0.0f64, |a, v| a.max(v.abs())) / scale
}

fn coeff() -> impl Strategy<Value = f64> {
    -1.0f64..1.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eteh_equilibria_are_zeros(c in prop::array::uniform8(coeff())) {
        let s = EtehPolar { eps1: c[0], eps2: c[1], c11: c[2], c12: c[3], c13: c[4], c21: c[5], c22: c[6], c23: c[7] };
        let set = equilibria_eteh(&s);
        prop_assert!(set.found.iter().any(|e| e.state.iter().all(|&v| v == 0.0)));
        for e in &set.found {
            prop_assert!(residual(&s, &e.state) < 1e-9, "{} {:?}", e.class_id, e.state);
            prop_assert!(e.state[..2].iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn eth_equilibria_are_zeros(c in prop::array::uniform6(coeff())) {
        let s = EthPolar { alpha1: c[0], alpha2: c[1], a11: c[2], a12: c[3], a21: c[4], a22: c[5] };
        for e in &equilibria_eth(&s).found {
            prop_assert!(residual(&s, &e.state) < 1e-9, "{} {:?}", e.class_id, e.state);
        }
    }

    #[test]
    fn teh_equilibria_are_zeros(c in prop::array::uniform10(coeff())) {
        let s = TehPolar {
            beta1: c[0], beta2: c[1], b1: c[2], b2: c[3], b11: c[4], b12: c[5], b13: c[6], b21: c[7], b22: c[8], b23: c[9],
        };
        for e in &equilibria_teh(&s).found {
            prop_assert!(residual(&s, &e.state) < 1e-9, "{} {:?}", e.class_id, e.state);
            prop_assert!(e.state[..2].iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn planar_reduction_preserves_trajectories(
        alpha in prop::array::uniform2(-0.3f64..0.3),
        a11 in -1.0f64..-0.2, a21 in -1.0f64..-0.2, a12 in -0.3f64..0.3, a22 in -0.3f64..0.3,
        x0 in prop::array::uniform3(0.05f64..0.5),
    ) {
        let s = EthPolar { alpha1: alpha[0], alpha2: alpha[1], a11, a12, a21, a22 };
        let red = planar_reduction(&s).unwrap();
        let (y0, ratio) = red.forward(&x0).unwrap();
        let full = integrate(&s, &x0, 5.0, 1e-3).unwrap();
        let planar = integrate(&red.planar, &y0, 5.0, 1e-3).unwrap();
        let back = red.back(planar.last(), ratio);
        for k in 0..3 {
            prop_assert!((back[k] - full.last()[k]).abs() < 1e-6, "{k}: {:?} {:?}", back, full.last());
        }
    }
}

fn six(seed: [f64; 12]) -> ComplexSix {
    let c = |a: f64, b: f64| Complex64::new(a, b);
    ComplexSix {
        omega: 1.0 + seed[0].abs(),
        mu1: 0.1 * seed[1],
        mu2: 0.1 * seed[2],
        b11: c(1.0, seed[3]),
        b21: c(-0.5, seed[4]),
        b200100: c(-1.0, seed[5]),
        b111000: c(-0.5 + 0.2 * seed[6], seed[7]),
        b100011: c(-0.3, seed[8]),
        b15: 1.0,
        b25: 0.5,
        b100110: -0.4 + 0.2 * seed[9],
        b011010: -0.4 + 0.2 * seed[10],
        b000021: -1.0 + 0.2 * seed[11],
        resonant: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn complex_system_keeps_conjugacy_and_matches_polar(
        seed in prop::array::uniform12(-1.0f64..1.0),
        r in prop::array::uniform4(0.05f64..0.4),
        ph in prop::array::uniform2(0.0f64..std::f64::consts::TAU),
    ) {
        let sys = six(seed);
        let z1 = Complex64::from_polar(r[0], ph[0]);
        let z3 = Complex64::from_polar(r[1], ph[1]);
        let z = [z1, z3.conj(), z3, z1.conj(), Complex64::new(r[2], 0.0), Complex64::new(r[3], 0.0)];
        let x0 = from_complex(&z);
        let traj = integrate(&sys, &x0, 10.0, 1e-3).unwrap();
        let end = traj.last();
        prop_assert!(ComplexSix::conjugacy_defect(end, Pairing::ChangeOfVariables) < 1e-10);

        let polar = integrate(&sys.polar(), &[r[0], r[1], r[2], r[3]], 10.0, 1e-3).unwrap();
        let zt = to_complex(end);
        let moduli = [zt[0].norm(), zt[2].norm(), zt[4].re, zt[5].re];
        for k in 0..4 {
            prop_assert!((moduli[k] - polar.last()[k]).abs() < 1e-8, "{k}");
        }
    }
}

#[test]
fn trivial_state_stability_follows_the_linear_rates() {
    let s = EtehPolar { eps1: -0.2, eps2: -0.1, c11: -1.0, ..Default::default() };
    assert_eq!(stability(&s, &[0.0; 4]).unwrap().label, StabilityLabel::Sink);
    let s = EtehPolar { eps1: 0.2, eps2: -0.1, c11: -1.0, ..Default::default() };
    assert_eq!(stability(&s, &[0.0; 4]).unwrap().label, StabilityLabel::Saddle);
    let s = EtehPolar { eps1: 0.2, eps2: 0.1, ..Default::default() };
    assert_eq!(stability(&s, &[0.0; 4]).unwrap().label, StabilityLabel::Source);
}

#[test]
fn pure_hopf_radius_is_a_sink_when_supercritical() {
    let s = EthPolar { alpha1: 0.3, alpha2: -0.2, a11: -1.0, a12: 0.1, a21: -1.0, a22: -0.5 };
    let set = equilibria_eth(&s);
    let h = set.found.iter().find(|e| e.state[0] > 0.0 && e.state[1] == 0.0 && e.state[2] == 0.0).unwrap();
    assert!((h.state[0] - 0.3f64.sqrt()).abs() < 1e-12);
    // Turing growth −0.2 − 0.5·0.3 < 0 at that radius.
    assert_eq!(stability(&s, &h.state).unwrap().label, StabilityLabel::Sink);
}
