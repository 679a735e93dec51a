use std::f64::consts::PI;

use num_complex::Complex64;
use thdisk::linear_stability::ModeIndex;
use thdisk::pattern::{
    angular_spectrum, classify, example_eteh_spec, sample_pattern, HomogeneousIndex, PatternKind, PatternLabel,
    PatternSpec, Thresholds,
};
use thdisk::rd::PolarGrid;
use thdisk::Exec;

fn grid() -> PolarGrid {
    PolarGrid::new(6.0, 24, 48).unwrap()
}

fn spec(kind: PatternKind) -> PatternSpec {
    use PatternKind::*;
    let hopf = if matches!(kind, Breathing | QuasiPeriodic) { ModeIndex::new(0, 0) } else { ModeIndex::new(2, 1) };
    let turing = if matches!(kind, TehRotatingPlus | TehRotatingMinus | TehStanding) { ModeIndex::new(0, 1) } else { ModeIndex::new(1, 1) };
    PatternSpec {
        kind,
        radius: 6.0,
        hopf_mode: hopf,
        turing_mode: Some(turing),
        omega: 0.8,
        omega_bar: Some(0.4),
        rho_h: 0.3,
        rho_t: vec![0.5],
        phases: vec![Complex64::new(1.0, 0.0), Complex64::new(0.3, -0.4)],
        xi_t: vec![1.0, -0.5],
        normalize_phases: true,
        homogeneous_index: HomogeneousIndex::TuringM,
    }
}

fn times(t_end: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| t_end * k as f64 / (count - 1) as f64).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn static_frames_are_identical() {
    let f = sample_pattern(&spec(PatternKind::StaticTuring), &grid(), &times(10.0, 5), Exec::Sequential).unwrap();
    for k in 1..f.len() {
        assert_eq!(f.field(k, 0), f.field(0, 0));
        assert_eq!(f.field(k, 1), f.field(0, 1));
    }
}

#[test]
fn example_returns_after_one_period() {
    let s = example_eteh_spec(6.0);
    let f = sample_pattern(&s, &grid(), &[0.0, 2.0 * PI], Exec::Sequential).unwrap();
    assert!(max_diff(f.field(0, 0), f.field(1, 0)) < 1e-10);
    assert_eq!(s.fundamental_period(), Some(2.0 * PI));
}

#[test]
fn every_kind_is_periodic_with_its_fundamental_period() {
    for kind in PatternKind::ALL {
        let s = spec(kind);
        let Some(p) = s.fundamental_period() else {
            assert!(kind.is_static());
            continue;
        };
        let f = sample_pattern(&s, &grid(), &[0.7, 0.7 + p], Exec::Sequential).unwrap();
        for sp in 0..2 {
            assert!(max_diff(f.field(0, sp), f.field(1, sp)) < 1e-10, "{kind:?}");
        }
    }
}

#[test]
fn breathing_fluctuation_is_rank_one() {
    let s = spec(PatternKind::Breathing);
    let t = times(2.0 * PI / 0.8, 17);
    let f = sample_pattern(&s, &grid(), &t, Exec::Sequential).unwrap();
    let mean: Vec<f64> = (0..grid().len()).map(|x| (0..16).map(|k| f.field(k, 0)[x]).sum::<f64>() / 16.0).collect();
    let fluct = |k: usize| -> Vec<f64> { f.field(k, 0).iter().zip(&mean).map(|(a, b)| a - b).collect() };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let base = fluct(1);
    for k in 2..16 {
        let v = fluct(k);
        let c = dot(&base, &v) / dot(&base, &base);
        let rest: Vec<f64> = v.iter().zip(&base).map(|(x, b)| x - c * b).collect();
        assert!(dot(&rest, &rest).sqrt() < 1e-10 * dot(&base, &base).sqrt(), "{k}");
    }
}

#[test]
fn rotating_plus_phase_advances_at_omega() {
    let s = PatternSpec { turing_mode: None, rho_t: vec![], xi_t: vec![], ..spec(PatternKind::RotatingPlus) };
    let t = times(3.0, 31);
    let f = sample_pattern(&s, &grid(), &t, Exec::Sequential).unwrap();
    let d = angular_spectrum(&f, 0, &[12], 4).unwrap();
    let c = d.series(0, 2);
    for k in 1..c.len() {
        assert!((c[k].norm() - c[0].norm()).abs() < 1e-8 * c[0].norm());
        let slope = (c[k] / c[k - 1]).arg() / (t[k] - t[k - 1]);
        assert!((slope - 0.8).abs() < 1e-8, "{slope}");
    }
}

#[test]
fn rotating_directions_have_opposite_drift() {
    let mut drifts = Vec::new();
    for kind in [PatternKind::RotatingPlus, PatternKind::RotatingMinus] {
        let s = PatternSpec { turing_mode: None, rho_t: vec![], xi_t: vec![], ..spec(kind) };
        let period = 2.0 * PI / 0.8;
        let f = sample_pattern(&s, &grid(), &times(4.0 * period, 97), Exec::Sequential).unwrap();
        let d = angular_spectrum(&f, 0, &[12, 23], 4).unwrap();
        let c = classify(&d, [0.0, 4.0 * period], &Thresholds::default()).unwrap();
        assert_eq!(c.label, PatternLabel::Rotating, "{kind:?}");
        let drift = c.drift.unwrap();
        assert!((drift.abs() - 0.4).abs() < 1e-6, "{drift}");
        drifts.push(drift);
    }
    assert!(drifts[0] < 0.0 && drifts[1] > 0.0);
}

#[test]
fn labels_of_static_standing_and_breathing() {
    let period = 2.0 * PI / 0.8;
    let t = times(4.0 * period, 97);
    for (kind, want) in [
        (PatternKind::StaticTuring, PatternLabel::Static),
        (PatternKind::Standing, PatternLabel::Standing),
        (PatternKind::Breathing, PatternLabel::Breathing),
        (PatternKind::EtehStanding, PatternLabel::Standing),
    ] {
        let f = sample_pattern(&spec(kind), &grid(), &t, Exec::Sequential).unwrap();
        let d = angular_spectrum(&f, 0, &[12, 23], 4).unwrap();
        let c = classify(&d, [0.0, 4.0 * period], &Thresholds::default()).unwrap();
        assert_eq!(c.label, want, "{kind:?}");
    }
}

#[test]
fn sequential_and_parallel_sampling_agree() {
    let s = spec(PatternKind::EtehMixedMinus);
    let t = times(5.0, 9);
    let a = sample_pattern(&s, &grid(), &t, Exec::Sequential).unwrap();
    let b = sample_pattern(&s, &grid(), &t, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}
