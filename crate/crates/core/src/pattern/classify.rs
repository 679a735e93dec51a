use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectrum::FrameDiagnostics;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternLabel {
    Homogeneous,
    Static,
    Rotating,
    Standing,
    Breathing,
    Mixed,
}

impl PatternLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PatternLabel::Homogeneous => "homogeneous",
            PatternLabel::Static => "static",
            PatternLabel::Rotating => "rotating",
            PatternLabel::Standing => "standing",
            PatternLabel::Breathing => "breathing",
            PatternLabel::Mixed => "mixed",
        }
    }
}

/// Decision thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// ε_a as a fraction of the field RMS.
    pub eps_rel: f64,
    /// Largest relative amplitude variation of a rotating mode.
    pub rotating_amplitude: f64,
    /// Smallest unwrapped phase drift of a rotating mode, in radians.
    pub rotating_drift: f64,
    /// Largest phase deviation (mod π) of a standing mode, in radians.
    pub standing_phase: f64,
    /// Smallest relative amplitude oscillation of a standing mode.
    pub standing_amplitude: f64,
    /// Samples below this fraction of the peak modulus are ignored in phase tests.
    pub active_fraction: f64,
    /// Largest phase deviation of the breathing profile, in radians.
    pub breathing_phase: f64,
    /// Largest change of the normalised angular envelope |c_n|/max|c_n| of a breathing pattern.
    pub breathing_shape: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            eps_rel: 1e-3,
            rotating_amplitude: 0.1,
            rotating_drift: 2.0 * PI,
            standing_phase: 0.1,
            standing_amplitude: 0.5,
            active_fraction: 0.2,
            breathing_phase: 0.1,
            breathing_shape: 0.1,
        }
    }
}

/// Measurements of one ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingEvidence {
    pub ring: usize,
    pub label: PatternLabel,
    /// Largest |c_n|, n ≥ 1.
    pub max_nonzero: f64,
    /// Largest |c_n(t) − mean c_n| over all n.
    pub max_fluctuation: f64,
    /// Mode with the largest time fluctuation, n ≥ 1.
    pub dominant_n: usize,
    pub amplitude_variation: f64,
    pub phase_drift: f64,
    pub phase_monotone: bool,
    pub axis_deviation: f64,
    pub amplitude_oscillation: f64,
    pub mean_fluctuation: f64,
    /// Mode with the largest mean modulus, n ≥ 1.
    pub profile_n: usize,
    pub profile_phase_deviation: f64,
    /// Largest change of the normalised envelope |c_n|/max|c_n|, n ≥ 1.
    pub profile_shape_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub window: [f64; 2],
    pub samples: usize,
    pub eps_a: f64,
    pub thresholds: Thresholds,
    /// Ring whose verdict is reported.
    pub ring: usize,
    pub rings: Vec<RingEvidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: PatternLabel,
    /// Angular velocity of the dominant mode, −(d arg c_n/dt)/n, for rotating patterns.
    pub drift: Option<f64>,
    pub evidence: Evidence,
}

fn variation(a: &[f64]) -> f64 {
    let (lo, hi) = a.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    if mean > 0.0 { (hi - lo) / mean } else { f64::INFINITY }
}

fn unwrap(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut acc = 0.0;
    for (k, &p) in phases.iter().enumerate() {
        if k > 0 {
            acc += (p - phases[k - 1] + PI).rem_euclid(2.0 * PI) - PI;
        }
        out.push(phases[0] + acc);
    }
    out
}

fn slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let (mt, my) = (t.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (a, b) in t.iter().zip(y) {
        num += (a - mt) * (b - my);
        den += (a - mt) * (a - mt);
    }
    if den > 0.0 { num / den } else { 0.0 }
}

fn wrap_pi(x: f64, period: f64) -> f64 {
    let h = period / 2.0;
    (x + h).rem_euclid(period) - h
}

/// Largest distance from a common axis of the active samples, with phase taken mod `period`.
fn axis_deviation(c: &[Complex64], active: f64, period: f64) -> f64 {
    let peak = c.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if peak == 0.0 {
        return 0.0;
    }
    let k = 2.0 * PI / period;
    let sum: Complex64 = c.iter().filter(|z| z.norm() >= active * peak).map(|z| Complex64::from_polar(1.0, k * z.arg())).sum();
    let axis = sum.arg() / k;
    c.iter().filter(|z| z.norm() >= active * peak).map(|z| wrap_pi(z.arg() - axis, period).abs()).fold(0.0, f64::max)
}

/// Largest deviation of |c_n(t)|/max_n |c_n(t)| from its mean over the active samples.
fn shape_deviation(modes: &[Vec<Complex64>], active: f64) -> f64 {
    let len = modes.first().map_or(0, Vec::len);
    let tops: Vec<f64> = (0..len).map(|k| modes.iter().fold(0.0f64, |a, s| a.max(s[k].norm()))).collect();
    let peak = tops.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let keep: Vec<usize> = (0..len).filter(|&k| tops[k] >= active * peak).collect();
    let mut worst: f64 = 0.0;
    for s in modes {
        let shape: Vec<f64> = keep.iter().map(|&k| s[k].norm() / tops[k]).collect();
        let mean = shape.iter().sum::<f64>() / shape.len() as f64;
        worst = shape.iter().fold(worst, |a, v| a.max((v - mean).abs()));
    }
    worst
}

fn ring_verdict(d: &FrameDiagnostics, slot: usize, eps: f64, th: &Thresholds) -> (RingEvidence, Option<f64>) {
    let nm = d.n_max;
    let series: Vec<Vec<Complex64>> = (0..=nm).map(|n| d.series(slot, n)).collect();
    let kk = d.len() as f64;
    let means: Vec<Complex64> = series.iter().map(|s| s.iter().sum::<Complex64>() / kk).collect();
    let fluct: Vec<f64> = series.iter().zip(&means).map(|(s, m)| s.iter().map(|z| (z - m).norm()).fold(0.0, f64::max)).collect();
    let mean_mod: Vec<f64> = series.iter().map(|s| s.iter().map(|z| z.norm()).sum::<f64>() / kk).collect();
    let max_nonzero = series[1..].iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let max_fluctuation = fluct.iter().copied().fold(0.0, f64::max);
    let argmax = |v: &[f64]| (1..=nm).fold(1, |b, n| if v[n] > v[b] { n } else { b });
    let dominant_n = argmax(&fluct);
    let profile_n = argmax(&mean_mod);

    let c = &series[dominant_n];
    let amps: Vec<f64> = c.iter().map(|z| z.norm()).collect();
    let amplitude_variation = variation(&amps);
    let ph = unwrap(&c.iter().map(|z| z.arg()).collect::<Vec<_>>());
    let steps: Vec<f64> = ph.windows(2).map(|w| w[1] - w[0]).collect();
    let phase_monotone = steps.iter().all(|s| *s > 0.0) || steps.iter().all(|s| *s < 0.0);
    let phase_drift = ph.last().unwrap_or(&0.0) - ph.first().unwrap_or(&0.0);
    let axis_dev = axis_deviation(c, th.active_fraction, PI);
    let peak = amps.iter().copied().fold(0.0, f64::max);
    let low = amps.iter().copied().fold(f64::INFINITY, f64::min);
    let amplitude_oscillation = if peak > 0.0 { (peak - low) / peak } else { 0.0 };

    let p = &series[profile_n];
    let profile_phase_deviation = axis_deviation(p, th.active_fraction, 2.0 * PI);
    let profile_shape_deviation = shape_deviation(&series[1..], th.active_fraction);

    let homogeneous = max_nonzero <= eps;
    let nonzero_static = fluct[1..].iter().all(|f| *f <= eps);
    let label = if homogeneous {
        PatternLabel::Homogeneous
    } else if max_fluctuation <= eps {
        PatternLabel::Static
    } else if !nonzero_static
        && amplitude_variation <= th.rotating_amplitude
        && phase_monotone
        && phase_drift.abs() >= th.rotating_drift
    {
        PatternLabel::Rotating
    } else if fluct[0] > eps
        && profile_phase_deviation <= th.breathing_phase
        && profile_shape_deviation <= th.breathing_shape
    {
        PatternLabel::Breathing
    } else if !nonzero_static && axis_dev <= th.standing_phase && amplitude_oscillation >= th.standing_amplitude {
        PatternLabel::Standing
    } else {
        PatternLabel::Mixed
    };
    let drift = (label == PatternLabel::Rotating).then(|| -slope(&d.times, &ph) / dominant_n as f64);
    let ev = RingEvidence {
        ring: d.rings[slot],
        label,
        max_nonzero,
        max_fluctuation,
        dominant_n,
        amplitude_variation,
        phase_drift,
        phase_monotone,
        axis_deviation: axis_dev,
        amplitude_oscillation,
        mean_fluctuation: fluct[0],
        profile_n,
        profile_phase_deviation,
        profile_shape_deviation,
    };
    (ev, drift)
}

/// Labels the frames of `diag` with times in `window` from their angular spectra.
pub fn classify(diag: &FrameDiagnostics, window: [f64; 2], th: &Thresholds) -> Result<Classification> {
    let d = diag.window(window[0], window[1]);
    if d.len() < 3 {
        return Err(Error::Config(format!("window [{}, {}] holds {} frames; need at least 3", window[0], window[1], d.len())));
    }
    if d.rings.is_empty() || d.n_max == 0 {
        return Err(Error::Config("diagnostics need at least one ring and n_max >= 1".into()));
    }
    let rms = d.rms.iter().sum::<f64>() / d.len() as f64;
    let eps_a = th.eps_rel * rms;
    // Ring with the largest time fluctuation; for time-independent spectra,
    // the largest nonzero-mode energy.
    let k_len = d.len() as f64;
    let score = |slot: usize| -> (f64, f64) {
        let mut fl = 0.0;
        let mut en = 0.0;
        for n in 0..=d.n_max {
            let s = d.series(slot, n);
            let mean = s.iter().sum::<Complex64>() / k_len;
            fl += s.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>();
            if n > 0 {
                en += s.iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        (fl, en)
    };
    let scores: Vec<(f64, f64)> = (0..d.rings.len()).map(score).collect();
    let fluctuating = scores.iter().any(|s| s.0.sqrt() > eps_a * k_len.sqrt());
    let key = |s: &(f64, f64)| if fluctuating { s.0 } else { s.1 };
    let best = (0..d.rings.len()).fold(0, |b, s| if key(&scores[s]) > key(&scores[b]) { s } else { b });
    let mut rings = Vec::with_capacity(d.rings.len());
    let mut drift = None;
    for slot in 0..d.rings.len() {
        let (ev, dr) = ring_verdict(&d, slot, eps_a, th);
        if slot == best {
            drift = dr;
        }
        rings.push(ev);
    }
    let label = rings[best].label;
    Ok(Classification {
        label,
        drift,
        evidence: Evidence { window, samples: d.len(), eps_a, thresholds: *th, ring: d.rings[best], rings },
    })
}
