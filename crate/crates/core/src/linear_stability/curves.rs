use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linearization::{DelayedLinearization, LinearFamily, ModeIndex};
use super::roots::newton_root;
use crate::error::{Error, Result};

/// Spread below which a Turing locus counts as independent of p2.
pub const VERTICAL_TOL: f64 = 1e-10;
/// Accepted |det| at a reported bifurcation point.
pub const POINT_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BifurcationKind {
    Turing,
    Hopf,
}

impl BifurcationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BifurcationKind::Turing => "turing",
            BifurcationKind::Hopf => "hopf",
        }
    }
}

/// A parameter pair where `mode` has a zero (Turing) or purely imaginary (Hopf) root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    pub p1: f64,
    pub p2: f64,
    pub kind: BifurcationKind,
    pub mode: ModeIndex,
    /// 0 for Turing points.
    pub omega: f64,
    /// Index of the branch among the crossings of one mode, ordered by p1.
    pub branch: usize,
}

/// Uniform samples `lo, …, hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl Sampling {
    pub fn new(lo: f64, hi: f64, samples: usize) -> Self {
        Sampling { lo, hi, samples }
    }

    pub fn is_empty(&self) -> bool {
        self.samples == 0 || !(self.lo <= self.hi)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.is_empty() {
            return Vec::new();
        }
        if self.samples == 1 {
            return vec![self.lo];
        }
        let h = (self.hi - self.lo) / (self.samples - 1) as f64;
        (0..self.samples)
            .map(|i| if i + 1 == self.samples { self.hi } else { self.lo + i as f64 * h })
            .collect()
    }
}

/// Turing locus of one mode with its p2-dependence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuringTrace {
    pub points: Vec<BifurcationPoint>,
    /// Largest p1 range of a single branch across p2.
    pub p1_spread: f64,
    /// Spread ≤ [`VERTICAL_TOL`] with the same branch count at every p2.
    pub vertical: bool,
}

fn static_det(lin: &DelayedLinearization, mode: ModeIndex, lambda: f64) -> f64 {
    lin.char_det(mode, lambda, Complex64::new(0.0, 0.0)).re
}

/// Zeros of det(char_matrix(γ = 0)) along p1 for each sampled p2.
///
/// Sign changes on the p1 grid are refined by bisection. The locus is
/// p2-independent whenever p2 enters only through the delay, because
/// e^{−γτ} = 1 at γ = 0; `vertical` reports whether that is observed.
pub fn turing_curve<F: LinearFamily + ?Sized>(
    family: &F,
    mode: ModeIndex,
    p1: Sampling,
    p2: Sampling,
) -> Result<TuringTrace> {
    let mut points = Vec::new();
    let p1_values = p1.values();
    let p2_values = p2.values();
    if p1_values.len() < 2 || p2_values.is_empty() {
        return Ok(TuringTrace {
            points,
            p1_spread: 0.0,
            vertical: false,
        });
    }
    let lambda = mode.lambda(family.radius())?;
    let mut counts = Vec::with_capacity(p2_values.len());
    for &q in &p2_values {
        let f = |x: f64| -> Result<f64> { Ok(static_det(&family.linearization(x, q)?, mode, lambda)) };
        let mut branch = 0;
        let mut prev_x = p1_values[0];
        let mut prev_f = f(prev_x)?;
        for &x in &p1_values[1..] {
            let fx = f(x)?;
            let root = if prev_f == 0.0 {
                Some(prev_x)
            } else if prev_f.signum() != fx.signum() && fx != 0.0 {
                Some(bisect(&f, prev_x, x, prev_f)?)
            } else {
                None
            };
            if let Some(r) = root {
                let lin = family.linearization(r, q)?;
                if lin.char_det(mode, lambda, Complex64::new(0.0, 0.0)).norm() <= POINT_RESIDUAL {
                    points.push(BifurcationPoint {
                        p1: r,
                        p2: q,
                        kind: BifurcationKind::Turing,
                        mode,
                        omega: 0.0,
                        branch,
                    });
                    branch += 1;
                }
            }
            prev_x = x;
            prev_f = fx;
        }
        counts.push(branch);
    }
    let branches = counts.iter().copied().max().unwrap_or(0);
    let mut spread: f64 = 0.0;
    for b in 0..branches {
        let xs: Vec<f64> = points.iter().filter(|p| p.branch == b).map(|p| p.p1).collect();
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        spread = spread.max(hi - lo);
    }
    let uniform = counts.iter().all(|&c| c == branches);
    Ok(TuringTrace {
        vertical: branches > 0 && uniform && spread <= VERTICAL_TOL,
        p1_spread: spread,
        points,
    })
}

fn bisect<G: Fn(f64) -> Result<f64>>(f: &G, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Grid used to seed the (ω, τ) Newton solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfScan {
    pub omega_max: f64,
    pub omega_samples: usize,
    pub tau_samples: usize,
}

impl Default for HopfScan {
    fn default() -> Self {
        HopfScan {
            omega_max: 2.0,
            omega_samples: 120,
            tau_samples: 120,
        }
    }
}

/// Purely imaginary root iω at delay τ for a fixed linearisation, by 2-D Newton
/// on (Re det, Im det) from a seed.
fn hopf_newton(
    base: &DelayedLinearization,
    mode: ModeIndex,
    lambda: f64,
    mut omega: f64,
    mut tau: f64,
) -> Option<(f64, f64)> {
    let eval = |w: f64, t: f64| {
        let lin = DelayedLinearization { tau: t, ..base.clone() };
        lin.char_det(mode, lambda, Complex64::new(0.0, w))
    };
    for _ in 0..60 {
        let v = eval(omega, tau);
        let hw = 1e-7 * (1.0 + omega.abs());
        let ht = 1e-7 * (1.0 + tau.abs());
        let dw = (eval(omega + hw, tau) - eval(omega - hw, tau)) / (2.0 * hw);
        let dt = (eval(omega, tau + ht) - eval(omega, tau - ht)) / (2.0 * ht);
        let det = dw.re * dt.im - dt.re * dw.im;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let mut sw = (v.re * dt.im - dt.re * v.im) / det;
        let mut st = (dw.re * v.im - v.re * dw.im) / det;
        let len = sw.hypot(st);
        if len > 0.5 {
            sw *= 0.5 / len;
            st *= 0.5 / len;
        }
        omega -= sw;
        tau -= st;
        if !(omega.is_finite() && tau.is_finite()) {
            return None;
        }
        if sw.abs() <= 1e-14 * (1.0 + omega.abs()) && st.abs() <= 1e-14 * (1.0 + tau.abs()) {
            break;
        }
    }
    (eval(omega, tau).norm() <= POINT_RESIDUAL).then_some((omega, tau))
}

/// Smallest delay with a purely imaginary root for a fixed p1, or `None`.
pub fn hopf_point<F: LinearFamily + ?Sized>(
    family: &F,
    mode: ModeIndex,
    p1: f64,
    p2_max: f64,
    scan: &HopfScan,
) -> Result<Option<BifurcationPoint>> {
    if !(p2_max > 0.0) || scan.omega_samples < 2 || scan.tau_samples < 2 || !(scan.omega_max > 0.0) {
        return Ok(None);
    }
    let lambda = mode.lambda(family.radius())?;
    let base = family.linearization(p1, 0.0)?;
    let (nw, nt) = (scan.omega_samples, scan.tau_samples);
    let w_at = |i: usize| scan.omega_max * (i + 1) as f64 / nw as f64;
    let t_at = |j: usize| p2_max * (j + 1) as f64 / nt as f64;
    let mut grid = vec![0.0; nw * nt];
    for i in 0..nw {
        for j in 0..nt {
            let lin = DelayedLinearization { tau: t_at(j), ..base.clone() };
            grid[i * nt + j] = lin.char_det(mode, lambda, Complex64::new(0.0, w_at(i))).norm();
        }
    }
    let mut best: Option<(f64, f64)> = None;
    for i in 0..nw {
        for j in 0..nt {
            let v = grid[i * nt + j];
            let mut is_min = true;
            for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                if a >= 0 && b >= 0 && (a as usize) < nw && (b as usize) < nt && grid[a as usize * nt + b as usize] < v {
                    is_min = false;
                }
            }
            if !is_min {
                continue;
            }
            if let Some((w, t)) = hopf_newton(&base, mode, lambda, w_at(i), t_at(j)) {
                if w > 1e-9 && t > 0.0 && t <= p2_max && best.map_or(true, |(_, bt)| t < bt - 1e-12) {
                    best = Some((w, t));
                }
            }
        }
    }
    Ok(best.map(|(omega, tau)| BifurcationPoint {
        p1,
        p2: tau,
        kind: BifurcationKind::Hopf,
        mode,
        omega,
        branch: 0,
    }))
}

/// Smallest-τ Hopf branch of `mode` for each sampled p1; p1 values without a
/// crossing in (0, p2_max] are skipped.
pub fn hopf_curve<F: LinearFamily + ?Sized>(
    family: &F,
    mode: ModeIndex,
    p1: Sampling,
    p2_max: f64,
    scan: &HopfScan,
) -> Result<Vec<BifurcationPoint>> {
    let mut out = Vec::new();
    for x in p1.values() {
        if let Some(p) = hopf_point(family, mode, x, p2_max, scan)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Real parts of the root continued from iω at τ − δ and τ + δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub re_before: f64,
    pub re_after: f64,
}

impl Crossing {
    pub fn is_transversal(&self) -> bool {
        self.re_before.signum() != self.re_after.signum() && self.re_before != 0.0 && self.re_after != 0.0
    }
}

/// Follows the root at iω across τ ± δ by Newton.
pub fn crossing(lin: &DelayedLinearization, mode: ModeIndex, lambda: f64, omega: f64, delta: f64) -> Result<Crossing> {
    let seed = Complex64::new(0.0, omega);
    let before = newton_root(&lin.with_tau((lin.tau - delta).max(0.0)), mode, lambda, seed);
    let after = newton_root(&lin.with_tau(lin.tau + delta), mode, lambda, seed);
    match (before, after) {
        (Some((a, _)), Some((b, _))) => Ok(Crossing {
            re_before: a.re,
            re_after: b.re,
        }),
        _ => Err(Error::Numerical(format!("root near i*{omega} lost under tau +- {delta}"))),
    }
}
