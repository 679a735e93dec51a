use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::PolarGrid;
use crate::exec::Exec;

/// Five-point polar Laplacian of ring `i` into `out`.
///
/// The ghost below ring 0 is the antipodal cell of ring 0; the ghost beyond
/// the last ring repeats it (zero flux at r = R).
pub fn laplacian_ring(grid: &PolarGrid, u: &[f64], i: usize, out: &mut [f64]) {
    let (nr, nt) = (grid.nr, grid.ntheta);
    let (dr, dth) = (grid.dr(), grid.dtheta());
    let r = grid.r(i);
    let (rp, rm) = (r + 0.5 * dr, r - 0.5 * dr);
    let cr = 1.0 / (r * dr * dr);
    let ca = 1.0 / (r * dth * r * dth);
    let row = &u[i * nt..(i + 1) * nt];
    for j in 0..nt {
        let c = row[j];
        let outer = if i + 1 < nr { u[(i + 1) * nt + j] } else { c };
        let inner = if i > 0 { u[(i - 1) * nt + j] } else { row[(j + nt / 2) % nt] };
        let left = row[(j + nt - 1) % nt];
        let right = row[(j + 1) % nt];
        out[j] = cr * (rp * (outer - c) - rm * (c - inner)) + ca * (left - 2.0 * c + right);
    }
}

/// Δu on the whole grid.
pub fn laplacian(grid: &PolarGrid, u: &[f64], exec: Exec) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    exec.for_each_chunk(&mut out, grid.ntheta, |i, row| laplacian_ring(grid, u, i, row));
    out
}

/// Disk average with cell weights r_iΔrΔθ, summed ring by ring in a fixed order.
///
/// Deviations from the first value are averaged, so a constant field returns
/// that constant exactly.
pub fn nonlocal_average(grid: &PolarGrid, u: &[f64]) -> f64 {
    let nt = grid.ntheta;
    let base = u[0];
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..grid.nr {
        let w = grid.r(i);
        let s: f64 = u[i * nt..(i + 1) * nt].iter().map(|v| v - base).sum();
        num += w * s;
        den += w * nt as f64;
    }
    base + num / den
}

/// Net outward flux R∮∂u/∂r dθ implied by the discrete operator, computed as
/// the weighted integral Σ r_iΔrΔθ (Δu)_ij. Zero to rounding under the
/// Neumann closure.
pub fn boundary_flux(grid: &PolarGrid, u: &[f64], exec: Exec) -> f64 {
    let l = laplacian(grid, u, exec);
    let nt = grid.ntheta;
    (0..grid.nr).map(|i| grid.r(i) * l[i * nt..(i + 1) * nt].iter().sum::<f64>()).sum::<f64>() * grid.dr() * grid.dtheta()
}

/// Largest angular symbol 4sin²(nΔθ/2)/(rΔθ)² kept on a ring of radius `r`
/// when modes are capped at `cap`.
fn angular_symbol(grid: &PolarGrid, r: f64, n: usize) -> f64 {
    let s = (n as f64 * grid.dtheta() / 2.0).sin();
    4.0 * s * s / (r * grid.dtheta() * r * grid.dtheta())
}

/// Angular low-pass near the pole.
///
/// On ring i only modes whose angular symbol does not exceed the radial one,
/// 4/Δr², are kept; ring 0 keeps at least n ≤ 1. Rings where every mode
/// passes are left untouched. The filter commutes with grid rotations.
#[derive(Clone)]
pub struct PoleFilter {
    ntheta: usize,
    /// Highest retained angular mode per filtered ring (ring index, cap).
    caps: Vec<(usize, usize)>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PoleFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoleFilter").field("ntheta", &self.ntheta).field("caps", &self.caps).finish()
    }
}

impl PoleFilter {
    pub fn new(grid: &PolarGrid) -> Self {
        let nt = grid.ntheta;
        let limit = 4.0 / (grid.dr() * grid.dr()) * (1.0 + 1e-12);
        let mut caps = Vec::new();
        for i in 0..grid.nr {
            let r = grid.r(i);
            let mut cap = 0;
            while cap < nt / 2 && angular_symbol(grid, r, cap + 1) <= limit {
                cap += 1;
            }
            let cap = cap.max(1);
            if cap < nt / 2 {
                caps.push((i, cap));
            }
        }
        let mut planner = FftPlanner::new();
        PoleFilter { ntheta: nt, caps, forward: planner.plan_fft_forward(nt), inverse: planner.plan_fft_inverse(nt) }
    }

    /// Rings that are filtered, with their mode caps.
    pub fn caps(&self) -> &[(usize, usize)] {
        &self.caps
    }

    /// Largest eigenvalue bound of −Δ after filtering: 4/Δr² plus the largest kept angular symbol.
    pub fn spectral_bound(&self, grid: &PolarGrid) -> f64 {
        let radial = 4.0 / (grid.dr() * grid.dr());
        let angular = (0..grid.nr)
            .map(|i| {
                let cap = self.caps.iter().find(|c| c.0 == i).map_or(grid.ntheta / 2, |c| c.1);
                angular_symbol(grid, grid.r(i), cap)
            })
            .fold(0.0, f64::max);
        radial + angular
    }

    fn filter_ring(&self, row: &mut [f64], cap: usize) {
        let nt = self.ntheta;
        let mut buf: Vec<Complex64> = row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        for (k, z) in buf.iter_mut().enumerate() {
            let n = k.min(nt - k);
            if n > cap {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / nt as f64;
        for (v, z) in row.iter_mut().zip(&buf) {
            *v = z.re * scale;
        }
    }

    /// Filters one species field in place.
    pub fn apply(&self, u: &mut [f64], exec: Exec) {
        let nt = self.ntheta;
        let rings = self.caps.last().map_or(0, |c| c.0 + 1);
        if rings == 0 {
            return;
        }
        exec.for_each_chunk(&mut u[..rings * nt], nt, |i, row| {
            if let Some(&(_, cap)) = self.caps.iter().find(|c| c.0 == i) {
                self.filter_ring(row, cap);
            }
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk_spectrum::{make_mode, ModeKind};

    #[test]
    fn constant_and_harmonic() {
        let g = PolarGrid::new(6.0, 48, 96).unwrap();
        let c = vec![0.7; g.len()];
        assert!(laplacian(&g, &c, Exec::Sequential).iter().all(|v| v.abs() < 1e-12));
        let x = g.sample(|r, t| r * t.cos());
        let l = laplacian(&g, &x, Exec::Sequential);
        // Radial part is exact for x = r cos θ; the angular part leaves cos θ·Δθ²/(12r).
        // The outer ring is skipped: its zero-flux closure disagrees with ∂x/∂r = cos θ.
        let dth = g.dtheta();
        for i in 0..g.nr - 1 {
            let bound = dth * dth / (12.0 * g.r(i)) * 1.01 + 1e-12;
            for j in 0..g.ntheta {
                assert!(l[g.index(i, j)].abs() <= bound, "{i} {j} {}", l[g.index(i, j)]);
            }
        }
    }

    /// Relative residual of Δφ̂ = −λφ̂ in the area-weighted norm.
    fn eigen_error(nr: usize, nt: usize) -> f64 {
        let g = PolarGrid::new(6.0, nr, nt).unwrap();
        let mode = make_mode(1, 1, 6.0, ModeKind::Cosine).unwrap();
        let u = g.sample(|r, t| mode.eval_real(r, t).unwrap());
        let l = laplacian(&g, &u, Exec::Sequential);
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..u.len() {
            let w = g.r(k / nt);
            num += w * (l[k] + mode.lambda * u[k]).powi(2);
            den += w * (mode.lambda * u[k]).powi(2);
        }
        (num / den).sqrt()
    }

    #[test]
    fn eigenfunction_residual_converges() {
        let e1 = eigen_error(48, 96);
        let e2 = eigen_error(96, 192);
        assert!(e1 <= 0.02, "{e1}");
        let ratio = e1 / e2;
        assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
    }

    #[test]
    fn averages() {
        let g = PolarGrid::new(6.0, 48, 96).unwrap();
        for c in [0.1, 0.2727, 1.0 / 3.0, -7.25e3] {
            assert_eq!(nonlocal_average(&g, &vec![c; g.len()]), c);
        }
        assert!(nonlocal_average(&g, &g.sample(|_, t| t.cos())).abs() < 1e-14);
        // Midpoint error of the cell-measure quadrature: O(Δr²).
        let mode = make_mode(0, 1, 6.0, ModeKind::Cosine).unwrap();
        let avg = |nr: usize| {
            let g = PolarGrid::new(6.0, nr, 2 * nr).unwrap();
            nonlocal_average(&g, &g.sample(|r, t| mode.eval_real(r, t).unwrap()))
        };
        let (a1, a2) = (avg(48), avg(96));
        assert!(a1.abs() < 2e-5, "{a1}");
        assert!((a1 / a2 - 4.0).abs() < 0.2, "{}", a1 / a2);
    }

    #[test]
    fn filter_caps_and_projection() {
        let g = PolarGrid::new(6.0, 48, 96).unwrap();
        let f = PoleFilter::new(&g);
        assert_eq!(f.caps()[0], (0, 1));
        assert!((0.4 * 4.0 / f.spectral_bound(&g) - 0.003125).abs() < 1e-6);
        let mut u = g.sample(|r, t| r * t.cos() + (5.0 * t).sin());
        f.apply(&mut u, Exec::Sequential);
        let once = u.clone();
        f.apply(&mut u, Exec::Parallel);
        assert!(u.iter().zip(&once).all(|(a, b)| (a - b).abs() < 1e-14));
        // Ring 0 keeps only n ≤ 1.
        for j in 0..g.ntheta {
            assert!((u[j] - g.r(0) * g.theta(j).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = PolarGrid::new(6.0, 16, 32).unwrap();
        let u = g.sample(|r, t| (r * 0.3).sin() * (3.0 * t).cos() + r * r);
        assert_eq!(laplacian(&g, &u, Exec::Sequential), laplacian(&g, &u, Exec::Parallel));
    }

    #[test]
    fn closure_has_zero_flux() {
        let g = PolarGrid::new(6.0, 16, 32).unwrap();
        let u = g.sample(|r, t| (r * 0.7).cos() + r * t.sin() + (0.2 * r * r) * (2.0 * t).cos());
        let scale: f64 = u.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(boundary_flux(&g, &u, Exec::Sequential).abs() < 1e-12 * scale * g.len() as f64);
    }
}
