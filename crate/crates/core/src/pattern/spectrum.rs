use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rd::{FrameSet, PolarGrid};

/// Angular Fourier coefficients c_n = (1/Nθ) Σ_j f(θ_j) e^{−inθ_j}, n = 0..=n_max.
pub fn ring_spectrum(grid: &PolarGrid, ring: &[f64], n_max: usize) -> Vec<Complex64> {
    let nt = grid.ntheta;
    (0..=n_max)
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in ring.iter().enumerate() {
                // Reduce the index first so the twiddle argument stays small.
                let k = (n * j) % nt;
                let a = -(k as f64) * grid.dtheta();
                acc += Complex64::new(a.cos(), a.sin()) * *v;
            }
            acc / nt as f64
        })
        .collect()
}

/// Angular spectra of one species on selected rings over time.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameDiagnostics {
    pub times: Vec<f64>,
    pub rings: Vec<usize>,
    pub n_max: usize,
    /// Field RMS over the whole disk per time.
    pub rms: Vec<f64>,
    /// Indexed `[time][ring][n]`, flattened.
    pub coeffs: Vec<Complex64>,
}

impl FrameDiagnostics {
    pub fn new(rings: Vec<usize>, n_max: usize) -> Self {
        FrameDiagnostics { times: Vec::new(), rings, n_max, rms: Vec::new(), coeffs: Vec::new() }
    }

    /// Appends the spectra of `field` (one species, ring-major) at time `t`.
    pub fn record(&mut self, grid: &PolarGrid, t: f64, field: &[f64]) {
        for &i in &self.rings {
            let ring = &field[i * grid.ntheta..(i + 1) * grid.ntheta];
            self.coeffs.extend(ring_spectrum(grid, ring, self.n_max));
        }
        let ss: f64 = field.iter().map(|v| v * v).sum();
        self.rms.push((ss / field.len().max(1) as f64).sqrt());
        self.times.push(t);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    #[inline]
    pub fn coeff(&self, k: usize, ring: usize, n: usize) -> Complex64 {
        self.coeffs[(k * self.rings.len() + ring) * (self.n_max + 1) + n]
    }

    /// Time series of c_n on ring slot `ring`.
    pub fn series(&self, ring: usize, n: usize) -> Vec<Complex64> {
        (0..self.len()).map(|k| self.coeff(k, ring, n)).collect()
    }

    /// Restriction to times in [t0, t1].
    pub fn window(&self, t0: f64, t1: f64) -> FrameDiagnostics {
        let mut out = FrameDiagnostics::new(self.rings.clone(), self.n_max);
        let block = self.rings.len() * (self.n_max + 1);
        for (k, &t) in self.times.iter().enumerate() {
            if t >= t0 && t <= t1 {
                out.times.push(t);
                out.rms.push(self.rms[k]);
                out.coeffs.extend_from_slice(&self.coeffs[k * block..(k + 1) * block]);
            }
        }
        out
    }

    /// CSV rows `time,ring,n,amplitude,phase` with ring given as its grid index.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "time,ring,n,amplitude,phase")?;
        for k in 0..self.len() {
            for (slot, ring) in self.rings.iter().enumerate() {
                for n in 0..=self.n_max {
                    let c = self.coeff(k, slot, n);
                    writeln!(out, "{:e},{},{},{:e},{:e}", self.times[k], ring, n, c.norm(), c.arg())?;
                }
            }
        }
        Ok(())
    }
}

/// Rings used by default: the middle ring and the outermost ring.
pub fn default_rings(grid: &PolarGrid) -> Vec<usize> {
    let mut v = vec![grid.nr / 2, grid.nr - 1];
    v.dedup();
    v
}

/// Spectra of species `species` over every frame of `frames`.
pub fn angular_spectrum(frames: &FrameSet, species: usize, rings: &[usize], n_max: usize) -> Result<FrameDiagnostics> {
    let grid = &frames.grid;
    if species >= frames.species.len() {
        return Err(Error::Config(format!("species index {species} out of range")));
    }
    if let Some(&bad) = rings.iter().find(|&&i| i >= grid.nr) {
        return Err(Error::Config(format!("ring {bad} out of range (nr = {})", grid.nr)));
    }
    if 2 * n_max >= grid.ntheta {
        return Err(Error::Config(format!("n_max = {n_max} not resolved by ntheta = {}", grid.ntheta)));
    }
    let mut d = FrameDiagnostics::new(rings.to_vec(), n_max);
    for k in 0..frames.len() {
        d.record(grid, frames.times[k], frames.field(k, species));
    }
    Ok(d)
}
