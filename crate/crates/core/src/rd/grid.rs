use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cell-centred polar grid: r_i = (i + ½)Δr, θ_j = jΔθ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarGrid {
    pub radius: f64,
    pub nr: usize,
    pub ntheta: usize,
}

impl PolarGrid {
    pub fn new(radius: f64, nr: usize, ntheta: usize) -> Result<Self> {
        let g = PolarGrid { radius, nr, ntheta };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Config(format!("grid radius {} must be positive", self.radius)));
        }
        if self.nr < 2 {
            return Err(Error::Config("grid needs at least 2 rings".into()));
        }
        if self.ntheta < 8 || self.ntheta % 2 != 0 {
            return Err(Error::Config(format!("ntheta = {} must be even and >= 8", self.ntheta)));
        }
        Ok(())
    }

    /// Checks Nθ ≥ 8·n for the largest angular mode of interest.
    pub fn resolves(&self, n_max: usize) -> bool {
        self.ntheta >= 8 * n_max
    }

    #[inline]
    pub fn dr(&self) -> f64 {
        self.radius / self.nr as f64
    }

    #[inline]
    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.ntheta as f64
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr()
    }

    #[inline]
    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    /// Number of cells Nr·Nθ.
    #[inline]
    pub fn len(&self) -> usize {
        self.nr * self.ntheta
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ntheta + j
    }

    /// Smallest spacing, min(r₀Δθ, Δr).
    pub fn min_spacing(&self) -> f64 {
        (self.r(0) * self.dtheta()).min(self.dr())
    }

    /// Samples `f(r, θ)` in ring-major, θ-minor order.
    pub fn sample<F: Fn(f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.nr {
            let r = self.r(i);
            for j in 0..self.ntheta {
                out.push(f(r, self.theta(j)));
            }
        }
        out
    }
}
