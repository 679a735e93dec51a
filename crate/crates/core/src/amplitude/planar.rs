use serde::{Deserialize, Serialize};

use super::systems::{EthPlanar, EthPolar};
use crate::error::{Error, Result};

/// Planar form of an ET-H system and the scalings that relate the two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarReduction {
    pub planar: EthPlanar,
    /// √|a₁₁|, multiplying ρ_H.
    pub scale_h: f64,
    /// √|a₂₁|, multiplying ρ_T.
    pub scale_t: f64,
}

/// ρ_T² = ρ_T1ρ_T2 followed by ρ̄_H = ρ_H√|a₁₁|, ρ̄_T = ρ_T√|a₂₁|.
pub fn planar_reduction(s: &EthPolar) -> Result<PlanarReduction> {
    if s.a11 == 0.0 || s.a21 == 0.0 {
        return Err(Error::Domain("planar reduction needs a11 != 0 and a21 != 0".into()));
    }
    Ok(PlanarReduction {
        planar: EthPlanar {
            alpha1: s.alpha1,
            alpha2: s.alpha2,
            a_a: s.a11.signum(),
            a_b: s.a12 / s.a21.abs(),
            a_c: s.a22 / s.a11.abs(),
            a_d: s.a21.signum(),
        },
        scale_h: s.a11.abs().sqrt(),
        scale_t: s.a21.abs().sqrt(),
    })
}

impl PlanarReduction {
    /// (ρ_H, ρ_T1, ρ_T2) ↦ ((ρ̄_H, ρ̄_T), ρ_T1/ρ_T2).
    pub fn forward(&self, x: &[f64]) -> Result<([f64; 2], f64)> {
        if x.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, got: x.len() });
        }
        if !(x[1] > 0.0 && x[2] > 0.0) {
            return Err(Error::Domain("Turing radii must be positive".into()));
        }
        Ok(([x[0] * self.scale_h, (x[1] * x[2]).sqrt() * self.scale_t], x[1] / x[2]))
    }

    /// Inverse of [`Self::forward`] for a conserved ratio ρ_T1/ρ_T2.
    pub fn back(&self, y: &[f64], ratio: f64) -> [f64; 3] {
        let t = y[1] / self.scale_t;
        let k = ratio.sqrt();
        [y[0] / self.scale_h, t * k, t / k]
    }
}
