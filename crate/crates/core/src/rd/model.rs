use serde::{Deserialize, Serialize};

use super::grid::PolarGrid;
use super::ops::PoleFilter;
use crate::error::{Error, Result};
use crate::mussel::{Kinetics, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// ∂m/∂t = d₁Δm + m(b·a(t−τ) − 1/(1 ∓ m(t−τ))), κ∂a/∂t = Δa + α(1 − a) − ma.
    MusselAlgae,
    /// As [`ModelKind::MusselAlgae`] with α(1 − â), â the disk average of a.
    MusselAlgaeNonlocal,
    /// ∂u/∂t = d₁Δu + a0·u + a1·u(t−τ).
    LinearTest,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::MusselAlgae => "mussel_algae",
            ModelKind::MusselAlgaeNonlocal => "mussel_algae_nonlocal",
            ModelKind::LinearTest => "linear_test",
        }
    }

    pub fn species(self) -> Vec<String> {
        match self {
            ModelKind::LinearTest => vec!["u".into()],
            _ => vec!["m".into(), "a".into()],
        }
    }

    pub fn is_mussel(self) -> bool {
        self != ModelKind::LinearTest
    }
}

fn one() -> f64 {
    1.0
}

/// Model coefficients; unused entries are ignored by the chosen model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(default)]
    pub b: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default)]
    pub alpha: f64,
    pub d1: f64,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub a0: f64,
    #[serde(default)]
    pub a1: f64,
}

fn yes() -> bool {
    true
}

fn every() -> usize {
    1
}

/// Diagnostics recorded alongside the frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Species index whose angular spectra are recorded.
    #[serde(default)]
    pub species: usize,
    /// Rings; defaults to the middle and the outermost ring.
    #[serde(default)]
    pub rings: Option<Vec<usize>>,
    #[serde(default = "n_max")]
    pub n_max: usize,
}

fn n_max() -> usize {
    8
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig { species: 0, rings: None, n_max: n_max() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: ModelKind,
    pub params: ModelParams,
    #[serde(default)]
    pub variant: Variant,
    pub grid: PolarGrid,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between recorded frames.
    #[serde(default = "every")]
    pub record_every: usize,
    /// Angular low-pass on rings near the pole.
    #[serde(default = "yes")]
    pub pole_filter: bool,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
}

/// Safety factor of the explicit step bound.
pub const STABILITY_MARGIN: f64 = 0.4;
const INTEGRAL_TOL: f64 = 1e-9;

fn integral_ratio(x: f64, dt: f64, what: &str) -> Result<usize> {
    let q = x / dt;
    let k = q.round();
    if (q - k).abs() > INTEGRAL_TOL * k.max(1.0) {
        return Err(Error::Config(format!("{what} = {x} is not an integer multiple of dt = {dt}")));
    }
    Ok(k as usize)
}

impl ModelConfig {
    pub fn kinetics(&self) -> Kinetics {
        Kinetics::new(self.params.b, self.params.kappa, self.params.alpha, self.variant)
    }

    /// Diffusion coefficient per species.
    pub fn diffusion(&self) -> Vec<f64> {
        match self.model {
            ModelKind::LinearTest => vec![self.params.d1],
            _ => vec![self.params.d1, 1.0 / self.params.kappa],
        }
    }

    /// Delay in steps, K = τ/dt.
    pub fn delay_steps(&self) -> Result<usize> {
        integral_ratio(self.params.tau, self.dt, "tau")
    }

    /// Steps to reach t_end, rounded up.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - INTEGRAL_TOL).ceil().max(0.0) as usize
    }

    /// Largest admissible dt: 0.4·Δ²/max D with Δ² = 4/S, where S bounds the
    /// spectrum of −Δ (the pole filter lowers S to at most 8/Δr²).
    pub fn dt_bound(&self) -> f64 {
        let g = &self.grid;
        let d_max = self.diffusion().into_iter().fold(0.0, f64::max);
        let s = if self.pole_filter {
            PoleFilter::new(g).spectral_bound(g)
        } else {
            let h = g.min_spacing();
            4.0 / (h * h)
        };
        if d_max > 0.0 { STABILITY_MARGIN * 4.0 / s / d_max } else { f64::INFINITY }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let p = &self.params;
        if !(p.d1 >= 0.0 && p.d1.is_finite()) {
            return Err(Error::Config(format!("d1 = {} must be >= 0", p.d1)));
        }
        if !(p.tau >= 0.0 && p.tau.is_finite()) {
            return Err(Error::Config(format!("tau = {} must be >= 0", p.tau)));
        }
        if self.model.is_mussel() {
            self.kinetics().validate()?;
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::Config(format!("t_end = {} must be positive", self.t_end)));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be >= 1".into()));
        }
        self.delay_steps()?;
        let bound = self.dt_bound();
        if self.dt > bound {
            return Err(Error::Config(format!("dt = {} exceeds the stability bound {bound:.6e}", self.dt)));
        }
        let d = &self.diagnostics;
        if d.species >= self.model.species().len() {
            return Err(Error::Config(format!("diagnostics species {} out of range", d.species)));
        }
        if 2 * d.n_max >= self.grid.ntheta || d.n_max == 0 {
            return Err(Error::Config(format!("diagnostics n_max = {} must be in 1..ntheta/2", d.n_max)));
        }
        if let Some(r) = &d.rings {
            if r.is_empty() || r.iter().any(|&i| i >= self.grid.nr) {
                return Err(Error::Config("diagnostics rings out of range".into()));
            }
        }
        Ok(())
    }

    /// Positive homogeneous equilibrium, or zero for the linear model.
    pub fn equilibrium(&self) -> Result<Vec<f64>> {
        match self.model {
            ModelKind::LinearTest => Ok(vec![0.0]),
            _ => {
                let (m, a) = self.kinetics().equilibrium()?;
                Ok(vec![m, a])
            }
        }
    }
}
