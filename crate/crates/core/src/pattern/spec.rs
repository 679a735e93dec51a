use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disk_spectrum::bessel::jn;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linear_stability::ModeIndex;
use crate::rd::{FrameSet, PolarGrid};

/// Closed-form pattern families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatternKind {
    #[serde(rename = "static_turing")]
    StaticTuring,
    #[serde(rename = "rotating_wave_+", alias = "rotating_wave_plus")]
    RotatingPlus,
    #[serde(rename = "rotating_wave_-", alias = "rotating_wave_minus")]
    RotatingMinus,
    #[serde(rename = "standing_wave")]
    Standing,
    #[serde(rename = "eteh_mixed_+", alias = "eteh_mixed_plus")]
    EtehMixedPlus,
    #[serde(rename = "eteh_mixed_-", alias = "eteh_mixed_minus")]
    EtehMixedMinus,
    #[serde(rename = "eteh_standing")]
    EtehStanding,
    #[serde(rename = "breathing")]
    Breathing,
    #[serde(rename = "quasi_periodic")]
    QuasiPeriodic,
    #[serde(rename = "teh_rotating_+", alias = "teh_rotating_plus")]
    TehRotatingPlus,
    #[serde(rename = "teh_rotating_-", alias = "teh_rotating_minus")]
    TehRotatingMinus,
    #[serde(rename = "teh_standing")]
    TehStanding,
}

impl PatternKind {
    pub const ALL: [PatternKind; 12] = [
        PatternKind::StaticTuring,
        PatternKind::RotatingPlus,
        PatternKind::RotatingMinus,
        PatternKind::Standing,
        PatternKind::EtehMixedPlus,
        PatternKind::EtehMixedMinus,
        PatternKind::EtehStanding,
        PatternKind::Breathing,
        PatternKind::QuasiPeriodic,
        PatternKind::TehRotatingPlus,
        PatternKind::TehRotatingMinus,
        PatternKind::TehStanding,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternKind::StaticTuring => "static_turing",
            PatternKind::RotatingPlus => "rotating_wave_+",
            PatternKind::RotatingMinus => "rotating_wave_-",
            PatternKind::Standing => "standing_wave",
            PatternKind::EtehMixedPlus => "eteh_mixed_+",
            PatternKind::EtehMixedMinus => "eteh_mixed_-",
            PatternKind::EtehStanding => "eteh_standing",
            PatternKind::Breathing => "breathing",
            PatternKind::QuasiPeriodic => "quasi_periodic",
            PatternKind::TehRotatingPlus => "teh_rotating_+",
            PatternKind::TehRotatingMinus => "teh_rotating_-",
            PatternKind::TehStanding => "teh_standing",
        }
    }

    pub fn needs_turing(self) -> bool {
        !matches!(self, PatternKind::RotatingPlus | PatternKind::RotatingMinus | PatternKind::Standing)
    }

    /// Kinds without a Hopf part.
    pub fn is_static(self) -> bool {
        self == PatternKind::StaticTuring
    }

    /// Sign s of the travelling argument ωt + s·nθ; 0 for standing parts.
    fn travel_sign(self) -> Option<f64> {
        match self {
            PatternKind::RotatingPlus | PatternKind::EtehMixedPlus | PatternKind::TehRotatingPlus => Some(1.0),
            PatternKind::RotatingMinus | PatternKind::EtehMixedMinus | PatternKind::TehRotatingMinus => Some(-1.0),
            _ => None,
        }
    }
}

/// Which radial index the homogeneous Hopf summand of the breathing and
/// quasi-periodic forms uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomogeneousIndex {
    /// J₀(√λ_{0,m_T} r), with the Turing mode's radial index.
    #[default]
    TuringM,
    /// J₀(√λ_{0,m_H} r), with the Hopf mode's radial index.
    HopfM,
}

fn yes() -> bool {
    true
}

/// Parameters of a closed-form pattern U(t)(r, θ) ∈ ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSpec {
    pub kind: PatternKind,
    pub radius: f64,
    pub hopf_mode: ModeIndex,
    #[serde(default)]
    pub turing_mode: Option<ModeIndex>,
    #[serde(default)]
    pub omega: f64,
    #[serde(default)]
    pub omega_bar: Option<f64>,
    /// Hopf radius ρ_H.
    #[serde(default)]
    pub rho_h: f64,
    /// Turing radii; their sum multiplies the Turing summand.
    #[serde(default)]
    pub rho_t: Vec<f64>,
    /// Entries p₁ᵢ of the Hopf eigenvector (one per species).
    pub phases: Vec<Complex64>,
    /// Turing eigenvector ξ_T (one per species).
    #[serde(default)]
    pub xi_t: Vec<f64>,
    /// Scale `phases` to max-modulus 1 before use.
    #[serde(default = "yes")]
    pub normalize_phases: bool,
    #[serde(default)]
    pub homogeneous_index: HomogeneousIndex,
}

fn sqrt_lambda(mode: ModeIndex, radius: f64) -> Result<f64> {
    Ok(mode.lambda(radius)?.sqrt())
}

/// Precomputed radial wavenumbers and per-species weights.
#[derive(Debug, Clone)]
struct Prepared {
    k_h: f64,
    n_h: usize,
    k_t: f64,
    n_t: usize,
    k_0: f64,
    moduli: Vec<f64>,
    args: Vec<f64>,
    turing_amp: f64,
}

impl PatternSpec {
    pub fn species_count(&self) -> usize {
        self.phases.len()
    }

    pub fn validate(&self) -> Result<()> {
        self.prepare().map(|_| ())
    }

    fn prepare(&self) -> Result<Prepared> {
        let bad = |msg: &str| Error::Config(format!("{} pattern: {msg}", self.kind.as_str()));
        if !(self.radius > 0.0) {
            return Err(bad("radius must be positive"));
        }
        let n = self.phases.len();
        if n == 0 {
            return Err(bad("phases must have one entry per species"));
        }
        let kind = self.kind;
        let oscillates = !kind.is_static();
        if oscillates && !(self.omega > 0.0) {
            return Err(bad("omega must be positive"));
        }
        let turing = if kind.needs_turing() {
            let t = self.turing_mode.ok_or_else(|| bad("turing_mode is required"))?;
            if self.xi_t.len() != n {
                return Err(bad("xi_t must have one entry per species"));
            }
            if self.rho_t.is_empty() {
                return Err(bad("rho_t is required"));
            }
            Some(t)
        } else {
            None
        };
        let teh = matches!(kind, PatternKind::TehRotatingPlus | PatternKind::TehRotatingMinus | PatternKind::TehStanding);
        let homogeneous_hopf = matches!(kind, PatternKind::Breathing | PatternKind::QuasiPeriodic);
        if let Some(t) = turing {
            if teh && t.n != 0 {
                return Err(bad("the Turing mode must have n = 0"));
            }
            if !teh && t.n == 0 {
                return Err(bad("the Turing mode must have n >= 1"));
            }
        }
        if !homogeneous_hopf && !kind.is_static() && self.hopf_mode.n == 0 {
            return Err(bad("the Hopf mode must have n >= 1"));
        }
        if homogeneous_hopf && self.hopf_mode.n != 0 {
            return Err(bad("the Hopf mode must have n = 0"));
        }
        if kind == PatternKind::QuasiPeriodic && !self.omega_bar.is_some_and(|w| w.is_finite()) {
            return Err(bad("omega_bar is required"));
        }
        let scale = if self.normalize_phases {
            let m = self.phases.iter().fold(0.0f64, |a, p| a.max(p.norm()));
            if m == 0.0 {
                return Err(bad("phases are all zero"));
            }
            m
        } else {
            1.0
        };
        let k_h = if kind.is_static() { 0.0 } else { sqrt_lambda(self.hopf_mode, self.radius)? };
        let (k_t, n_t) = match turing {
            Some(t) => (sqrt_lambda(t, self.radius)?, t.n),
            None => (0.0, 0),
        };
        let k_0 = if homogeneous_hopf {
            let m = match self.homogeneous_index {
                HomogeneousIndex::TuringM => turing.map_or(0, |t| t.m),
                HomogeneousIndex::HopfM => self.hopf_mode.m,
            };
            sqrt_lambda(ModeIndex::new(0, m), self.radius)?
        } else {
            0.0
        };
        Ok(Prepared {
            k_h,
            n_h: self.hopf_mode.n,
            k_t,
            n_t,
            k_0,
            moduli: self.phases.iter().map(|p| p.norm() / scale).collect(),
            args: self.phases.iter().map(|p| p.arg()).collect(),
            turing_amp: self.rho_t.iter().sum(),
        })
    }

    /// U(t)(r, θ), one value per species.
    pub fn eval(&self, t: f64, r: f64, theta: f64) -> Result<Vec<f64>> {
        let p = self.prepare()?;
        let mut out = vec![0.0; self.species_count()];
        self.eval_prepared(&p, t, r, theta, &mut out);
        Ok(out)
    }

    fn eval_prepared(&self, p: &Prepared, t: f64, r: f64, theta: f64, out: &mut [f64]) {
        use PatternKind::*;
        let kind = self.kind;
        let (w, rho) = (self.omega, self.rho_h);
        let turing = |xi: f64| match kind {
            TehRotatingPlus | TehRotatingMinus | TehStanding => xi * p.turing_amp * jn(0, p.k_t * r),
            _ => xi * p.turing_amp * jn(p.n_t, p.k_t * r) * (p.n_t as f64 * theta).cos(),
        };
        let jh = if kind.is_static() { 0.0 } else { jn(p.n_h, p.k_h * r) };
        let nth = p.n_h as f64 * theta;
        for (i, o) in out.iter_mut().enumerate() {
            let (m, a) = (p.moduli[i], p.args[i]);
            let xi = self.xi_t.get(i).copied().unwrap_or(0.0);
            *o = match kind {
                StaticTuring => turing(xi),
                RotatingPlus | RotatingMinus | EtehMixedPlus | EtehMixedMinus | TehRotatingPlus | TehRotatingMinus => {
                    let s = kind.travel_sign().unwrap_or(1.0);
                    let hopf = 2.0 * m * rho * jh * (a + w * t + s * nth).cos();
                    if kind.needs_turing() { hopf + turing(xi) } else { hopf }
                }
                Standing => 4.0 * m * rho * jh * (a + w * t).cos() * nth.cos(),
                EtehStanding => 2.0 * m * rho * jh * (a + w * t).cos() * nth.cos() + turing(xi),
                TehStanding => 4.0 * m * rho * jh * (a + w * t).cos() * nth.cos() + turing(xi),
                Breathing => 2.0 * m * rho * jn(0, p.k_0 * r) * (a + w * t).cos() + turing(xi),
                QuasiPeriodic => {
                    let wb = self.omega_bar.unwrap_or(0.0);
                    2.0 * m * rho * jn(0, p.k_0 * r) * (a + w * t).cos() * (wb * t).cos() + turing(xi) * (wb * t).sin()
                }
            };
        }
    }

    /// Repeat time of the evaluated field: 2π/ω for single-frequency kinds,
    /// the common period of ω and ω̄ when their ratio is rational with a small
    /// denominator, `None` for static or incommensurate patterns.
    pub fn fundamental_period(&self) -> Option<f64> {
        if self.kind.is_static() || !(self.omega > 0.0) {
            return None;
        }
        let base = 2.0 * PI / self.omega;
        if self.kind != PatternKind::QuasiPeriodic {
            return Some(base);
        }
        let wb = self.omega_bar?.abs();
        if wb == 0.0 {
            return Some(base);
        }
        // Frequencies present: ω ± ω̄ and ω̄; all are integer multiples of g = gcd(ω, ω̄).
        let ratio = wb / self.omega;
        for q in 1..=64u32 {
            let p = (ratio * q as f64).round();
            if p >= 1.0 && (ratio * q as f64 - p).abs() <= 1e-12 * q as f64 {
                let g = self.omega / q as f64;
                return Some(2.0 * PI / g);
            }
        }
        None
    }
}

/// Samples `spec` on `grid` at `times`; species are named u1, u2, ….
pub fn sample_pattern(spec: &PatternSpec, grid: &PolarGrid, times: &[f64], exec: Exec) -> Result<FrameSet> {
    let prep = spec.prepare()?;
    grid.validate()?;
    let ns = spec.species_count();
    let frames = exec.map(times.len(), |k| {
        let t = times[k];
        let mut data = vec![0.0; ns * grid.len()];
        let mut v = vec![0.0; ns];
        for i in 0..grid.nr {
            let r = grid.r(i);
            for j in 0..grid.ntheta {
                spec.eval_prepared(&prep, t, r, grid.theta(j), &mut v);
                for (s, x) in v.iter().enumerate() {
                    data[s * grid.len() + grid.index(i, j)] = *x;
                }
            }
        }
        data
    });
    let species = (1..=ns).map(|i| format!("u{i}")).collect();
    let params = serde_json::to_value(spec)?;
    let mut out = FrameSet::new(*grid, format!("pattern:{}", spec.kind.as_str()), params, species);
    for (t, f) in times.iter().zip(frames) {
        out.push(*t, f)?;
    }
    Ok(out)
}

/// The ET-EH example with n_T = m_T = 1, n_H = m_H = 2, ω = 1:
/// J₂(√λ₂₂ r)cos(t + 2θ) + J₁(√λ₁₁ r)cos θ.
pub fn example_eteh_spec(radius: f64) -> PatternSpec {
    PatternSpec {
        kind: PatternKind::EtehMixedPlus,
        radius,
        hopf_mode: ModeIndex::new(2, 2),
        turing_mode: Some(ModeIndex::new(1, 1)),
        omega: 1.0,
        omega_bar: None,
        rho_h: 0.5,
        rho_t: vec![1.0, 1.0],
        phases: vec![Complex64::new(1.0, 0.0)],
        xi_t: vec![0.5],
        normalize_phases: true,
        homogeneous_index: HomogeneousIndex::TuringM,
    }
}
