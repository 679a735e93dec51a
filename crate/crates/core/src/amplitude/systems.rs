use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Autonomous ODE on ℝᵈ.
pub trait VectorField {
    fn dim(&self) -> usize;
    /// Writes the derivative at `x` into `out`; both have length [`Self::dim`].
    fn eval(&self, x: &[f64], out: &mut [f64]);
    /// Coordinates that are polar radii and should stay nonnegative.
    fn radius_mask(&self) -> Vec<bool> {
        vec![true; self.dim()]
    }
}

/// Polar ET-EH normal form in (ρ_H1, ρ_H2, ρ_T1, ρ_T2).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtehPolar {
    pub eps1: f64,
    pub eps2: f64,
    pub c11: f64,
    pub c12: f64,
    pub c13: f64,
    pub c21: f64,
    pub c22: f64,
    pub c23: f64,
}

impl VectorField for EtehPolar {
    fn dim(&self) -> usize {
        4
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let (h1, h2, t1, t2) = (x[0], x[1], x[2], x[3]);
        let tt = t1 * t2;
        out[0] = (self.eps1 + self.c11 * h1 * h1 + self.c12 * h2 * h2 + self.c13 * tt) * h1;
        out[1] = (self.eps1 + self.c11 * h2 * h2 + self.c12 * h1 * h1 + self.c13 * tt) * h2;
        let g = self.eps2 + self.c21 * h1 * h1 + self.c22 * h2 * h2 + self.c23 * tt;
        out[2] = g * t1;
        out[3] = g * t2;
    }
}

/// Polar ET-H normal form in (ρ_H, ρ_T1, ρ_T2).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EthPolar {
    pub alpha1: f64,
    pub alpha2: f64,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl VectorField for EthPolar {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let (h, t1, t2) = (x[0], x[1], x[2]);
        let tt = t1 * t2;
        out[0] = (self.alpha1 + self.a11 * h * h + self.a12 * tt) * h;
        let g = self.alpha2 + self.a21 * tt + self.a22 * h * h;
        out[1] = g * t1;
        out[2] = g * t2;
    }
}

fn one() -> f64 {
    1.0
}

/// Planar ET-H system in (ρ_H, ρ_T) after ρ_T² = ρ_T1ρ_T2 and rescaling.
///
/// `a_a` is the sign of the ρ_H² coefficient; the usual form takes it as +1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EthPlanar {
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(default = "one")]
    pub a_a: f64,
    pub a_b: f64,
    pub a_c: f64,
    pub a_d: f64,
}

impl EthPlanar {
    /// υ = (a_b + 1)/(a_c − 1), the level-curve weight of the center case.
    pub fn upsilon(&self) -> f64 {
        (self.a_b + 1.0) / (self.a_c - 1.0)
    }
}

impl VectorField for EthPlanar {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let (h, t) = (x[0], x[1]);
        out[0] = (self.alpha1 + self.a_a * h * h + self.a_b * t * t) * h;
        out[1] = (self.alpha2 + self.a_c * h * h + self.a_d * t * t) * t;
    }
}

/// Polar T-EH normal form in (ρ_H1, ρ_H2, ρ_T); ρ_T is a signed amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TehPolar {
    pub beta1: f64,
    pub beta2: f64,
    pub b1: f64,
    pub b2: f64,
    pub b11: f64,
    pub b12: f64,
    pub b13: f64,
    pub b21: f64,
    pub b22: f64,
    pub b23: f64,
}

impl VectorField for TehPolar {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let (h1, h2, t) = (x[0], x[1], x[2]);
        let common = self.beta1 + self.b1 * t + self.b13 * t * t;
        out[0] = (common + self.b11 * h1 * h1 + self.b12 * h2 * h2) * h1;
        out[1] = (common + self.b11 * h2 * h2 + self.b12 * h1 * h1) * h2;
        out[2] = (self.beta2 + self.b2 * t + self.b21 * h1 * h1 + self.b22 * h2 * h2 + self.b23 * t * t) * t;
    }

    fn radius_mask(&self) -> Vec<bool> {
        vec![true, true, false]
    }
}

/// Extra quadratic couplings present when the Turing index is twice the Hopf index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonantTerms {
    pub b001010: Complex64,
    pub b001001: Complex64,
}

/// Which coordinates are complex conjugates on the real solution subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// z₄ = conj z₁, z₂ = conj z₃: the pairing under which |z₁|, |z₃|, z₅, z₆
    /// obey the polar ET-EH system.
    #[default]
    ChangeOfVariables,
    /// z₂ = conj z₁, z₄ = conj z₃.
    Sequential,
}

impl Pairing {
    /// Index pairs (a, b) with z_b = conj z_a.
    pub fn pairs(self) -> [(usize, usize); 2] {
        match self {
            Pairing::ChangeOfVariables => [(0, 3), (2, 1)],
            Pairing::Sequential => [(0, 1), (2, 3)],
        }
    }
}

/// Six-dimensional complex ET-EH normal form. The state is stored as 12 reals
/// (Re z₁, Im z₁, …, Re z₆, Im z₆).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSix {
    pub omega: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub b11: Complex64,
    pub b21: Complex64,
    pub b200100: Complex64,
    pub b111000: Complex64,
    pub b100011: Complex64,
    pub b15: f64,
    pub b25: f64,
    pub b100110: f64,
    pub b011010: f64,
    pub b000021: f64,
    #[serde(default)]
    pub resonant: Option<ResonantTerms>,
}

impl ComplexSix {
    /// Complex derivative of z.
    pub fn eval_complex(&self, z: &[Complex64; 6]) -> [Complex64; 6] {
        let i_w = Complex64::new(0.0, self.omega);
        let lin = self.b11 * self.mu1 + self.b21 * self.mu2;
        let lin_t = self.b15 * self.mu1 + self.b25 * self.mu2;
        let [z1, z2, z3, z4, z5, z6] = *z;
        let z56 = z5 * z6;
        let mut d = [
            z1 * (i_w + lin + self.b200100 * z1 * z4 + self.b111000 * z2 * z3 + self.b100011 * z56),
            z2 * (-i_w + lin.conj() + self.b200100.conj() * z3 * z2 + self.b111000.conj() * z1 * z4 + self.b100011.conj() * z56),
            z3 * (i_w + lin + self.b200100 * z3 * z2 + self.b111000 * z1 * z4 + self.b100011 * z56),
            z4 * (-i_w + lin.conj() + self.b200100.conj() * z1 * z4 + self.b111000.conj() * z2 * z3 + self.b100011.conj() * z56),
            z5 * (lin_t + self.b100110 * z1 * z4 + self.b011010 * z2 * z3 + self.b000021 * z56),
            z6 * (lin_t + self.b100110 * z1 * z4 + self.b011010 * z2 * z3 + self.b000021 * z56),
        ];
        if let Some(r) = &self.resonant {
            d[0] += r.b001010 * z3 * z5;
            d[1] += r.b001010.conj() * z4 * z5;
            d[2] += r.b001001 * z1 * z6;
            d[3] += r.b001001.conj() * z2 * z6;
        }
        d
    }

    /// Coefficients of the polar system obtained through the change of variables.
    pub fn polar(&self) -> EtehPolar {
        EtehPolar {
            eps1: self.b11.re * self.mu1 + self.b21.re * self.mu2,
            eps2: self.b15 * self.mu1 + self.b25 * self.mu2,
            c11: self.b200100.re,
            c12: self.b111000.re,
            c13: self.b100011.re,
            c21: self.b100110,
            c22: self.b011010,
            c23: self.b000021,
        }
    }

    /// Largest deviation from the conjugate structure of `pairing` (including
    /// imaginary parts of z₅, z₆).
    pub fn conjugacy_defect(x: &[f64], pairing: Pairing) -> f64 {
        let z = to_complex(x);
        let mut worst: f64 = z[4].im.abs().max(z[5].im.abs());
        for (a, b) in pairing.pairs() {
            worst = worst.max((z[b] - z[a].conj()).norm());
        }
        worst
    }
}

pub fn to_complex(x: &[f64]) -> [Complex64; 6] {
    std::array::from_fn(|k| Complex64::new(x[2 * k], x[2 * k + 1]))
}

pub fn from_complex(z: &[Complex64; 6]) -> Vec<f64> {
    z.iter().flat_map(|w| [w.re, w.im]).collect()
}

impl VectorField for ComplexSix {
    fn dim(&self) -> usize {
        12
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let d = self.eval_complex(&to_complex(x));
        for k in 0..6 {
            out[2 * k] = d[k].re;
            out[2 * k + 1] = d[k].im;
        }
    }

    fn radius_mask(&self) -> Vec<bool> {
        vec![false; 12]
    }
}

/// Any of the supported normal forms, tagged by `system` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum NormalForm {
    EtehPolar(EtehPolar),
    EthPolar(EthPolar),
    EthPlanar(EthPlanar),
    TehPolar(TehPolar),
    ComplexSix(ComplexSix),
}

impl NormalForm {
    pub fn as_field(&self) -> &dyn VectorField {
        match self {
            NormalForm::EtehPolar(s) => s,
            NormalForm::EthPolar(s) => s,
            NormalForm::EthPlanar(s) => s,
            NormalForm::TehPolar(s) => s,
            NormalForm::ComplexSix(s) => s,
        }
    }
}

/// Derivative of `system` at `state`, checking the dimension.
pub fn vector_field(system: &dyn VectorField, state: &[f64]) -> Result<Vec<f64>> {
    if state.len() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            got: state.len(),
        });
    }
    let mut out = vec![0.0; state.len()];
    system.eval(state, &mut out);
    Ok(out)
}
