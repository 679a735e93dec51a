use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::CMatrix;
use crate::disk_spectrum::neumann_zeros;
use crate::error::{Error, Result};
use crate::mussel::{Kinetics, Variant};

/// Angular and radial index of a disk mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub n: usize,
    pub m: usize,
}

impl ModeIndex {
    pub fn new(n: usize, m: usize) -> Self {
        ModeIndex { n, m }
    }

    pub fn is_constant(&self) -> bool {
        self.n == 0 && self.m == 0
    }

    /// λ_nm = α²/R².
    pub fn lambda(&self, radius: f64) -> Result<f64> {
        if self.n >= 1 && self.m == 0 {
            return Err(Error::InvalidMode {
                n: self.n,
                m: self.m,
                reason: "radial index starts at 1 for n >= 1".into(),
            });
        }
        let index = if self.n == 0 { self.m } else { self.m - 1 };
        let alpha = neumann_zeros(self.n, index + 1)?[index];
        Ok(alpha * alpha / (radius * radius))
    }
}

/// Linearisation U′ = D₀ΔU + A₀U + A₁U(t−τ) + N·mean(U).
///
/// Matrices are row-major `species_count × species_count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayedLinearization {
    pub species_count: usize,
    /// Diagonal of D₀.
    pub diffusion: Vec<f64>,
    pub instantaneous: Vec<f64>,
    pub delayed: Vec<f64>,
    pub nonlocal: Vec<f64>,
    pub tau: f64,
}

impl DelayedLinearization {
    pub fn new(
        diffusion: Vec<f64>,
        instantaneous: Vec<f64>,
        delayed: Vec<f64>,
        nonlocal: Vec<f64>,
        tau: f64,
    ) -> Result<Self> {
        let lin = DelayedLinearization {
            species_count: diffusion.len(),
            diffusion,
            instantaneous,
            delayed,
            nonlocal,
            tau,
        };
        lin.validate()?;
        Ok(lin)
    }

    /// One species: D₀ = d, A₀ = a0, A₁ = a1, N = 0.
    pub fn scalar(d: f64, a0: f64, a1: f64, tau: f64) -> Self {
        DelayedLinearization {
            species_count: 1,
            diffusion: vec![d],
            instantaneous: vec![a0],
            delayed: vec![a1],
            nonlocal: vec![0.0],
            tau,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.species_count;
        if n == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        for m in [&self.instantaneous, &self.delayed, &self.nonlocal] {
            if m.len() != n * n {
                return Err(Error::DimensionMismatch {
                    expected: n * n,
                    got: m.len(),
                });
            }
        }
        if self.diffusion.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.diffusion.len(),
            });
        }
        if self.diffusion.iter().any(|&d| !(d >= 0.0)) {
            return Err(Error::Domain("diffusion entries must be >= 0".into()));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::Domain(format!("delay {} must be >= 0", self.tau)));
        }
        Ok(())
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        DelayedLinearization {
            tau,
            ..self.clone()
        }
    }

    /// γI + λD₀ − A₀ − A₁e^{−γτ} − [mode is constant]·N.
    pub fn char_matrix(&self, mode: ModeIndex, lambda: f64, gamma: Complex64) -> CMatrix {
        let n = self.species_count;
        let e = (-gamma * self.tau).exp();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                let mut v = Complex64::new(-self.instantaneous[k], 0.0) - e * self.delayed[k];
                if mode.is_constant() {
                    v -= self.nonlocal[k];
                }
                if i == j {
                    v += gamma + lambda * self.diffusion[i];
                }
                m.data[k] = v;
            }
        }
        m
    }

    pub fn char_det(&self, mode: ModeIndex, lambda: f64, gamma: Complex64) -> Complex64 {
        self.char_matrix(mode, lambda, gamma).det()
    }
}

/// Two-parameter family (p1, p2) ↦ linearisation on a disk of fixed radius.
pub trait LinearFamily: Sync {
    fn radius(&self) -> f64;
    fn linearization(&self, p1: f64, p2: f64) -> Result<DelayedLinearization>;
}

/// Parameters of the mussel–algae linearisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MusselParams {
    pub b: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub radius: f64,
    pub d1: f64,
    pub tau: f64,
}

/// Linearisation of the mussel–algae model at its positive equilibrium.
///
/// Variables are ordered (m, a). The delayed block carries the m-equation's
/// dependence on m(t−τ) and a(t−τ); with `nonlocal` the α·a sink of the
/// a-equation moves from A₀ into N.
pub fn mussel_algae_linearization(
    params: &MusselParams,
    variant: Variant,
    nonlocal: bool,
) -> Result<DelayedLinearization> {
    let kin = Kinetics::new(params.b, params.kappa, params.alpha, variant);
    let (ms, as_) = kin.equilibrium()?;
    let k = params.kappa;
    let dm_dm = params.b * as_ - kin.mortality(ms);
    let instantaneous = if nonlocal {
        vec![dm_dm, 0.0, -as_ / k, -ms / k]
    } else {
        vec![dm_dm, 0.0, -as_ / k, -(params.alpha + ms) / k]
    };
    let delayed = vec![-ms * kin.mortality_prime(ms), params.b * ms, 0.0, 0.0];
    let nonlocal_block = if nonlocal {
        vec![0.0, 0.0, 0.0, -params.alpha / k]
    } else {
        vec![0.0; 4]
    };
    DelayedLinearization::new(
        vec![params.d1, 1.0 / k],
        instantaneous,
        delayed,
        nonlocal_block,
        params.tau,
    )
}

/// Mussel–algae family over (d₁, τ) with fixed kinetics and radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MusselFamily {
    pub b: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub radius: f64,
    pub variant: Variant,
    pub nonlocal: bool,
}

impl LinearFamily for MusselFamily {
    fn radius(&self) -> f64 {
        self.radius
    }

    fn linearization(&self, d1: f64, tau: f64) -> Result<DelayedLinearization> {
        mussel_algae_linearization(
            &MusselParams {
                b: self.b,
                kappa: self.kappa,
                alpha: self.alpha,
                radius: self.radius,
                d1,
                tau,
            },
            self.variant,
            self.nonlocal,
        )
    }
}

/// Scalar family γ + λd − a0 − a1·e^{−γτ} over (d, τ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarFamily {
    pub radius: f64,
    pub a0: f64,
    pub a1: f64,
}

impl LinearFamily for ScalarFamily {
    fn radius(&self) -> f64 {
        self.radius
    }

    fn linearization(&self, d: f64, tau: f64) -> Result<DelayedLinearization> {
        let lin = DelayedLinearization::scalar(d, self.a0, self.a1, tau);
        lin.validate()?;
        Ok(lin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_examples() {
        let lin = DelayedLinearization::scalar(1.0, -1.0, 0.0, 0.0);
        let m = lin.char_matrix(ModeIndex::new(0, 0), 0.0, Complex64::new(0.0, 0.0));
        assert_eq!(m.data[0], Complex64::new(1.0, 0.0));

        let (a, tau, w) = (0.7, 1.3, 0.9);
        let lin = DelayedLinearization::scalar(0.0, 0.0, -a, tau);
        let g = Complex64::new(0.0, w);
        let got = lin.char_matrix(ModeIndex::new(1, 1), 0.0, g).data[0];
        let want = g + a * (-g * tau).exp();
        assert!((got - want).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let err = DelayedLinearization::new(vec![1.0, 1.0], vec![0.0; 3], vec![0.0; 4], vec![0.0; 4], 0.0);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    fn rhs(kin: &Kinetics, u: [f64; 4], abar: f64, nonlocal: bool) -> [f64; 2] {
        // u = (m, a, m(t−τ), a(t−τ))
        let src = if nonlocal { abar } else { u[1] };
        [kin.mussel_rate(u[0], u[3], u[2]), kin.algae_rate(u[0], u[1], src)]
    }

    #[test]
    fn mussel_jacobian_matches_finite_differences() {
        for variant in [Variant::AsPrinted, Variant::MatchedEquilibrium] {
            for nonlocal in [false, true] {
                let p = MusselParams {
                    b: 1.5,
                    kappa: 1.7,
                    alpha: 0.3,
                    radius: 6.0,
                    d1: 0.04,
                    tau: 2.0,
                };
                let lin = mussel_algae_linearization(&p, variant, nonlocal).unwrap();
                let kin = Kinetics::new(p.b, p.kappa, p.alpha, variant);
                let (ms, as_) = kin.equilibrium().unwrap();
                let base = [ms, as_, ms, as_];
                let h = 1e-6;
                // Perturb each slot; the average â follows a only for homogeneous data,
                // so the local a-slot and the â-slot are differentiated separately.
                for slot in 0..4 {
                    let mut up = base;
                    let mut dn = base;
                    up[slot] += h;
                    dn[slot] -= h;
                    let fu = rhs(&kin, up, as_, nonlocal);
                    let fd = rhs(&kin, dn, as_, nonlocal);
                    for row in 0..2 {
                        let d = (fu[row] - fd[row]) / (2.0 * h);
                        let (block, col) = if slot < 2 {
                            (&lin.instantaneous, slot)
                        } else {
                            (&lin.delayed, slot - 2)
                        };
                        assert!((d - block[row * 2 + col]).abs() < 1e-8, "{variant:?} {nonlocal} slot {slot} row {row}");
                    }
                }
                let fu = rhs(&kin, base, as_ + h, nonlocal);
                let fd = rhs(&kin, base, as_ - h, nonlocal);
                let d = (fu[1] - fd[1]) / (2.0 * h);
                assert!((d - lin.nonlocal[3]).abs() < 1e-8);
                if !nonlocal {
                    assert!(lin.nonlocal.iter().all(|&x| x == 0.0));
                }
            }
        }
    }

    #[test]
    fn nonlocal_enters_constant_mode_only() {
        let fam = MusselFamily {
            b: 1.5,
            kappa: 1.0,
            alpha: 0.3,
            radius: 6.0,
            variant: Variant::MatchedEquilibrium,
            nonlocal: true,
        };
        let lin = fam.linearization(0.036, 2.7).unwrap();
        let g = Complex64::new(0.1, 0.4);
        let c = lin.char_matrix(ModeIndex::new(0, 0), 0.0, g);
        let local = DelayedLinearization {
            nonlocal: vec![0.0; 4],
            ..lin.clone()
        };
        let c_local = local.char_matrix(ModeIndex::new(0, 0), 0.0, g);
        assert!((c.get(1, 1) - c_local.get(1, 1) - 0.3).norm() < 1e-15);
        let nc = lin.char_matrix(ModeIndex::new(0, 1), 0.5, g);
        let nc_local = local.char_matrix(ModeIndex::new(0, 1), 0.5, g);
        assert_eq!(nc, nc_local);
    }
}
