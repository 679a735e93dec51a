//! Delayed mussel–algae kinetics shared by the linear analysis and the simulator.
//!
//! ```text
//! ∂m/∂t   = d₁Δm + m (b·a(t−τ) − 1/(1 ∓ m(t−τ)))
//! κ ∂a/∂t = Δa + α(1 − a) − m a          (a → â, the disk average, when nonlocal)
//! ```
//!
//! The mortality denominator is `1 − m` in the printed form of the model and
//! `1 + m` in the variant whose homogeneous equilibrium is (0.2727, 0.5238) at
//! b = 1.5, α = 0.3. Both are kept; [`Variant`] selects one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Denominator 1 − m(t−τ), exactly as the model is usually written.
    AsPrinted,
    /// Denominator 1 + m(t−τ), consistent with the reported base state.
    #[default]
    MatchedEquilibrium,
}

/// Kinetic parameters (b, κ, α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kinetics {
    pub b: f64,
    pub kappa: f64,
    pub alpha: f64,
    #[serde(default)]
    pub variant: Variant,
}

impl Kinetics {
    pub fn new(b: f64, kappa: f64, alpha: f64, variant: Variant) -> Self {
        Kinetics {
            b,
            kappa,
            alpha,
            variant,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("b", self.b), ("kappa", self.kappa), ("alpha", self.alpha)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// Mortality term 1/(1 ∓ m).
    pub fn mortality(&self, m: f64) -> f64 {
        match self.variant {
            Variant::AsPrinted => 1.0 / (1.0 - m),
            Variant::MatchedEquilibrium => 1.0 / (1.0 + m),
        }
    }

    /// d/dm of [`Self::mortality`].
    pub fn mortality_prime(&self, m: f64) -> f64 {
        match self.variant {
            Variant::AsPrinted => 1.0 / ((1.0 - m) * (1.0 - m)),
            Variant::MatchedEquilibrium => -1.0 / ((1.0 + m) * (1.0 + m)),
        }
    }

    /// Reaction part of ∂m/∂t.
    #[inline]
    pub fn mussel_rate(&self, m: f64, a_delayed: f64, m_delayed: f64) -> f64 {
        m * (self.b * a_delayed - self.mortality(m_delayed))
    }

    /// Reaction part of ∂a/∂t (already divided by κ). `a_source` is a or â.
    #[inline]
    pub fn algae_rate(&self, m: f64, a: f64, a_source: f64) -> f64 {
        (self.alpha * (1.0 - a_source) - m * a) / self.kappa
    }

    /// Positive homogeneous equilibrium (m*, a*).
    ///
    /// Solves b·α/(α + m) = 1/(1 ∓ m) by a scan, bisection and a Newton polish.
    pub fn equilibrium(&self) -> Result<(f64, f64)> {
        self.validate()?;
        let (lo, hi) = match self.variant {
            Variant::AsPrinted => (1e-12f64, 1.0 - 1e-12),
            Variant::MatchedEquilibrium => (1e-12, 1e6),
        };
        let h = |m: f64| self.b * self.alpha / (self.alpha + m) - self.mortality(m);
        let dh = |m: f64| {
            -self.b * self.alpha / ((self.alpha + m) * (self.alpha + m)) - self.mortality_prime(m)
        };
        // Log-spaced scan picks the smallest positive root.
        let steps = 4000;
        let ratio = (hi / lo).ln() / steps as f64;
        let mut x0 = lo;
        let mut f0 = h(x0);
        let mut bracket = None;
        for k in 1..=steps {
            let x1 = if k == steps {
                hi
            } else {
                lo * (ratio * k as f64).exp()
            };
            let f1 = h(x1);
            if f0 == 0.0 {
                bracket = Some((x0, x0));
                break;
            }
            if f0 * f1 < 0.0 {
                bracket = Some((x0, x1));
                break;
            }
            x0 = x1;
            f0 = f1;
        }
        let (mut a, mut b) = bracket.ok_or(Error::NoEquilibrium { lo, hi })?;
        let fa = h(a);
        while b - a > 1e-15 * b.max(1e-300) && a != b {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if h(mid) * fa > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        let mut m = 0.5 * (a + b);
        for _ in 0..3 {
            let step = h(m) / dh(m);
            if step.is_finite() && (m - step) > 0.0 {
                m -= step;
            }
        }
        let a_star = self.alpha / (self.alpha + m);
        Ok((m, a_star))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig(variant: Variant) -> Kinetics {
        Kinetics::new(1.5, 1.0, 0.3, variant)
    }

    #[test]
    fn matched_equilibrium_values() {
        let (m, a) = fig(Variant::MatchedEquilibrium).equilibrium().unwrap();
        assert!((m - 0.2727).abs() < 1e-3 && (a - 0.5238).abs() < 1e-3);
        // closed form m* = α(1 − b)/(bα − 1)
        assert!((m - 0.3 * (1.0 - 1.5) / (0.45 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn printed_equilibrium_values() {
        let k = fig(Variant::AsPrinted);
        let (m, a) = k.equilibrium().unwrap();
        assert!((m - 0.1034).abs() < 1e-3 && (a - 0.7436).abs() < 1e-3);
        assert!((m - 0.3 * 0.5 / 1.45).abs() < 1e-14);
        assert!(k.mussel_rate(m, a, m).abs() < 1e-12);
        assert!(k.algae_rate(m, a, a).abs() < 1e-12);
    }

    #[test]
    fn no_equilibrium_reports_interval() {
        // b·α ≤ 1 with the matched denominator has no positive root for b < 1.
        let k = Kinetics::new(0.5, 1.0, 0.3, Variant::MatchedEquilibrium);
        assert!(matches!(k.equilibrium(), Err(Error::NoEquilibrium { .. })));
    }
}
