//! Neumann eigenpairs of the Laplacian on a disk of radius R.
//!
//! Eigenvalues are λ = α²/R² where α runs over the zeros of J_n′. Indexing
//! follows the constant-mode convention: (n = 0, m = 0) is the constant mode
//! with α = 0, and for n ≥ 1 the radial index starts at m = 1.

pub(crate) mod bessel;
mod quadrature;

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use bessel::{bessel_j, bessel_j_prime, bessel_j_second, MAX_ORDER};
pub(crate) use bessel::{jn, jn_prime};
pub use quadrature::{gauss_legendre, CompositeGauss};

use crate::error::{Error, Result};

/// Step of the sign-change scan used to bracket zeros of J_n′.
pub const SCAN_STEP: f64 = 0.1;
/// Absolute tolerance of the Newton polish.
pub const ROOT_TOL: f64 = 1e-12;
/// Default number of radial quadrature nodes used for normalisation.
pub const DEFAULT_QUAD_NODES: usize = 256;

/// Angular branch of an eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    /// e^{+inθ}, or cos(nθ) for the real accessor.
    Cosine,
    /// e^{−inθ}, or sin(nθ) for the real accessor (n ≥ 1 only).
    Sine,
}

impl ModeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeKind::Cosine => "cosine",
            ModeKind::Sine => "sine",
        }
    }
}

/// One normalised Neumann eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskMode {
    pub n: usize,
    pub m: usize,
    pub kind: ModeKind,
    /// Zero of J_n′ (0 only for the constant mode).
    pub alpha: f64,
    /// Eigenvalue α²/R² of −Δ.
    pub lambda: f64,
    pub radius: f64,
    /// Divisor making the complex eigenfunction unit-norm under ∫∫ r u v̄ dr dθ.
    pub norm_const: f64,
}

/// The first `count` admissible α values for angular order `n`, increasing.
///
/// For n = 0 the list starts with the constant mode α = 0.
pub fn neumann_zeros(n: usize, count: usize) -> Result<Vec<f64>> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!("order {n} exceeds {MAX_ORDER}")));
    }
    if count == 0 || count > 64 {
        return Err(Error::Domain(format!("zero count {count} outside 1..=64")));
    }
    let mut zeros = Vec::with_capacity(count);
    if n == 0 {
        zeros.push(0.0);
    }
    let limit = 10.0 * count as f64 + 20.0;
    let mut k = 1usize;
    let mut x0 = SCAN_STEP;
    let mut f0 = jn_prime(n, x0);
    while zeros.len() < count {
        let x1 = (k + 1) as f64 * SCAN_STEP;
        if x1 > limit {
            return Err(Error::ZeroBracket {
                n,
                wanted: count,
                limit,
            });
        }
        let f1 = jn_prime(n, x1);
        if f0 == 0.0 {
            zeros.push(x0);
        } else if f0 * f1 < 0.0 {
            zeros.push(polish(n, x0, x1));
        }
        x0 = x1;
        f0 = f1;
        k += 1;
    }
    Ok(zeros)
}

/// Safeguarded Newton on J_n′ inside a sign-change bracket.
fn polish(n: usize, mut lo: f64, mut hi: f64) -> f64 {
    let nf = (n * n) as f64;
    let f_lo = jn_prime(n, lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let j = jn(n, x);
        let d = jn_prime(n, x);
        if d == 0.0 {
            return x;
        }
        if d.signum() == f_lo.signum() {
            lo = x;
        } else {
            hi = x;
        }
        // J_n″ from Bessel's equation.
        let dd = -d / x - (1.0 - nf / (x * x)) * j;
        let mut next = x - d / dd;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 1e-3 * ROOT_TOL || hi - lo <= 1e-3 * ROOT_TOL {
            break;
        }
    }
    x
}

/// ∫₀^R r J_n(αr/R)² dr by composite Gauss–Legendre.
fn radial_norm_sq(n: usize, alpha: f64, radius: f64, nodes: usize) -> f64 {
    let q = CompositeGauss::with_nodes(0.0, radius, nodes);
    q.integrate(|r| {
        let j = jn(n, alpha * r / radius);
        r * j * j
    })
}

/// Build the eigenpair (n, m) of a disk of the given radius.
pub fn make_mode(n: usize, m: usize, radius: f64, kind: ModeKind) -> Result<DiskMode> {
    make_mode_with_quadrature(n, m, radius, kind, DEFAULT_QUAD_NODES)
}

pub fn make_mode_with_quadrature(
    n: usize,
    m: usize,
    radius: f64,
    kind: ModeKind,
    quad_nodes: usize,
) -> Result<DiskMode> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("radius {radius} must be positive")));
    }
    if n == 0 && kind == ModeKind::Sine {
        return Err(Error::InvalidMode {
            n,
            m,
            reason: "the sine branch needs n >= 1".into(),
        });
    }
    if n >= 1 && m == 0 {
        return Err(Error::InvalidMode {
            n,
            m,
            reason: "radial index starts at 1 for n >= 1".into(),
        });
    }
    let index = if n == 0 { m } else { m - 1 };
    let alpha = neumann_zeros(n, index + 1)?[index];
    let lambda = alpha * alpha / (radius * radius);
    let norm_const = (2.0 * PI * radial_norm_sq(n, alpha, radius, quad_nodes)).sqrt();
    Ok(DiskMode {
        n,
        m,
        kind,
        alpha,
        lambda,
        radius,
        norm_const,
    })
}

impl DiskMode {
    pub fn is_constant(&self) -> bool {
        self.n == 0 && self.m == 0
    }

    fn check_r(&self, r: f64) -> Result<()> {
        if !(0.0..=self.radius * (1.0 + 1e-12)).contains(&r) {
            return Err(Error::Domain(format!(
                "r = {r} outside [0, {}]",
                self.radius
            )));
        }
        Ok(())
    }

    /// J_n(αr/R), without normalisation.
    pub fn bessel_profile(&self, r: f64) -> f64 {
        jn(self.n, self.alpha * r / self.radius)
    }

    /// J_n(αr/R)·e^{±inθ}/norm_const (+ for cosine, − for sine).
    pub fn eval_complex(&self, r: f64, theta: f64) -> Result<Complex64> {
        self.check_r(r)?;
        let sign = match self.kind {
            ModeKind::Cosine => 1.0,
            ModeKind::Sine => -1.0,
        };
        let phase = Complex64::from_polar(1.0, sign * self.n as f64 * theta);
        Ok(phase * (self.bessel_profile(r) / self.norm_const))
    }

    /// Real unit-norm combination: J_n cos(nθ) or J_n sin(nθ), scaled by √2 for n ≥ 1.
    pub fn eval_real(&self, r: f64, theta: f64) -> Result<f64> {
        self.check_r(r)?;
        let base = self.bessel_profile(r) / self.norm_const;
        if self.n == 0 {
            return Ok(base);
        }
        let nt = self.n as f64 * theta;
        let ang = match self.kind {
            ModeKind::Cosine => nt.cos(),
            ModeKind::Sine => nt.sin(),
        };
        Ok(std::f64::consts::SQRT_2 * base * ang)
    }

    /// d/dr of the normalised radial factor J_n(αr/R)/norm_const.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        let k = self.alpha / self.radius;
        k * jn_prime(self.n, k * r) / self.norm_const
    }
}

/// One row of an exported mode table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRow {
    pub n: usize,
    pub m: usize,
    pub kind: ModeKind,
    pub alpha: f64,
    pub lambda: f64,
}

/// All modes with n ≤ n_max and m ≤ m_max, both branches for n ≥ 1, sorted by λ.
pub fn mode_table(n_max: usize, m_max: usize, radius: f64) -> Result<Vec<ModeRow>> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("radius {radius} must be positive")));
    }
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let first = if n == 0 { 0 } else { 1 };
        if m_max < first {
            continue;
        }
        let count = if n == 0 { m_max + 1 } else { m_max };
        let zeros = neumann_zeros(n, count)?;
        for (i, &alpha) in zeros.iter().enumerate() {
            let m = first + i;
            let lambda = alpha * alpha / (radius * radius);
            let kinds: &[ModeKind] = if n == 0 {
                &[ModeKind::Cosine]
            } else {
                &[ModeKind::Cosine, ModeKind::Sine]
            };
            for &kind in kinds {
                rows.push(ModeRow {
                    n,
                    m,
                    kind,
                    alpha,
                    lambda,
                });
            }
        }
    }
    rows.sort_by(|a, b| {
        a.lambda
            .total_cmp(&b.lambda)
            .then(a.n.cmp(&b.n))
            .then(a.m.cmp(&b.m))
            .then(a.kind.cmp(&b.kind))
    });
    Ok(rows)
}

/// Write rows as CSV with header `n,m,kind,alpha,lambda`.
pub fn write_mode_table<W: Write>(rows: &[ModeRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,m,kind,alpha,lambda")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.15e},{:.15e}",
            r.n,
            r.m,
            r.kind.as_str(),
            r.alpha,
            r.lambda
        )?;
    }
    Ok(())
}
