use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::systems::VectorField;
use crate::error::{Error, Result};

/// Real parts with magnitude at most this count as zero.
pub const CENTER_TOL: f64 = 1e-7;
/// Largest field residual accepted at an equilibrium.
pub const EQUILIBRIUM_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityLabel {
    Sink,
    Source,
    Saddle,
    /// Every eigenvalue has |Re| ≤ [`CENTER_TOL`].
    CenterLike,
    /// Some eigenvalues on the imaginary axis, the rest on one side.
    NonHyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub eigenvalues: Vec<Complex64>,
    pub label: StabilityLabel,
}

/// Central-difference Jacobian with step 1e-6·max(1, |x_j|).
pub fn jacobian(sys: &dyn VectorField, x: &[f64]) -> DMatrix<f64> {
    let n = sys.dim();
    let mut jac = DMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    let mut fp = vec![0.0; n];
    let mut fm = vec![0.0; n];
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        sys.eval(&xp, &mut fp);
        xp[j] = x[j] - h;
        sys.eval(&xp, &mut fm);
        xp[j] = x[j];
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

pub fn label_of(eigenvalues: &[Complex64]) -> StabilityLabel {
    let pos = eigenvalues.iter().filter(|e| e.re > CENTER_TOL).count();
    let neg = eigenvalues.iter().filter(|e| e.re < -CENTER_TOL).count();
    let zero = eigenvalues.len() - pos - neg;
    match (pos, neg, zero) {
        (_, _, z) if z == eigenvalues.len() => StabilityLabel::CenterLike,
        (p, n, _) if p > 0 && n > 0 => StabilityLabel::Saddle,
        (0, _, 0) => StabilityLabel::Sink,
        (_, 0, 0) => StabilityLabel::Source,
        _ => StabilityLabel::NonHyperbolic,
    }
}

/// Eigenvalues of the numerical Jacobian at `equilibrium` and their label.
pub fn stability(sys: &dyn VectorField, equilibrium: &[f64]) -> Result<Stability> {
    if equilibrium.len() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), got: equilibrium.len() });
    }
    let mut f = vec![0.0; sys.dim()];
    sys.eval(equilibrium, &mut f);
    let res = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(res <= EQUILIBRIUM_RESIDUAL) {
        return Err(Error::Residual(res));
    }
    let mut eigenvalues: Vec<Complex64> = jacobian(sys, equilibrium).complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let label = label_of(&eigenvalues);
    Ok(Stability { eigenvalues, label })
}
