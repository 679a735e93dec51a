use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linearization::{DelayedLinearization, ModeIndex};
use crate::error::{Error, Result};

/// Newton polishing tolerance and iteration cap.
const NEWTON_TOL: f64 = 1e-13;
const NEWTON_ITERS: usize = 80;
/// Roots closer than this are merged.
pub const DEDUP_DIST: f64 = 1e-6;
/// Accepted |det| for a returned root.
pub const ROOT_RESIDUAL: f64 = 1e-9;
/// Largest τ·|Im γ| allowed in a search box.
pub const MAX_PHASE: f64 = 200.0;

/// Characteristic root of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharRoot {
    pub gamma: Complex64,
    pub mode: ModeIndex,
    pub residual: f64,
}

/// Closed rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        SearchBox {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }
}

/// Newton's method on γ ↦ det(char_matrix(γ)). Returns the root and its residual.
pub fn newton_root(
    lin: &DelayedLinearization,
    mode: ModeIndex,
    lambda: f64,
    seed: Complex64,
) -> Option<(Complex64, f64)> {
    let f = |g: Complex64| lin.char_det(mode, lambda, g);
    let mut g = seed;
    for _ in 0..NEWTON_ITERS {
        let v = f(g);
        let h = 1e-6 * (1.0 + g.norm());
        let d = (f(g + h) - f(g - h)) / (2.0 * h);
        if !d.is_finite() || d.norm() == 0.0 {
            return None;
        }
        let step = v / d;
        // Keep Newton from flying off along the exponential direction.
        let step = if step.norm() > 1.0 { step / step.norm() } else { step };
        g -= step;
        if !g.is_finite() {
            return None;
        }
        if step.norm() <= NEWTON_TOL * (1.0 + g.norm()) {
            let r = f(g).norm();
            return (r <= ROOT_RESIDUAL).then_some((g, r));
        }
    }
    let r = f(g).norm();
    (r <= ROOT_RESIDUAL).then_some((g, r))
}

/// Roots of det(char_matrix) = 0 inside `bbox`, rightmost first.
///
/// Newton is seeded from a grid over the box; the imaginary step is at most
/// π/(4τ). Roots are deduplicated, completed under conjugation and truncated
/// to `max_roots`.
pub fn rightmost_roots(
    lin: &DelayedLinearization,
    mode: ModeIndex,
    lambda: f64,
    bbox: SearchBox,
    max_roots: usize,
) -> Result<Vec<CharRoot>> {
    lin.validate()?;
    let finite = [bbox.re_min, bbox.re_max, bbox.im_min, bbox.im_max]
        .iter()
        .all(|v| v.is_finite());
    if !finite || bbox.re_min > bbox.re_max || bbox.im_min > bbox.im_max {
        return Err(Error::Domain("search box must be bounded and ordered".into()));
    }
    let im_extent = bbox.im_min.abs().max(bbox.im_max.abs());
    if lin.tau * im_extent > MAX_PHASE {
        return Err(Error::Domain(format!(
            "tau * |Im| = {} exceeds {MAX_PHASE}",
            lin.tau * im_extent
        )));
    }
    let mut im_step = 0.25f64;
    if lin.tau > 0.0 {
        im_step = im_step.min(std::f64::consts::PI / (4.0 * lin.tau));
    }
    let re_step = ((bbox.re_max - bbox.re_min) / 8.0).clamp(1e-3, 0.5);
    let n_im = ((bbox.im_max - bbox.im_min) / im_step).ceil() as usize + 1;
    let n_re = ((bbox.re_max - bbox.re_min) / re_step).ceil() as usize + 1;

    let mut found: Vec<Complex64> = Vec::new();
    let push = |g: Complex64, found: &mut Vec<Complex64>| {
        if bbox.contains(g, 1e-9) && found.iter().all(|h| (h - g).norm() > DEDUP_DIST) {
            found.push(g);
        }
    };
    for i in 0..n_re {
        let re = (bbox.re_min + i as f64 * re_step).min(bbox.re_max);
        for j in 0..n_im {
            let im = (bbox.im_min + j as f64 * im_step).min(bbox.im_max);
            if let Some((g, _)) = newton_root(lin, mode, lambda, Complex64::new(re, im)) {
                let g = if g.im.abs() < 1e-12 { Complex64::new(g.re, 0.0) } else { g };
                push(g, &mut found);
                if g.im != 0.0 {
                    push(g.conj(), &mut found);
                }
            }
        }
    }
    let mut roots: Vec<CharRoot> = found
        .into_iter()
        .map(|g| CharRoot {
            gamma: g,
            mode,
            residual: lin.char_det(mode, lambda, g).norm(),
        })
        .filter(|r| r.residual <= ROOT_RESIDUAL)
        .collect();
    roots.sort_by(|a, b| {
        b.gamma
            .re
            .total_cmp(&a.gamma.re)
            .then(b.gamma.im.total_cmp(&a.gamma.im))
    });
    roots.truncate(max_roots);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn hayes(tau: f64) -> DelayedLinearization {
        DelayedLinearization::scalar(0.0, 0.0, -1.0, tau)
    }

    #[test]
    fn undelayed_scalar_root() {
        let lin = DelayedLinearization::scalar(1.0, -1.0, 0.0, 0.0);
        let roots = rightmost_roots(&lin, ModeIndex::new(1, 1), 2.0, SearchBox::new(-5.0, 5.0, -1.0, 1.0), 4).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].gamma - Complex64::new(-3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn hayes_roots_on_axis() {
        let roots = rightmost_roots(&hayes(FRAC_PI_2), ModeIndex::new(0, 1), 0.0, SearchBox::new(-2.0, 1.0, -3.0, 3.0), 6).unwrap();
        assert!(roots[0].gamma.re.abs() < 1e-10);
        assert!((roots[0].gamma.im.abs() - 1.0).abs() < 1e-10);
        assert!((roots[1].gamma - roots[0].gamma.conj()).norm() < 1e-10);
    }

    #[test]
    fn hayes_stable_before_crossing() {
        let roots = rightmost_roots(&hayes(FRAC_PI_2 - 0.1), ModeIndex::new(0, 1), 0.0, SearchBox::new(-2.0, 1.0, -3.0, 3.0), 6).unwrap();
        assert!(roots[0].gamma.re < 0.0);
        let roots = rightmost_roots(&hayes(FRAC_PI_2 + 0.1), ModeIndex::new(0, 1), 0.0, SearchBox::new(-2.0, 1.0, -3.0, 3.0), 6).unwrap();
        assert!(roots[0].gamma.re > 0.0);
    }

    #[test]
    fn roots_are_conjugate_closed() {
        let roots = rightmost_roots(&hayes(3.0), ModeIndex::new(0, 1), 0.0, SearchBox::new(-1.5, 1.0, -6.0, 6.0), 50).unwrap();
        for r in &roots {
            assert!(r.residual <= ROOT_RESIDUAL);
            assert!(roots.iter().any(|s| (s.gamma - r.gamma.conj()).norm() < DEDUP_DIST));
        }
    }

    #[test]
    fn phase_sanity_limit() {
        let err = rightmost_roots(&hayes(100.0), ModeIndex::new(0, 1), 0.0, SearchBox::new(-1.0, 1.0, -3.0, 3.0), 4);
        assert!(matches!(err, Err(Error::Domain(_))));
    }
}
