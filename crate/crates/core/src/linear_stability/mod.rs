//! Characteristic roots of delayed, optionally nonlocal, linearisations on the
//! disk, Turing/Hopf curve tracing in a two-parameter plane and classification
//! of their crossings.

mod curves;
mod interactions;
mod linearization;
mod matrix;
mod roots;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use curves::{
    crossing, hopf_curve, hopf_point, turing_curve, BifurcationKind, BifurcationPoint, Crossing,
    HopfScan, Sampling, TuringTrace, POINT_RESIDUAL, VERTICAL_TOL,
};
pub use interactions::{classify_interaction, detect_interactions, InteractionClass, InteractionPoint};
pub use linearization::{
    mussel_algae_linearization, DelayedLinearization, LinearFamily, ModeIndex, MusselFamily,
    MusselParams, ScalarFamily,
};
pub use matrix::CMatrix;
pub use roots::{newton_root, rightmost_roots, CharRoot, SearchBox, DEDUP_DIST, MAX_PHASE, ROOT_RESIDUAL};

use crate::error::Result;
use crate::exec::Exec;

/// Modes with n ≤ `n_max`, m ≤ `m_max` in (n, m) order; n ≥ 1 starts at m = 1.
pub fn mode_list(n_max: usize, m_max: usize) -> Vec<ModeIndex> {
    let mut out = Vec::new();
    for n in 0..=n_max {
        let start = if n == 0 { 0 } else { 1 };
        for m in start..=m_max {
            out.push(ModeIndex::new(n, m));
        }
    }
    out
}

/// Scan settings for [`trace_plane`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneConfig {
    pub modes: Vec<ModeIndex>,
    pub p1: Sampling,
    pub p2: Sampling,
    #[serde(default)]
    pub hopf_scan: HopfScan,
    /// Interaction tolerance (Δp1, Δp2).
    pub tol: [f64; 2],
}

/// Curves of all modes and their interactions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneTrace {
    pub turing: Vec<BifurcationPoint>,
    pub hopf: Vec<BifurcationPoint>,
    /// Modes whose Turing locus did not depend on p2.
    pub vertical_modes: Vec<ModeIndex>,
    pub interactions: Vec<InteractionPoint>,
}

/// Turing and Hopf curves for every configured mode, modes processed under
/// `exec`; output is sorted by (mode, branch, p1, p2) regardless of scheduling.
pub fn trace_plane<F: LinearFamily>(family: &F, cfg: &PlaneConfig, exec: Exec) -> Result<PlaneTrace> {
    let per_mode = exec.map(cfg.modes.len(), |i| -> Result<(TuringTrace, Vec<BifurcationPoint>)> {
        let mode = cfg.modes[i];
        let tr = if mode.is_constant() {
            TuringTrace { points: Vec::new(), p1_spread: 0.0, vertical: false }
        } else {
            turing_curve(family, mode, cfg.p1, cfg.p2)?
        };
        let hopf = hopf_curve(family, mode, cfg.p1, cfg.p2.hi, &cfg.hopf_scan)?;
        Ok((tr, hopf))
    });
    let mut turing = Vec::new();
    let mut hopf = Vec::new();
    let mut vertical_modes = Vec::new();
    for (mode, r) in cfg.modes.iter().zip(per_mode) {
        let (tr, h) = r?;
        if tr.vertical {
            vertical_modes.push(*mode);
        }
        turing.extend(tr.points);
        hopf.extend(h);
    }
    let key = |a: &BifurcationPoint, b: &BifurcationPoint| {
        a.mode
            .cmp(&b.mode)
            .then(a.branch.cmp(&b.branch))
            .then(a.p1.total_cmp(&b.p1))
            .then(a.p2.total_cmp(&b.p2))
    };
    turing.sort_by(key);
    hopf.sort_by(key);
    vertical_modes.sort();
    let interactions = detect_interactions(&turing, &hopf, cfg.tol)?;
    Ok(PlaneTrace { turing, hopf, vertical_modes, interactions })
}

/// Writes `kind,n,m,p1,p2,omega` rows.
pub fn write_curves_csv<W: Write>(points: &[BifurcationPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "kind,n,m,p1,p2,omega")?;
    for p in points {
        writeln!(out, "{},{},{},{:e},{:e},{:e}", p.kind.as_str(), p.mode.n, p.mode.m, p.p1, p.p2, p.omega)?;
    }
    Ok(())
}
