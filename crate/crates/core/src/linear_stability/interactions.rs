use serde::{Deserialize, Serialize};

use super::curves::{BifurcationKind, BifurcationPoint};
use super::linearization::ModeIndex;
use crate::error::{Error, Result};

/// Turing–Hopf interaction types with a nonzero-wavenumber mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InteractionClass {
    /// Equivariant Turing, ordinary Hopf.
    #[serde(rename = "ET-H")]
    EtH,
    /// Ordinary Turing, equivariant Hopf.
    #[serde(rename = "T-EH")]
    TEh,
    /// Equivariant Turing, equivariant Hopf.
    #[serde(rename = "ET-EH")]
    EtEh,
}

impl InteractionClass {
    /// Real dimension of the center space.
    pub fn center_dim(self) -> usize {
        match self {
            InteractionClass::EtH => 4,
            InteractionClass::TEh => 5,
            InteractionClass::EtEh => 6,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InteractionClass::EtH => "ET-H",
            InteractionClass::TEh => "T-EH",
            InteractionClass::EtEh => "ET-EH",
        }
    }
}

/// Classification from the angular indices of the Turing and Hopf modes.
///
/// A constant Turing mode, or two modes with n = 0, are rejected.
pub fn classify_interaction(turing: ModeIndex, hopf: ModeIndex) -> Result<InteractionClass> {
    if turing.is_constant() {
        return Err(Error::InvalidMode {
            n: turing.n,
            m: turing.m,
            reason: "a Turing mode cannot be the constant mode".into(),
        });
    }
    match (turing.n, hopf.n) {
        (0, 0) => Err(Error::Domain(
            "both modes have n = 0; no equivariant interaction".into(),
        )),
        (_, 0) => Ok(InteractionClass::EtH),
        (0, _) => Ok(InteractionClass::TEh),
        _ => Ok(InteractionClass::EtEh),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionPoint {
    pub p1: f64,
    pub p2: f64,
    pub turing_mode: ModeIndex,
    pub hopf_mode: ModeIndex,
    pub classification: InteractionClass,
    pub dim: usize,
    /// Hopf frequency interpolated at the crossing.
    pub omega: f64,
    /// Another interaction lies within tolerance of this one.
    pub ambiguous: bool,
}

#[derive(Clone, Copy)]
struct Node {
    x: f64,
    y: f64,
    omega: f64,
}

fn polylines(points: &[BifurcationPoint], kind: BifurcationKind) -> Vec<(ModeIndex, Vec<Node>)> {
    let mut keys: Vec<(ModeIndex, usize)> = points
        .iter()
        .filter(|p| p.kind == kind)
        .map(|p| (p.mode, p.branch))
        .collect();
    keys.sort();
    keys.dedup();
    let mut out = Vec::new();
    for (mode, branch) in keys {
        let mut nodes: Vec<&BifurcationPoint> = points
            .iter()
            .filter(|p| p.kind == kind && p.mode == mode && p.branch == branch)
            .collect();
        match kind {
            BifurcationKind::Turing => nodes.sort_by(|a, b| a.p2.total_cmp(&b.p2)),
            BifurcationKind::Hopf => nodes.sort_by(|a, b| a.p1.total_cmp(&b.p1)),
        }
        // A jump in frequency marks a switch to another root family.
        let mut line: Vec<Node> = Vec::new();
        for p in nodes {
            if let Some(last) = line.last() {
                let scale = last.omega.abs().max(p.omega.abs());
                if scale > 0.0 && (last.omega - p.omega).abs() > 0.1 * scale {
                    out.push((mode, std::mem::take(&mut line)));
                }
            }
            line.push(Node { x: p.p1, y: p.p2, omega: p.omega });
        }
        if !line.is_empty() {
            out.push((mode, line));
        }
    }
    out
}

fn segments(line: &[Node]) -> Vec<(Node, Node)> {
    if line.len() == 1 {
        return vec![(line[0], line[0])];
    }
    line.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Closest point pair between two segments in scaled coordinates; returns
/// (distance, parameter on a, parameter on b).
fn closest(a: (Node, Node), b: (Node, Node), s: [f64; 2]) -> (f64, f64, f64) {
    let p = |n: Node| [n.x / s[0], n.y / s[1]];
    let (a0, a1, b0, b1) = (p(a.0), p(a.1), p(b.0), p(b.1));
    let da = [a1[0] - a0[0], a1[1] - a0[1]];
    let db = [b1[0] - b0[0], b1[1] - b0[1]];
    let cross = da[0] * db[1] - da[1] * db[0];
    let w = [b0[0] - a0[0], b0[1] - a0[1]];
    if cross != 0.0 {
        let t = (w[0] * db[1] - w[1] * db[0]) / cross;
        let u = (w[0] * da[1] - w[1] * da[0]) / cross;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            return (0.0, t, u);
        }
    }
    let proj = |q: [f64; 2], o: [f64; 2], d: [f64; 2]| {
        let l = d[0] * d[0] + d[1] * d[1];
        let t = if l == 0.0 {
            0.0
        } else {
            (((q[0] - o[0]) * d[0] + (q[1] - o[1]) * d[1]) / l).clamp(0.0, 1.0)
        };
        let c = [o[0] + t * d[0] - q[0], o[1] + t * d[1] - q[1]];
        (c[0].hypot(c[1]), t)
    };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for (d, t, u) in [
        { let (d, u) = proj(a0, b0, db); (d, 0.0, u) },
        { let (d, u) = proj(a1, b0, db); (d, 1.0, u) },
        { let (d, t) = proj(b0, a0, da); (d, t, 0.0) },
        { let (d, t) = proj(b1, a0, da); (d, t, 1.0) },
    ] {
        if d < best.0 {
            best = (d, t, u);
        }
    }
    best
}

fn lerp(a: Node, b: Node, t: f64) -> Node {
    Node {
        x: a.x + t * (b.x - a.x),
        y: a.y + t * (b.y - a.y),
        omega: a.omega + t * (b.omega - a.omega),
    }
}

/// Crossings of Turing and Hopf curves.
///
/// Points of one (mode, branch) are joined into polylines; a pair of curves
/// interacts where their closest approach is within `tol` = (Δp1, Δp2), taken
/// as the axes of a unit ellipse. Pairs outside the classification table are
/// skipped. Interactions within tolerance of each other are flagged ambiguous.
pub fn detect_interactions(
    turing: &[BifurcationPoint],
    hopf: &[BifurcationPoint],
    tol: [f64; 2],
) -> Result<Vec<InteractionPoint>> {
    if !(tol[0] > 0.0 && tol[1] > 0.0) {
        return Err(Error::Domain("interaction tolerance must be positive".into()));
    }
    let tl = polylines(turing, BifurcationKind::Turing);
    let hl = polylines(hopf, BifurcationKind::Hopf);
    let mut out = Vec::new();
    for (tm, tline) in &tl {
        for (hm, hline) in &hl {
            let Ok(class) = classify_interaction(*tm, *hm) else {
                continue;
            };
            let mut best: Option<(f64, Node, Node)> = None;
            for sa in segments(tline) {
                for sb in segments(hline) {
                    let (d, t, u) = closest(sa, sb, tol);
                    if d <= 1.0 && best.map_or(true, |b| d < b.0) {
                        best = Some((d, lerp(sa.0, sa.1, t), lerp(sb.0, sb.1, u)));
                    }
                }
            }
            if let Some((_, a, b)) = best {
                out.push(InteractionPoint {
                    p1: 0.5 * (a.x + b.x),
                    p2: 0.5 * (a.y + b.y),
                    turing_mode: *tm,
                    hopf_mode: *hm,
                    classification: class,
                    dim: class.center_dim(),
                    omega: b.omega,
                    ambiguous: false,
                });
            }
        }
    }
    let near = |a: &InteractionPoint, b: &InteractionPoint| {
        ((a.p1 - b.p1) / tol[0]).hypot((a.p2 - b.p2) / tol[1]) <= 1.0
    };
    for i in 0..out.len() {
        for j in 0..out.len() {
            if i != j && near(&out[i], &out[j]) {
                out[i].ambiguous = true;
            }
        }
    }
    out.sort_by(|a, b| {
        a.p1.total_cmp(&b.p1)
            .then(a.p2.total_cmp(&b.p2))
            .then(a.turing_mode.cmp(&b.turing_mode))
            .then(a.hopf_mode.cmp(&b.hopf_mode))
    });
    Ok(out)
}
