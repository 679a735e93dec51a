use serde::{Deserialize, Serialize};

use super::systems::{EthPolar, EtehPolar, TehPolar};

/// Relative tolerance for the coincidence conditions of degenerate classes.
const COINCIDENCE_TOL: f64 = 1e-12;

/// One closed-form equilibrium (or the representative of a continuum).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub class_id: String,
    pub state: Vec<f64>,
    pub is_continuum: bool,
    pub constraint: Option<String>,
}

/// A class that does not exist for the given coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Omission {
    pub class_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub found: Vec<Equilibrium>,
    pub omitted: Vec<Omission>,
}

impl EquilibriumSet {
    fn point(&mut self, id: &str, state: Vec<f64>) {
        self.found.push(Equilibrium { class_id: id.into(), state, is_continuum: false, constraint: None });
    }

    fn continuum(&mut self, id: &str, state: Vec<f64>, constraint: String) {
        self.found.push(Equilibrium { class_id: id.into(), state, is_continuum: true, constraint: Some(constraint) });
    }

    fn omit(&mut self, id: &str, reason: impl Into<String>) {
        self.omitted.push(Omission { class_id: id.into(), reason: reason.into() });
    }

    pub fn of_class<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Equilibrium> + 'a {
        self.found.iter().filter(move |e| e.class_id == id)
    }
}

/// `num/den` when it is positive, otherwise the reason it is not.
fn positive_ratio(num: f64, den: f64) -> Result<f64, String> {
    if den == 0.0 {
        return Err("degenerate: zero denominator".into());
    }
    let v = num / den;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("radicand {v:e} is not positive"))
    }
}

/// Product ρ_T1ρ_T2 from the first usable linear relation `num/den`.
fn product(rows: &[(f64, f64)]) -> Result<f64, String> {
    for &(num, den) in rows {
        if den != 0.0 {
            return positive_ratio(num, den).map_err(|_| format!("product {:e} is not positive", num / den));
        }
    }
    Err("degenerate: product undetermined".into())
}

fn coincide(a_num: f64, a_den: f64, b_num: f64, b_den: f64) -> bool {
    let lhs = a_num * b_den;
    let rhs = b_num * a_den;
    (lhs - rhs).abs() <= COINCIDENCE_TOL * (lhs.abs() + rhs.abs()).max(f64::MIN_POSITIVE)
}

/// Equilibrium classes i–viii of the polar ET-EH system.
///
/// Continua ρ_T1ρ_T2 = P are represented by ρ_T1 = ρ_T2 = √P.
pub fn equilibria_eteh(s: &EtehPolar) -> EquilibriumSet {
    let mut out = EquilibriumSet::default();
    out.point("i", vec![0.0; 4]);

    match product(&[(-s.eps2, s.c23)]) {
        Ok(p) => out.continuum("ii", vec![0.0, 0.0, p.sqrt(), p.sqrt()], format!("rho_T1*rho_T2 = {p:e}")),
        Err(r) => out.omit("ii", r),
    }
    match positive_ratio(-s.eps1, s.c11) {
        Ok(r2) => {
            out.point("iii", vec![0.0, r2.sqrt(), 0.0, 0.0]);
            out.point("iv", vec![r2.sqrt(), 0.0, 0.0, 0.0]);
        }
        Err(r) => {
            out.omit("iii", r.clone());
            out.omit("iv", r);
        }
    }
    match positive_ratio(-s.eps1, s.c11 + s.c12) {
        Ok(r2) => out.point("v", vec![r2.sqrt(), r2.sqrt(), 0.0, 0.0]),
        Err(r) => out.omit("v", r),
    }

    // vi and vii: one Hopf radius with the Turing product.
    for (id, cross, slot) in [("vi", s.c22, 1usize), ("vii", s.c21, 0usize)] {
        let num = s.c13 * s.eps2 - s.c23 * s.eps1;
        let den = s.c23 * s.c11 - s.c13 * cross;
        match positive_ratio(num, den).and_then(|r2| {
            product(&[(-(s.eps1 + s.c11 * r2), s.c13), (-(s.eps2 + cross * r2), s.c23)]).map(|p| (r2, p))
        }) {
            Ok((r2, p)) => {
                let mut x = vec![0.0, 0.0, p.sqrt(), p.sqrt()];
                x[slot] = r2.sqrt();
                out.continuum(id, x, format!("rho_T1*rho_T2 = {p:e}"));
            }
            Err(r) => out.omit(id, r),
        }
        if s.c11 != 0.0 && cross != 0.0 && coincide(s.eps1, s.c11, s.eps2, cross) {
            if let Ok(r2) = positive_ratio(-s.eps1, s.c11) {
                for free in [2usize, 3] {
                    let mut x = vec![0.0; 4];
                    x[slot] = r2.sqrt();
                    x[free] = 1.0;
                    let name = if free == 2 { "rho_T2 = 0, rho_T1 free" } else { "rho_T1 = 0, rho_T2 free" };
                    out.continuum(id, x, name.into());
                }
            }
        }
    }

    let (h_sum, t_sum) = (s.c11 + s.c12, s.c21 + s.c22);
    let num = s.c13 * s.eps2 - s.c23 * s.eps1;
    let den = s.c23 * h_sum - s.c13 * t_sum;
    match positive_ratio(num, den).and_then(|r2| {
        product(&[(-(s.eps1 + h_sum * r2), s.c13), (-(s.eps2 + t_sum * r2), s.c23)]).map(|p| (r2, p))
    }) {
        Ok((r2, p)) => out.continuum(
            "viii",
            vec![r2.sqrt(), r2.sqrt(), p.sqrt(), p.sqrt()],
            format!("rho_T1*rho_T2 = {p:e}"),
        ),
        Err(r) => out.omit("viii", r),
    }
    if h_sum != 0.0 && t_sum != 0.0 && coincide(s.eps1, h_sum, s.eps2, t_sum) {
        if let Ok(r2) = positive_ratio(-s.eps1, h_sum) {
            for free in [2usize, 3] {
                let mut x = vec![r2.sqrt(), r2.sqrt(), 0.0, 0.0];
                x[free] = 1.0;
                let name = if free == 2 { "rho_T2 = 0, rho_T1 free" } else { "rho_T1 = 0, rho_T2 free" };
                out.continuum("viii", x, name.into());
            }
        }
    }
    out
}

/// The five equilibrium classes of the polar ET-H system.
pub fn equilibria_eth(s: &EthPolar) -> EquilibriumSet {
    let mut out = EquilibriumSet::default();
    out.point("origin", vec![0.0; 3]);
    let hopf = positive_ratio(-s.alpha1, s.a11);
    match &hopf {
        Ok(r2) => out.point("hopf", vec![r2.sqrt(), 0.0, 0.0]),
        Err(r) => out.omit("hopf", r.clone()),
    }
    match product(&[(-s.alpha2, s.a21)]) {
        Ok(p) => out.continuum("turing", vec![0.0, p.sqrt(), p.sqrt()], format!("rho_T1*rho_T2 = {p:e}")),
        Err(r) => out.omit("turing", r),
    }
    let num = s.a12 * s.alpha2 - s.a21 * s.alpha1;
    let den = s.a11 * s.a21 - s.a12 * s.a22;
    match positive_ratio(num, den).and_then(|r2| {
        product(&[(s.alpha1 + s.a11 * r2, -s.a12), (-(s.alpha2 + s.a22 * r2), s.a21)]).map(|p| (r2, p))
    }) {
        Ok((r2, p)) => out.continuum(
            "breathing",
            vec![r2.sqrt(), p.sqrt(), p.sqrt()],
            format!("rho_T1*rho_T2 = {p:e}"),
        ),
        Err(r) => out.omit("breathing", r),
    }
    match hopf {
        Ok(r2) if s.a22 != 0.0 && coincide(s.alpha1, s.a11, s.alpha2, s.a22) => {
            out.continuum("mixed_axis", vec![r2.sqrt(), 1.0, 0.0], "rho_T2 = 0, rho_T1 free".into());
        }
        _ => out.omit("mixed_axis", "requires alpha1/a11 = alpha2/a22"),
    }
    out
}

/// Real roots of a·x² + b·x + c, written (−b ± √(b² − 4ac))/(2a).
fn quadratic(a: f64, b: f64, c: f64) -> Result<Vec<f64>, String> {
    if a == 0.0 {
        if b == 0.0 {
            return Err("degenerate: constant relation".into());
        }
        return Ok(vec![-c / b]);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(format!("discriminant {disc:e} is negative"));
    }
    let sq = disc.sqrt();
    // Cancellation-free pair of roots.
    let q = -0.5 * (b + b.signum() * sq);
    let mut roots = if q == 0.0 { vec![0.0] } else { vec![q / a, c / q] };
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    Ok(roots)
}

/// Equilibria of the polar T-EH system (at most twelve).
///
/// The mixed classes solve a quadratic in ρ_T. With
/// B₁ = b₂₂b₁₃ − b₁₁b₂₃, B₂ = b₁b₂₂ − b₂b₁₁, B₃ = b₂₂β₁ − b₁₁β₂ (and b₂₁ in
/// place of b₂₂ for the opposite rotation), ρ_T = (−B₂ ± √(B₂² − 4B₁B₃))/(2B₁).
pub fn equilibria_teh(s: &TehPolar) -> EquilibriumSet {
    let mut out = EquilibriumSet::default();
    out.point("origin", vec![0.0; 3]);
    match quadratic(s.b23, s.b2, s.beta2) {
        Ok(roots) => {
            for t in roots.into_iter().filter(|t| *t != 0.0) {
                out.point("turing", vec![0.0, 0.0, t]);
            }
        }
        Err(r) => out.omit("turing", r),
    }
    match positive_ratio(-s.beta1, s.b11) {
        Ok(r2) => {
            out.point("rotating_h2", vec![0.0, r2.sqrt(), 0.0]);
            out.point("rotating_h1", vec![r2.sqrt(), 0.0, 0.0]);
        }
        Err(r) => {
            out.omit("rotating_h2", r.clone());
            out.omit("rotating_h1", r);
        }
    }
    match positive_ratio(-s.beta1, s.b11 + s.b12) {
        Ok(r2) => out.point("standing", vec![r2.sqrt(), r2.sqrt(), 0.0]),
        Err(r) => out.omit("standing", r),
    }
    // (class, ρ_H² coefficient, Turing-row coefficient of the active ρ_H², active slots)
    let cases: [(&str, f64, f64, &[usize]); 3] = [
        ("mixed_h2", s.b11, s.b22, &[1]),
        ("mixed_h1", s.b11, s.b21, &[0]),
        ("mixed_standing", s.b11 + s.b12, s.b21 + s.b22, &[0, 1]),
    ];
    for (id, h, t, slots) in cases {
        let quad = t * s.b13 - h * s.b23;
        let lin = t * s.b1 - h * s.b2;
        let cst = t * s.beta1 - h * s.beta2;
        match quadratic(quad, lin, cst) {
            Ok(roots) => {
                let mut any = false;
                for rt in roots {
                    match positive_ratio(s.beta1 + s.b1 * rt + s.b13 * rt * rt, -h) {
                        Ok(r2) => {
                            let mut x = vec![0.0, 0.0, rt];
                            for &k in slots {
                                x[k] = r2.sqrt();
                            }
                            out.point(id, x);
                            any = true;
                        }
                        Err(r) => out.omit(id, format!("root rho_T = {rt:e}: {r}")),
                    }
                }
                if !any && out.omitted.iter().all(|o| o.class_id != id) {
                    out.omit(id, "no admissible root");
                }
            }
            Err(r) => out.omit(id, r),
        }
    }
    out
}
