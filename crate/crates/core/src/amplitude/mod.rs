//! Truncated amplitude equations for Turing–Hopf interactions on the disk:
//! the polar ET-EH, ET-H and T-EH systems, the planar ET-H reduction and the
//! six-dimensional complex ET-EH system with optional resonant terms.

mod equilibria;
mod integrate;
mod planar;
mod stability;
mod systems;

pub use equilibria::{equilibria_eteh, equilibria_eth, equilibria_teh, Equilibrium, EquilibriumSet, Omission};
pub use integrate::{integrate, integrate_strided, rk4_step, Trajectory};
pub use planar::{planar_reduction, PlanarReduction};
pub use stability::{jacobian, label_of, stability, Stability, StabilityLabel, CENTER_TOL, EQUILIBRIUM_RESIDUAL};
pub use systems::{
    from_complex, to_complex, vector_field, ComplexSix, EthPlanar, EthPolar, EtehPolar, NormalForm, Pairing,
    ResonantTerms, TehPolar, VectorField,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Equilibrium with its stability, as written to reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedEquilibrium {
    pub class_id: String,
    pub state: Vec<f64>,
    pub is_continuum: bool,
    pub constraint: Option<String>,
    pub eigenvalues: Vec<[f64; 2]>,
    pub label: StabilityLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub equilibria: Vec<ClassifiedEquilibrium>,
    pub omitted: Vec<Omission>,
}

/// Closed-form equilibria of a polar system with numerical stability labels.
/// `None` for systems without closed forms (planar, complex).
pub fn equilibrium_report(nf: &NormalForm) -> Result<Option<EquilibriumReport>> {
    let set = match nf {
        NormalForm::EtehPolar(s) => equilibria_eteh(s),
        NormalForm::EthPolar(s) => equilibria_eth(s),
        NormalForm::TehPolar(s) => equilibria_teh(s),
        NormalForm::EthPlanar(_) | NormalForm::ComplexSix(_) => return Ok(None),
    };
    let sys = nf.as_field();
    let mut equilibria = Vec::with_capacity(set.found.len());
    for e in set.found {
        let st = stability(sys, &e.state)?;
        equilibria.push(ClassifiedEquilibrium {
            class_id: e.class_id,
            state: e.state,
            is_continuum: e.is_continuum,
            constraint: e.constraint,
            eigenvalues: st.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
            label: st.label,
        });
    }
    Ok(Some(EquilibriumReport { equilibria, omitted: set.omitted }))
}
