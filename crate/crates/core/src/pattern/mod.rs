//! Closed-form pattern reconstruction and angular-spectrum classification.

mod classify;
mod spec;
mod spectrum;

pub use classify::{classify, Classification, Evidence, PatternLabel, RingEvidence, Thresholds};
pub use spec::{example_eteh_spec, sample_pattern, HomogeneousIndex, PatternKind, PatternSpec};
pub use spectrum::{angular_spectrum, default_rings, ring_spectrum, FrameDiagnostics};
