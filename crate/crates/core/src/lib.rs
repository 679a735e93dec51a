//! Numerical laboratory for Turing–Hopf interaction on a disk.
//!
//! * [`disk_spectrum`]: Neumann eigenpairs of the disk Laplacian.
//! * [`linear_stability`]: characteristic roots of delayed linearisations,
//!   Turing/Hopf curve tracing and interaction classification.
//! * [`amplitude`]: truncated normal forms, their equilibria and stability.
//! * [`pattern`]: closed-form pattern reconstruction and frame classification.
//! * [`rd`]: delayed (optionally nonlocal) reaction–diffusion simulator on a polar grid.
//! * [`cli`]: JSON-configured commands shared by the `thdisk` binary.

pub mod amplitude;
pub mod cli;
pub mod disk_spectrum;
pub mod error;
pub mod exec;
pub mod linear_stability;
pub mod mussel;
pub mod pattern;
pub mod rd;

pub use error::{Error, Result};
pub use exec::Exec;
