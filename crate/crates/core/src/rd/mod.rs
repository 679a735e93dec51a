//! Delayed reaction–diffusion simulator on a cell-centred polar grid.

mod frames;
mod grid;
mod model;
mod ops;
mod sim;

pub use frames::{write_output_dir, DiagnosticsInfo, FrameSet, Manifest, DIAGNOSTICS, FORMAT, LAYOUT, MANIFEST, OUTPUT_MARKERS};
pub use grid::PolarGrid;
pub use model::{DiagnosticsConfig, ModelConfig, ModelKind, ModelParams, STABILITY_MARGIN};
pub use ops::{boundary_flux, laplacian, laplacian_ring, nonlocal_average, PoleFilter};
pub use sim::{rotate_initial, run, Angular, HistoryBuffer, InitialSpec, RunOutput, Simulator, BLOW_UP};
