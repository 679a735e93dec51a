//! JSON-configured commands behind the `thdisk` binary.
//!
//! Every command reads one [`RunConfig`] document and uses the section named
//! after it. Outputs are written through temporary siblings and renamed into
//! place, so failures leave no partial results.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amplitude::{equilibrium_report, integrate_strided, NormalForm};
use crate::disk_spectrum::{mode_table, write_mode_table};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linear_stability::{
    trace_plane, write_curves_csv, InteractionPoint, LinearFamily, ModeIndex, MusselFamily, PlaneConfig, ScalarFamily,
};
use crate::mussel::Variant;
use crate::pattern::{angular_spectrum, classify, default_rings, sample_pattern, Classification, PatternSpec, Thresholds};
use crate::rd::{rotate_initial, write_output_dir, DiagnosticsConfig, FrameSet, InitialSpec, ModelConfig, PolarGrid, Simulator};

#[derive(Debug, Parser)]
#[command(name = "thdisk", version, about = "Turing-Hopf interaction on a disk")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file or directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Progress messages on stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Neumann eigenvalue table (CSV).
    Eigs,
    /// Turing/Hopf curves and interaction points.
    Trace,
    /// Delayed reaction-diffusion run (frame set).
    Simulate,
    /// Label a frame set (JSON).
    Classify,
    /// Sample a closed-form pattern (frame set).
    Reconstruct,
    /// Normal-form trajectory and equilibria.
    Nf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub n_max: usize,
    pub m_max: usize,
    pub radius: f64,
}

/// Linearised family over (p1, p2) = (d₁, τ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    MusselAlgae {
        b: f64,
        kappa: f64,
        alpha: f64,
        radius: f64,
        #[serde(default)]
        variant: Variant,
        #[serde(default)]
        nonlocal: bool,
    },
    LinearTest {
        radius: f64,
        a0: f64,
        a1: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    pub family: FamilySpec,
    pub plane: PlaneConfig,
}

fn stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalFormSection {
    pub form: NormalForm,
    /// Initial state; no trajectory is integrated when absent.
    #[serde(default)]
    pub initial: Option<Vec<f64>>,
    #[serde(default)]
    pub t_end: f64,
    #[serde(default)]
    pub dt: f64,
    #[serde(default = "stride")]
    pub stride: usize,
}

/// Uniform sample times t0, …, t1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 || !(self.t1 >= self.t0) || (self.count > 1 && self.t1 == self.t0) {
            return Err(Error::Config(format!("time grid [{}, {}] x {} is empty or degenerate", self.t0, self.t1, self.count)));
        }
        if self.count == 1 {
            return Ok(vec![self.t0]);
        }
        let h = (self.t1 - self.t0) / (self.count - 1) as f64;
        Ok((0..self.count).map(|k| self.t0 + h * k as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSection {
    pub spec: PatternSpec,
    pub grid: PolarGrid,
    pub times: TimeGrid,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub config: ModelConfig,
    pub initial: InitialSpec,
    /// Rotation of the initial history, a multiple of Δθ.
    #[serde(default)]
    pub rotate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    /// Frame-set directory.
    pub frames: PathBuf,
    /// Time window; the second half of the record when absent.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    /// Species name; the first species when absent.
    #[serde(default)]
    pub species: Option<String>,
    #[serde(default)]
    pub rings: Option<Vec<usize>>,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub thresholds: Thresholds,
}

/// One document holding the inputs of every command.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Seeds the order in which independent work items are scheduled.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub spectrum: Option<SpectrumSection>,
    #[serde(default)]
    pub stability: Option<StabilitySection>,
    #[serde(default)]
    pub normal_form: Option<NormalFormSection>,
    #[serde(default)]
    pub pattern: Option<PatternSection>,
    #[serde(default)]
    pub simulate: Option<SimulateSection>,
    #[serde(default)]
    pub classify: Option<ClassifySection>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid run configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T> {
    s.as_ref().ok_or_else(|| Error::Config(format!("configuration has no `{name}` section")))
}

fn out_path<'a>(out: Option<&'a Path>, cmd: &str) -> Result<&'a Path> {
    out.ok_or_else(|| Error::Config(format!("`{cmd}` needs --out")))
}

/// Writes a single file via a temporary sibling and a rename.
pub fn write_file_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("output path {} has no file name", path.display())))?;
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;
    let tmp = parent.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Mode table sorted by λ.
pub fn cmd_eigs(cfg: &RunConfig) -> Result<Vec<u8>> {
    let s = section(&cfg.spectrum, "spectrum")?;
    let rows = mode_table(s.n_max, s.m_max, s.radius)?;
    let mut buf = Vec::new();
    write_mode_table(&rows, &mut buf).map_err(|e| Error::io("<memory>", e))?;
    Ok(buf)
}

/// Contents of `interactions.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub interactions: Vec<InteractionPoint>,
    pub vertical_modes: Vec<ModeIndex>,
    pub turing_points: usize,
    pub hopf_points: usize,
    pub warnings: Vec<String>,
}

fn trace_with<F: LinearFamily>(family: &F, plane: &PlaneConfig, seed: u64, exec: Exec) -> Result<(Vec<u8>, TraceReport)> {
    let mut plane = plane.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    plane.modes.shuffle(&mut rng);
    let mut warnings = Vec::new();
    if plane.p1.is_empty() || plane.p2.is_empty() {
        warnings.push("empty parameter range; no curves traced".to_string());
    }
    if plane.modes.is_empty() {
        warnings.push("no modes configured".to_string());
    }
    let trace = if warnings.is_empty() {
        trace_plane(family, &plane, exec)?
    } else {
        crate::linear_stability::PlaneTrace { turing: vec![], hopf: vec![], vertical_modes: vec![], interactions: vec![] }
    };
    let mut all = trace.turing.clone();
    all.extend(trace.hopf.iter().copied());
    let mut csv = Vec::new();
    write_curves_csv(&all, &mut csv).map_err(|e| Error::io("<memory>", e))?;
    let report = TraceReport {
        turing_points: trace.turing.len(),
        hopf_points: trace.hopf.len(),
        interactions: trace.interactions,
        vertical_modes: trace.vertical_modes,
        warnings,
    };
    Ok((csv, report))
}

/// `curves.csv` contents and the interaction report.
pub fn cmd_trace(cfg: &RunConfig, exec: Exec) -> Result<(Vec<u8>, TraceReport)> {
    let s = section(&cfg.stability, "stability")?;
    match s.family {
        FamilySpec::MusselAlgae { b, kappa, alpha, radius, variant, nonlocal } => {
            let f = MusselFamily { b, kappa, alpha, radius, variant, nonlocal };
            trace_with(&f, &s.plane, cfg.seed, exec)
        }
        FamilySpec::LinearTest { radius, a0, a1 } => trace_with(&ScalarFamily { radius, a0, a1 }, &s.plane, cfg.seed, exec),
    }
}

/// Runs the `simulate` section.
pub fn cmd_simulate(cfg: &RunConfig, exec: Exec) -> Result<(FrameSet, crate::pattern::FrameDiagnostics, usize)> {
    let s = section(&cfg.simulate, "simulate")?;
    let sim = Simulator::new(&s.config, exec)?;
    let mut hist = s.initial.history(&s.config)?;
    if let Some(d) = s.rotate {
        hist = rotate_initial(&s.config.grid, &hist, d)?;
    }
    let out = sim.run(hist)?;
    Ok((out.frames, out.diagnostics, s.config.diagnostics.species))
}

/// Samples the `pattern` section.
pub fn cmd_reconstruct(cfg: &RunConfig, exec: Exec) -> Result<(FrameSet, crate::pattern::FrameDiagnostics)> {
    let s = section(&cfg.pattern, "pattern")?;
    let times = s.times.values()?;
    let frames = sample_pattern(&s.spec, &s.grid, &times, exec)?;
    let d = &s.diagnostics;
    if d.species >= frames.species.len() {
        return Err(Error::Config(format!("diagnostics species {} out of range", d.species)));
    }
    let rings = d.rings.clone().unwrap_or_else(|| default_rings(&s.grid));
    let diag = angular_spectrum(&frames, d.species, &rings, d.n_max)?;
    Ok((frames, diag))
}

/// Labels the frame set named in the `classify` section.
pub fn cmd_classify(cfg: &RunConfig) -> Result<Classification> {
    let s = section(&cfg.classify, "classify")?;
    let (frames, _) = FrameSet::read_dir(&s.frames)?;
    if frames.len() < 3 {
        return Err(Error::Config("frame set has fewer than 3 frames".into()));
    }
    let species = match &s.species {
        Some(name) => frames.species_index(name).ok_or_else(|| Error::Config(format!("unknown species `{name}`")))?,
        None => 0,
    };
    let rings = s.rings.clone().unwrap_or_else(|| default_rings(&frames.grid));
    let n_max = s.n_max.unwrap_or(8).min(frames.grid.ntheta / 2 - 1);
    let diag = angular_spectrum(&frames, species, &rings, n_max)?;
    let window = s.window.unwrap_or_else(|| {
        let (a, b) = (frames.times[0], *frames.times.last().unwrap_or(&0.0));
        [0.5 * (a + b), b]
    });
    classify(&diag, window, &s.thresholds)
}

/// Contents of the `nf` report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NfReport {
    pub form: NormalForm,
    pub equilibria: Option<crate::amplitude::EquilibriumReport>,
    pub trajectory: Option<TrajectorySummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub samples: usize,
    pub t_end: f64,
    pub final_state: Vec<f64>,
    pub negative_radius: bool,
}

/// Equilibria report plus optional trajectory CSV.
pub fn cmd_nf(cfg: &RunConfig) -> Result<(NfReport, Option<Vec<u8>>)> {
    let s = section(&cfg.normal_form, "normal_form")?;
    let equilibria = equilibrium_report(&s.form)?;
    let (trajectory, csv) = match &s.initial {
        Some(x0) => {
            let tr = integrate_strided(s.form.as_field(), x0, s.t_end, s.dt, s.stride)?;
            let mut buf = Vec::new();
            tr.write_csv(&mut buf).map_err(|e| Error::io("<memory>", e))?;
            let summary = TrajectorySummary {
                samples: tr.times.len(),
                t_end: *tr.times.last().unwrap_or(&0.0),
                final_state: tr.last().to_vec(),
                negative_radius: tr.negative_radius,
            };
            (Some(summary), Some(buf))
        }
        None => (None, None),
    };
    Ok((NfReport { form: s.form.clone(), equilibria, trajectory }, csv))
}

/// Runs `command` with `cfg`, writing results to `out`.
pub fn execute(command: Command, cfg: &RunConfig, out: Option<&Path>, verbose: bool, exec: Exec) -> Result<()> {
    let say = |msg: String| {
        if verbose {
            eprintln!("thdisk: {msg}");
        }
    };
    match command {
        Command::Eigs => {
            let bytes = cmd_eigs(cfg)?;
            let path = out_path(out, "eigs")?;
            write_file_atomic(path, &bytes)?;
            say(format!("wrote {}", path.display()));
        }
        Command::Trace => {
            let path = out_path(out, "trace")?;
            let (csv, report) = cmd_trace(cfg, exec)?;
            for w in &report.warnings {
                eprintln!("thdisk: warning: {w}");
            }
            say(format!("{} Turing, {} Hopf points, {} interactions", report.turing_points, report.hopf_points, report.interactions.len()));
            write_output_dir(path, &[("curves.csv", csv), ("interactions.json", json_bytes(&report)?)])?;
        }
        Command::Simulate => {
            let path = out_path(out, "simulate")?;
            let (frames, diag, species) = cmd_simulate(cfg, exec)?;
            say(format!("{} frames to t = {}", frames.len(), frames.times.last().unwrap_or(&0.0)));
            frames.write_dir(path, Some(&diag), species)?;
        }
        Command::Reconstruct => {
            let path = out_path(out, "reconstruct")?;
            let (frames, diag) = cmd_reconstruct(cfg, exec)?;
            let species = section(&cfg.pattern, "pattern")?.diagnostics.species;
            frames.write_dir(path, Some(&diag), species)?;
            say(format!("wrote {} frames", frames.len()));
        }
        Command::Classify => {
            let c = cmd_classify(cfg)?;
            say(format!("label {}", c.label.as_str()));
            let bytes = json_bytes(&c)?;
            match out {
                Some(p) => write_file_atomic(p, &bytes)?,
                None => print!("{}", String::from_utf8_lossy(&bytes)),
            }
        }
        Command::Nf => {
            let path = out_path(out, "nf")?;
            let (report, csv) = cmd_nf(cfg)?;
            let mut files = vec![("report.json", json_bytes(&report)?)];
            if let Some(c) = csv {
                files.push(("trajectory.csv", c));
            }
            write_output_dir(path, &files)?;
            say(format!("wrote {}", path.display()));
        }
    }
    Ok(())
}

/// Entry point; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = (|| -> Result<()> {
        let cfg = match &cli.config {
            Some(p) => RunConfig::load(p)?,
            None => return Err(Error::Config("--config is required".into())),
        };
        execute(cli.command, &cfg, cli.out.as_deref(), cli.verbose, Exec::Parallel)
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("thdisk: error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(RunConfig::from_json(r#"{"seed": 1, "bogus": 2}"#), Err(Error::Config(_))));
        assert!(RunConfig::from_json(r#"{"spectrum": {"n_max": 1, "m_max": 1, "radius": 1, "x": 0}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"spectrum": {"n_max": 1, "m_max": 1, "radius": 1}}"#).is_ok());
    }

    #[test]
    fn eigs_rows() {
        let cfg = RunConfig::from_json(r#"{"spectrum": {"n_max": 0, "m_max": 0, "radius": 6}}"#).unwrap();
        let text = String::from_utf8(cmd_eigs(&cfg).unwrap()).unwrap();
        assert_eq!(text.lines().count(), 2);
        let cfg = RunConfig::from_json(r#"{"spectrum": {"n_max": 2, "m_max": 2, "radius": 6}}"#).unwrap();
        let text = String::from_utf8(cmd_eigs(&cfg).unwrap()).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 2 * 2 + 3);
    }

    #[test]
    fn missing_section_is_config_error() {
        let e = cmd_eigs(&RunConfig::default()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn time_grid() {
        assert_eq!(TimeGrid { t0: 0.0, t1: 1.0, count: 3 }.values().unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(TimeGrid { t0: 1.0, t1: 0.0, count: 3 }.values().is_err());
    }
}
