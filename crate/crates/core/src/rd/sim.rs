use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::frames::FrameSet;
use super::grid::PolarGrid;
use super::model::{ModelConfig, ModelKind};
use super::ops::{laplacian_ring, nonlocal_average, PoleFilter};
use crate::disk_spectrum::{make_mode, ModeKind};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::mussel::Kinetics;
use crate::pattern::{default_rings, FrameDiagnostics};

/// Largest magnitude accepted before a run is declared blown up.
pub const BLOW_UP: f64 = 1e6;

/// Snapshots at t − τ, t − τ + dt, …, t (K + 1 entries), each species-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryBuffer {
    snapshots: VecDeque<Vec<f64>>,
}

impl HistoryBuffer {
    pub fn new(snapshots: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = snapshots.first() else {
            return Err(Error::Config("history needs at least one snapshot".into()));
        };
        let len = first.len();
        if let Some(bad) = snapshots.iter().find(|s| s.len() != len) {
            return Err(Error::DimensionMismatch { expected: len, got: bad.len() });
        }
        Ok(HistoryBuffer { snapshots: snapshots.into() })
    }

    /// Samples `f(t, r, θ)` at t = −K·dt, …, 0.
    pub fn sample<F>(cfg: &ModelConfig, f: F) -> Result<Self>
    where
        F: Fn(f64, f64, f64) -> Vec<f64>,
    {
        let k = cfg.delay_steps()?;
        let g = &cfg.grid;
        let ns = cfg.model.species().len();
        let mut snaps = Vec::with_capacity(k + 1);
        for s in 0..=k {
            let t = -((k - s) as f64) * cfg.dt;
            let mut data = vec![0.0; ns * g.len()];
            for i in 0..g.nr {
                for j in 0..g.ntheta {
                    let v = f(t, g.r(i), g.theta(j));
                    if v.len() != ns {
                        return Err(Error::DimensionMismatch { expected: ns, got: v.len() });
                    }
                    for (sp, x) in v.into_iter().enumerate() {
                        data[sp * g.len() + g.index(i, j)] = x;
                    }
                }
            }
            snaps.push(data);
        }
        HistoryBuffer::new(snaps)
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Snapshot at t − τ.
    pub fn delayed(&self) -> &[f64] {
        &self.snapshots[0]
    }

    /// Snapshot `k` steps after t − τ.
    pub fn get(&self, k: usize) -> &[f64] {
        &self.snapshots[k]
    }

    pub fn current(&self) -> &[f64] {
        self.snapshots.back().map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Appends the new state and drops the oldest snapshot.
    pub fn advance(&mut self, state: Vec<f64>) {
        self.snapshots.push_back(state);
        self.snapshots.pop_front();
    }
}

/// Angular profile of a perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Angular {
    Cos,
    Sin,
    One,
}

impl Angular {
    fn eval(self, theta: f64) -> f64 {
        match self {
            Angular::Cos => theta.cos(),
            Angular::Sin => theta.sin(),
            Angular::One => 1.0,
        }
    }
}

fn amp() -> f64 {
    0.01
}

/// Initial history on [−τ, 0], added to the homogeneous equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// amplitude·cos t·cos r·Θ_s(θ) on species s.
    Perturbed {
        #[serde(default = "amp")]
        amplitude: f64,
        angular: Vec<Angular>,
    },
    /// amplitude·φ̂_{n,m}(r, θ) (real cosine branch) on every species, constant in t.
    Mode { n: usize, m: usize, amplitude: f64 },
    /// Constant offsets per species.
    Constant { values: Vec<f64> },
}

impl InitialSpec {
    pub fn history(&self, cfg: &ModelConfig) -> Result<HistoryBuffer> {
        let base = cfg.equilibrium()?;
        let ns = base.len();
        match self {
            InitialSpec::Perturbed { amplitude, angular } => {
                if angular.len() != ns {
                    return Err(Error::Config(format!("initial angular profiles: expected {ns}, got {}", angular.len())));
                }
                HistoryBuffer::sample(cfg, |t, r, th| {
                    (0..ns).map(|s| base[s] + amplitude * t.cos() * r.cos() * angular[s].eval(th)).collect()
                })
            }
            InitialSpec::Mode { n, m, amplitude } => {
                let mode = make_mode(*n, *m, cfg.grid.radius, ModeKind::Cosine)?;
                HistoryBuffer::sample(cfg, |_, r, th| {
                    let v = mode.eval_real(r, th).unwrap_or(0.0);
                    base.iter().map(|b| b + amplitude * v).collect()
                })
            }
            InitialSpec::Constant { values } => {
                if values.len() != ns {
                    return Err(Error::Config(format!("initial values: expected {ns}, got {}", values.len())));
                }
                HistoryBuffer::sample(cfg, |_, _, _| base.iter().zip(values).map(|(b, v)| b + v).collect())
            }
        }
    }
}

/// Rotates every snapshot by `delta_theta`, which must be a multiple of Δθ.
pub fn rotate_initial(grid: &PolarGrid, history: &HistoryBuffer, delta_theta: f64) -> Result<HistoryBuffer> {
    let q = delta_theta / grid.dtheta();
    let k = q.round();
    if (q - k).abs() > 1e-9 * k.abs().max(1.0) {
        return Err(Error::Domain(format!("rotation {delta_theta} is not a multiple of dtheta = {}", grid.dtheta())));
    }
    let nt = grid.ntheta as i64;
    let shift = (k as i64).rem_euclid(nt) as usize;
    let snaps = history
        .snapshots
        .iter()
        .map(|s| {
            let mut out = vec![0.0; s.len()];
            for (row_in, row_out) in s.chunks(grid.ntheta).zip(out.chunks_mut(grid.ntheta)) {
                for j in 0..grid.ntheta {
                    row_out[(j + shift) % grid.ntheta] = row_in[j];
                }
            }
            out
        })
        .collect();
    HistoryBuffer::new(snaps)
}

/// Frames plus angular diagnostics of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub frames: FrameSet,
    pub diagnostics: FrameDiagnostics,
}

/// Explicit RK2 integrator for a [`ModelConfig`].
pub struct Simulator {
    cfg: ModelConfig,
    kin: Kinetics,
    diffusion: Vec<f64>,
    filter: Option<PoleFilter>,
    exec: Exec,
}

impl Simulator {
    pub fn new(cfg: &ModelConfig, exec: Exec) -> Result<Self> {
        cfg.validate()?;
        Ok(Simulator {
            cfg: cfg.clone(),
            kin: cfg.kinetics(),
            diffusion: cfg.diffusion(),
            filter: cfg.pole_filter.then(|| PoleFilter::new(&cfg.grid)),
            exec,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    /// Right-hand side at state `u` with delayed state `ud`.
    pub fn rhs(&self, u: &[f64], ud: &[f64]) -> Vec<f64> {
        let g = &self.cfg.grid;
        let n = g.len();
        let nt = g.ntheta;
        let nr = g.nr;
        let p = &self.cfg.params;
        let model = self.cfg.model;
        let a_hat = (model == ModelKind::MusselAlgaeNonlocal).then(|| nonlocal_average(g, &u[n..2 * n]));
        let mut out = vec![0.0; u.len()];
        self.exec.for_each_chunk(&mut out, nt, |c, row| {
            let (s, i) = (c / nr, c % nr);
            let field = &u[s * n..(s + 1) * n];
            laplacian_ring(g, field, i, row);
            let d = self.diffusion[s];
            let off = s * n + i * nt;
            for (j, v) in row.iter_mut().enumerate() {
                let k = off + j;
                let diff = d * *v;
                *v = match (model, s) {
                    (ModelKind::LinearTest, _) => diff + p.a0 * u[k] + p.a1 * ud[k],
                    (_, 0) => diff + self.kin.mussel_rate(u[k], ud[k + n], ud[k]),
                    (_, _) => {
                        let m = u[k - n];
                        diff + self.kin.algae_rate(m, u[k], a_hat.unwrap_or(u[k]))
                    }
                };
            }
        });
        out
    }

    fn filter(&self, u: &mut [f64]) {
        if let Some(f) = &self.filter {
            for s in u.chunks_mut(self.cfg.grid.len()) {
                f.apply(s, self.exec);
            }
        }
    }

    /// One RK2 (midpoint) step. The stage-2 delayed state is the average of the
    /// snapshots at t − τ and t − τ + dt; with τ = 0 the stage state itself.
    pub fn step(&self, hist: &HistoryBuffer) -> Vec<f64> {
        let dt = self.cfg.dt;
        let u = hist.current();
        let delayed = hist.len() > 1;
        let k1 = self.rhs(u, if delayed { hist.delayed() } else { u });
        let mut mid: Vec<f64> = u.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect();
        self.filter(&mut mid);
        let k2 = if delayed {
            let avg: Vec<f64> = hist.get(0).iter().zip(hist.get(1)).map(|(a, b)| 0.5 * (a + b)).collect();
            self.rhs(&mid, &avg)
        } else {
            self.rhs(&mid, &mid)
        };
        let mut next: Vec<f64> = u.iter().zip(&k2).map(|(a, b)| a + dt * b).collect();
        self.filter(&mut next);
        next
    }

    /// Integrates from `history` over ⌈t_end/dt⌉ steps, recording t = 0 and every
    /// `record_every` steps.
    pub fn run(&self, mut hist: HistoryBuffer) -> Result<RunOutput> {
        let cfg = &self.cfg;
        let g = cfg.grid;
        let k = cfg.delay_steps()?;
        if hist.len() != k + 1 {
            return Err(Error::DimensionMismatch { expected: k + 1, got: hist.len() });
        }
        let ns = cfg.model.species().len();
        if hist.current().len() != ns * g.len() {
            return Err(Error::DimensionMismatch { expected: ns * g.len(), got: hist.current().len() });
        }
        let steps = cfg.steps();
        let params = serde_json::to_value(cfg)?;
        let mut frames = FrameSet::new(g, cfg.model.as_str(), params, cfg.model.species());
        let rings = cfg.diagnostics.rings.clone().unwrap_or_else(|| default_rings(&g));
        let mut diag = FrameDiagnostics::new(rings, cfg.diagnostics.n_max);
        let sp = cfg.diagnostics.species;
        let mut record = |t: f64, u: &[f64]| -> Result<()> {
            diag.record(&g, t, &u[sp * g.len()..(sp + 1) * g.len()]);
            frames.push(t, u.to_vec())
        };
        record(0.0, hist.current())?;
        for s in 1..=steps {
            let next = self.step(&hist);
            let t = s as f64 * cfg.dt;
            if let Some(bad) = next.iter().find(|v| !v.is_finite() || v.abs() > BLOW_UP) {
                return Err(if bad.is_finite() {
                    Error::BlowUp { time: t }
                } else {
                    Error::NonFinite { time: t, last_finite: hist.current().to_vec() }
                });
            }
            hist.advance(next);
            if s % cfg.record_every == 0 {
                record(t, hist.current())?;
            }
        }
        Ok(RunOutput { frames, diagnostics: diag })
    }
}

/// Builds the history from `init` and runs `cfg`.
pub fn run(cfg: &ModelConfig, init: &InitialSpec, exec: Exec) -> Result<RunOutput> {
    let sim = Simulator::new(cfg, exec)?;
    sim.run(init.history(cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mussel::Variant;
    use crate::rd::{DiagnosticsConfig, ModelParams};

    fn linear(grid: PolarGrid, dt: f64, t_end: f64, params: ModelParams) -> ModelConfig {
        ModelConfig {
            model: ModelKind::LinearTest,
            params,
            variant: Variant::MatchedEquilibrium,
            grid,
            dt,
            t_end,
            record_every: 1,
            pole_filter: true,
            diagnostics: DiagnosticsConfig { species: 0, rings: None, n_max: 2 },
        }
    }

    fn heat(d1: f64) -> ModelParams {
        ModelParams { b: 0.0, kappa: 1.0, alpha: 0.0, d1, tau: 0.0, a0: 0.0, a1: 0.0 }
    }

    #[test]
    fn history_buffer_shifts() {
        let mut h = HistoryBuffer::new(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(h.delayed(), &[0.0]);
        assert_eq!(h.current(), &[2.0]);
        h.advance(vec![3.0]);
        assert_eq!((h.len(), h.delayed(), h.get(1), h.current()), (3, &[1.0][..], &[2.0][..], &[3.0][..]));
        assert!(HistoryBuffer::new(vec![]).is_err());
        assert!(HistoryBuffer::new(vec![vec![0.0], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn history_spans_the_delay() {
        let mut cfg = linear(PolarGrid::new(1.0, 4, 8).unwrap(), 0.1, 1.0, heat(1.0));
        cfg.params.tau = 0.5;
        let h = HistoryBuffer::sample(&cfg, |t, _, _| vec![t]).unwrap();
        assert_eq!(h.len(), 6);
        assert!((h.delayed()[0] + 0.5).abs() < 1e-12);
        assert_eq!(h.current()[0], 0.0);
    }

    #[test]
    fn rotation_by_zero_and_full_turn() {
        let g = PolarGrid::new(1.0, 4, 16).unwrap();
        let cfg = linear(g, 0.01, 0.1, heat(1.0));
        let h = HistoryBuffer::sample(&cfg, |_, r, th| vec![r * (th + 0.3).cos()]).unwrap();
        assert_eq!(rotate_initial(&g, &h, 0.0).unwrap(), h);
        assert_eq!(rotate_initial(&g, &h, 2.0 * std::f64::consts::PI).unwrap(), h);
        let one = rotate_initial(&g, &h, g.dtheta()).unwrap();
        assert_eq!(one.current()[1], h.current()[0]);
        assert!(rotate_initial(&g, &h, 0.5 * g.dtheta()).is_err());
    }

    #[test]
    fn heat_mode_decays_at_its_eigenvalue() {
        let g = PolarGrid::new(6.0, 48, 96).unwrap();
        let lambda = (1.8411837813406593f64 / 6.0).powi(2);
        let t_end = 1.0 / lambda;
        let mut cfg = linear(g, 0.003, t_end, heat(1.0));
        cfg.record_every = cfg.steps();
        let out = run(&cfg, &InitialSpec::Mode { n: 1, m: 1, amplitude: 1.0 }, Exec::Parallel).unwrap();
        let t = *out.frames.times.last().unwrap();
        // Ratio at the cell with the largest initial value.
        let f0 = out.frames.field(0, 0);
        let k = (0..f0.len()).fold(0, |b, k| if f0[k].abs() > f0[b].abs() { k } else { b });
        let ratio = out.frames.field(1, 0)[k] / f0[k];
        assert!((ratio / (-lambda * t).exp() - 1.0).abs() < 0.02, "{ratio}");
    }

    #[test]
    fn homogeneous_history_stays_homogeneous() {
        let g = PolarGrid::new(6.0, 8, 16).unwrap();
        let cfg = ModelConfig {
            model: ModelKind::MusselAlgaeNonlocal,
            params: ModelParams { b: 1.5, kappa: 1.0, alpha: 0.3, d1: 0.036, tau: 0.3, a0: 0.0, a1: 0.0 },
            ..linear(g, 0.01, 3.0, heat(0.036))
        };
        let out = run(&cfg, &InitialSpec::Constant { values: vec![0.02, -0.01] }, Exec::Sequential).unwrap();
        for k in 0..out.frames.len() {
            for s in 0..2 {
                let f = out.frames.field(k, s);
                let spread = f.iter().fold(0.0f64, |a, v| a.max((v - f[0]).abs()));
                assert!(spread < 1e-12, "{spread}");
            }
        }
    }

    #[test]
    fn blow_up_is_reported_with_time() {
        let g = PolarGrid::new(1.0, 4, 8).unwrap();
        let params = ModelParams { a0: 50.0, ..heat(0.1) };
        let cfg = linear(g, 0.01, 1.0, params);
        match run(&cfg, &InitialSpec::Constant { values: vec![1.0] }, Exec::Sequential) {
            Err(Error::BlowUp { time }) => assert!(time > 0.2 && time < 0.35, "{time}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn records_every_stride() {
        let g = PolarGrid::new(1.0, 4, 8).unwrap();
        let mut cfg = linear(g, 0.01, 0.1, heat(0.1));
        cfg.record_every = 5;
        let out = run(&cfg, &InitialSpec::Constant { values: vec![1.0] }, Exec::Sequential).unwrap();
        assert_eq!(out.frames.len(), 3);
        assert_eq!(out.diagnostics.len(), 3);
        assert!((out.frames.times[2] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn mismatched_history_is_rejected() {
        let g = PolarGrid::new(1.0, 4, 8).unwrap();
        let mut cfg = linear(g, 0.01, 0.1, heat(0.1));
        cfg.params.tau = 0.05;
        let sim = Simulator::new(&cfg, Exec::Sequential).unwrap();
        let short = HistoryBuffer::new(vec![vec![0.0; g.len()]; 2]).unwrap();
        assert!(matches!(sim.run(short), Err(Error::DimensionMismatch { .. })));
    }
}
