use serde::{Deserialize, Serialize};

use super::systems::VectorField;
use crate::error::{Error, Result};

/// Fixed-step RK4 output sampled every `stride` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Some radius coordinate went negative at a recorded sample.
    pub negative_radius: bool,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Writes `t,x0,x1,…` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        let dim = self.states.first().map_or(0, Vec::len);
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((0..dim).map(|k| format!("x{k}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (t, x) in self.times.iter().zip(&self.states) {
            write!(out, "{t:e}")?;
            for v in x {
                write!(out, ",{v:e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// One classical RK4 step.
pub fn rk4_step(sys: &dyn VectorField, x: &mut [f64], dt: f64, work: &mut [Vec<f64>; 5]) {
    let n = x.len();
    let [k1, k2, k3, k4, tmp] = work;
    sys.eval(x, k1);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * dt * k1[i];
    }
    sys.eval(tmp, k2);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * dt * k2[i];
    }
    sys.eval(tmp, k3);
    for i in 0..n {
        tmp[i] = x[i] + dt * k3[i];
    }
    sys.eval(tmp, k4);
    for i in 0..n {
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// RK4 from `state0` over [0, t_end] with step `dt`, recording every step.
pub fn integrate(sys: &dyn VectorField, state0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_strided(sys, state0, t_end, dt, 1)
}

/// As [`integrate`], recording every `stride`-th step and the final state.
pub fn integrate_strided(
    sys: &dyn VectorField,
    state0: &[f64],
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    let n = sys.dim();
    if state0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: state0.len() });
    }
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) || stride == 0 {
        return Err(Error::Domain(format!("need dt > 0, t_end >= 0, stride >= 1 (dt = {dt}, t_end = {t_end})")));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let mask = sys.radius_mask();
    let mut x = state0.to_vec();
    let mut work: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x.clone()],
        negative_radius: false,
    };
    let check_radius = |x: &[f64]| x.iter().zip(&mask).any(|(v, &m)| m && *v < 0.0);
    traj.negative_radius = check_radius(&x);
    for s in 1..=steps {
        let prev = x.clone();
        rk4_step(sys, &mut x, dt, &mut work);
        let t = s as f64 * dt;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { time: t, last_finite: prev });
        }
        if s % stride == 0 || s == steps {
            traj.negative_radius |= check_radius(&x);
            traj.times.push(t);
            traj.states.push(x.clone());
        }
    }
    Ok(traj)
}
