//! Forward solver for the three-wave equations on a uniform grid.
//!
//! Strang splitting: half-step transport of each mode along its characteristic, one step
//! of the pointwise coupling ODE `eps q_j' = i eta_j conj(q_k) conj(q_l)`, half-step transport.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{cyclic, FieldGrid, GridSpec, ModelParams, Packet};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Transport {
    /// First-order upwind with copy (outflow) boundaries.
    #[default]
    Upwind,
    /// Exact Fourier shift on a zero-padded periodic extension; conserves L² to round-off.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    #[default]
    ExplicitMidpoint,
    /// Conserves every quadratic invariant of the coupling ODE exactly (up to the
    /// fixed-point tolerance).
    ImplicitMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub transport: Transport,
    pub coupling: Coupling,
    /// `max |q|` above which the run is declared blown up.
    pub blowup_threshold: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { transport: Transport::Upwind, coupling: Coupling::ExplicitMidpoint, blowup_threshold: 1e8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub params: ModelParams,
    pub x_min: f64,
    pub h: f64,
    pub nx: usize,
    pub t: f64,
    pub q: [Vec<Complex64>; 3],
}

impl SimState {
    /// State from samples on `x_min + i h`.
    pub fn from_samples(params: ModelParams, x_min: f64, h: f64, t: f64, q: [Vec<Complex64>; 3]) -> Result<Self> {
        params.validate()?;
        let nx = q[0].len();
        if nx < 2 || q.iter().any(|v| v.len() != nx) || !(h > 0.0) {
            return Err(Error::InvalidGrid("simulator state needs three equal sequences of ≥ 2 samples and h > 0".into()));
        }
        let s = Self { params, x_min, h, nx, t, q };
        s.check_finite()?;
        Ok(s)
    }

    /// Time slice `it` of a field grid.
    pub fn from_grid_slice(grid: &FieldGrid, it: usize) -> Result<Self> {
        let q = [0, 1, 2].map(|j| grid.slice(j, it).to_vec());
        Self::from_samples(grid.params, grid.spec.x_min, grid.spec.hx(), grid.spec.t(it), q)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.nx - 1)
    }

    /// `∫|q_j|² dx` by the trapezoidal rule.
    pub fn mass(&self, mode: usize) -> f64 {
        let v = &self.q[mode];
        let s: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        (s - 0.5 * (v[0].norm_sqr() + v[self.nx - 1].norm_sqr())) * self.h
    }

    fn check_finite(&self) -> Result<()> {
        if self.q.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(format!("simulator state at t = {}", self.t)))
        }
    }
}

/// Samples the packet envelopes; the grid must leave `max|c| (t_max - t_min)` of room
/// around every support.
pub fn initialize(packets: &[Packet], params: ModelParams, spec: GridSpec) -> Result<SimState> {
    spec.validate()?;
    params.validate()?;
    for (i, a) in packets.iter().enumerate() {
        a.validate(f64::INFINITY)?;
        if packets[i + 1..].iter().any(|b| b.mode == a.mode) {
            return Err(Error::DuplicateMode(a.mode));
        }
    }
    let margin = params.max_speed() * (spec.t_max - spec.t_min);
    for p in packets {
        let (l, r) = p.support();
        if l - margin < spec.x_min || r + margin > spec.x_max {
            return Err(Error::Margin(format!(
                "packet of mode {} on [{l}, {r}] needs margin {margin} inside [{}, {}]",
                p.mode, spec.x_min, spec.x_max
            )));
        }
    }
    let mut q = [vec![ZERO; spec.nx], vec![ZERO; spec.nx], vec![ZERO; spec.nx]];
    for p in packets {
        for (i, v) in q[p.mode_index()].iter_mut().enumerate() {
            *v = Complex64::new(p.envelope(spec.x(i)), 0.0);
        }
    }
    SimState::from_samples(params, spec.x_min, spec.hx(), spec.t_min, q)
}

/// Stepper with its scheme choice and cached FFT plans.
pub struct Simulator {
    pub options: SimOptions,
    fft: Option<(usize, Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
}

impl Simulator {
    pub fn new(options: SimOptions) -> Self {
        Self { options, fft: None }
    }

    /// One Strang step of size `dt`.
    pub fn step(&mut self, s: &mut SimState, dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParams(format!("time step must be positive, got {dt}")));
        }
        let cfl = s.params.max_speed() * dt / s.h;
        if cfl > 1.0 + 1e-12 {
            return Err(Error::Cfl(cfl));
        }
        self.transport(s, 0.5 * dt);
        self.couple(s, dt);
        self.transport(s, 0.5 * dt);
        s.t += dt;
        s.check_finite().map_err(|_| Error::BlowUp(s.t))?;
        let peak = s.q.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        if peak > self.options.blowup_threshold {
            return Err(Error::BlowUp(s.t));
        }
        Ok(())
    }

    fn transport(&mut self, s: &mut SimState, tau: f64) {
        match self.options.transport {
            Transport::Upwind => {
                for j in 0..3 {
                    upwind(&mut s.q[j], s.params.speeds[j] * tau / s.h);
                }
            }
            Transport::Spectral => {
                let n = (2 * s.nx).next_power_of_two();
                if self.fft.as_ref().map(|f| f.0) != Some(n) {
                    let mut planner = FftPlanner::new();
                    self.fft = Some((n, planner.plan_fft_forward(n), planner.plan_fft_inverse(n)));
                }
                let (_, fwd, inv) = self.fft.as_ref().expect("planned above");
                for j in 0..3 {
                    let c = s.params.speeds[j];
                    if c != 0.0 {
                        spectral_shift(&mut s.q[j], c * tau / s.h, n, fwd.as_ref(), inv.as_ref());
                    }
                }
            }
        }
    }

    fn couple(&self, s: &mut SimState, dt: f64) {
        let eps = s.params.epsilon;
        let eta = [0, 1, 2].map(|j| s.params.eta(j));
        let rhs = |q: [Complex64; 3]| {
            [0, 1, 2].map(|j| {
                let (k, l) = cyclic(j);
                Complex64::i() * eta[j] * (q[k] * q[l]).conj() / eps
            })
        };
        let implicit = self.options.coupling == Coupling::ImplicitMidpoint;
        for i in 0..s.nx {
            let q0 = [s.q[0][i], s.q[1][i], s.q[2][i]];
            if q0.iter().filter(|z| **z != ZERO).count() < 2 {
                continue;
            }
            let f0 = rhs(q0);
            let mut mid = [0, 1, 2].map(|j| q0[j] + f0[j] * (0.5 * dt));
            if implicit {
                for _ in 0..100 {
                    let f = rhs(mid);
                    let next = [0, 1, 2].map(|j| q0[j] + f[j] * (0.5 * dt));
                    let change = (0..3).map(|j| (next[j] - mid[j]).norm()).fold(0.0, f64::max);
                    mid = next;
                    if change <= 1e-15 * (1.0 + mid.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
                        break;
                    }
                }
                for j in 0..3 {
                    s.q[j][i] = mid[j] * 2.0 - q0[j];
                }
            } else {
                let f = rhs(mid);
                for j in 0..3 {
                    s.q[j][i] = q0[j] + f[j] * dt;
                }
            }
        }
    }

    /// Snapshots at each requested time (ascending, none before `s.t`), stepping with
    /// `dt = cfl h / max|c|` and shortening the step that would pass a snapshot.
    pub fn run(&mut self, s: &SimState, times: &[f64], cfl: f64) -> Result<Vec<SimState>> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::Cfl(cfl));
        }
        if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < s.t) {
            return Err(Error::InvalidParams("snapshot times must be ascending and not before the state".into()));
        }
        let speed = s.params.max_speed();
        let dt_max = if speed > 0.0 { cfl * s.h / speed } else { f64::INFINITY };
        let mut cur = s.clone();
        let mut out = Vec::with_capacity(times.len());
        for &target in times {
            while target - cur.t > 1e-12 * (1.0 + target.abs()) {
                let dt = dt_max.min(target - cur.t);
                // avoid a sliver step right before the snapshot
                let dt = if target - cur.t - dt < 1e-3 * dt_max { target - cur.t } else { dt };
                self.step(&mut cur, dt)?;
            }
            cur.t = target;
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// Runs from `s` and records the slices of `spec` (whose x-grid must match the state).
    pub fn run_to_grid(&mut self, s: &SimState, spec: GridSpec, cfl: f64) -> Result<FieldGrid> {
        spec.validate()?;
        if spec.nx != s.nx || (spec.x_min - s.x_min).abs() > 1e-12 || (spec.hx() - s.h).abs() > 1e-12 * s.h {
            return Err(Error::InvalidGrid("output grid does not match the simulator grid".into()));
        }
        let times: Vec<f64> = (0..spec.nt).map(|it| spec.t(it)).collect();
        let snaps = self.run(s, &times, cfl)?;
        let mut g = FieldGrid::zeros(spec, s.params)?;
        for (it, snap) in snaps.iter().enumerate() {
            for j in 0..3 {
                g.q[j][it * spec.nx..(it + 1) * spec.nx].copy_from_slice(&snap.q[j]);
            }
        }
        Ok(g)
    }
}

/// Default-scheme step.
pub fn step(s: &mut SimState, dt: f64) -> Result<()> {
    Simulator::new(SimOptions::default()).step(s, dt)
}

/// Default-scheme run.
pub fn run(s: &SimState, times: &[f64], cfl: f64) -> Result<Vec<SimState>> {
    Simulator::new(SimOptions::default()).run(s, times, cfl)
}

/// `q_i <- q_i - nu (q_i - q_{i-1})` for `nu > 0`, mirrored for `nu < 0`; ghost cells copy the edge.
fn upwind(q: &mut [Complex64], nu: f64) {
    let n = q.len();
    if nu > 0.0 {
        for i in (1..n).rev() {
            q[i] = q[i] - (q[i] - q[i - 1]) * nu;
        }
    } else if nu < 0.0 {
        for i in 0..n - 1 {
            q[i] = q[i] - (q[i + 1] - q[i]) * nu;
        }
    }
}

/// Translates samples by `shift` grid cells (to the right for positive shift).
fn spectral_shift(q: &mut [Complex64], shift: f64, n: usize, fwd: &dyn Fft<f64>, inv: &dyn Fft<f64>) {
    let nx = q.len();
    let mut buf = vec![ZERO; n];
    buf[..nx].copy_from_slice(q);
    fwd.process(&mut buf);
    for (m, v) in buf.iter_mut().enumerate() {
        let k = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
        let theta = if 2 * m == n { 0.0 } else { -2.0 * std::f64::consts::PI * k * shift / n as f64 };
        *v *= Complex64::from_polar(1.0 / n as f64, theta);
    }
    inv.process(&mut buf);
    q.copy_from_slice(&buf[..nx]);
}
