//! Model convention, packets, field grids and model-level diagnostics.
//!
//! The system is
//!
//! ```text
//! eps (d_t + c_j d_x) q_j = i eta_j conj(q_k) conj(q_l),   (j, k, l) cyclic,
//! ```
//!
//! with speeds `c1 > c2 > c3` and signs `eta_j = ±1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-14;
const LOBE_SAMPLES: usize = 1024;

/// Cyclic partner indices `(k, l)` of zero-based mode `j`.
pub fn cyclic(j: usize) -> (usize, usize) {
    ((j + 1) % 3, (j + 2) % 3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub epsilon: f64,
    #[serde(default = "default_speeds")]
    pub speeds: [f64; 3],
    #[serde(default = "default_couplings")]
    pub couplings: [i8; 3],
}

fn default_speeds() -> [f64; 3] {
    [1.0, 0.0, -1.0]
}

fn default_couplings() -> [i8; 3] {
    [1, -1, 1]
}

impl ModelParams {
    pub fn new(epsilon: f64, speeds: [f64; 3], couplings: [i8; 3]) -> Result<Self> {
        let p = Self { epsilon, speeds, couplings };
        p.validate()?;
        Ok(p)
    }

    /// Default speeds `(1, 0, -1)` and the non-explosive signs `(+1, -1, +1)`.
    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, default_speeds(), default_couplings())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParams(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        let [c1, c2, c3] = self.speeds;
        if !(c1 > c2 && c2 > c3) || self.speeds.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "speeds must be distinct and ordered c1 > c2 > c3, got {:?}",
                self.speeds
            )));
        }
        if self.couplings.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidParams(format!("coupling signs must be ±1, got {:?}", self.couplings)));
        }
        Ok(())
    }

    pub fn eta(&self, j: usize) -> f64 {
        f64::from(self.couplings[j])
    }

    pub fn max_speed(&self) -> f64 {
        self.speeds.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Constants of the 3×3 Lax pair matched to these parameters.
    pub fn lax(&self) -> Result<LaxPair> {
        LaxPair::new(self)
    }
}

/// Constants of the Lax pair `eps v_x = (-i lambda A + Q) v`, `eps v_t = (-i lambda B + P) v`.
///
/// `A = diag(c)`, `B_jj = c_k c_l`, and `Q_kl = g_j q_j`, `Q_lk = -conj(Q_kl)` for each
/// cyclic `(j, k, l)`. Mode `j` therefore lives in the 2×2 block on rows `(k, l)`, where
/// it reduces to a focusing Zakharov–Shabat problem with spectral parameter
/// `zeta = kappa_j lambda` and semiclassical parameter `eps / rho_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaxPair {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub rho: [f64; 3],
    /// Common unit phase of the potential couplings `g_j = omega rho_j`.
    pub omega: Complex64,
    pub epsilon: f64,
}

impl LaxPair {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let c = params.speeds;
        let mut b = [0.0; 3];
        let mut d = [0.0; 3];
        for j in 0..3 {
            let (k, l) = cyclic(j);
            b[j] = c[k] * c[l];
            d[j] = c[k] - c[l];
        }
        let mut rho = [0.0; 3];
        for j in 0..3 {
            let (k, l) = cyclic(j);
            rho[j] = 1.0 / (d[k] * d[l]).abs().sqrt();
        }
        let eta_prod: f64 = (0..3).map(|j| params.eta(j)).product();
        let kappa = -eta_prod;
        // i omega^3 = kappa
        let omega = if kappa > 0.0 { Complex64::i() } else { -Complex64::i() };
        // every block must be focusing: sign(kappa eta_j d_j) = +1
        if (0..3).any(|j| kappa * params.eta(j) * d[j] <= 0.0) {
            return Err(Error::UnsupportedCoupling(params.couplings));
        }
        Ok(Self { a: c, b, rho, omega, epsilon: params.epsilon })
    }

    pub fn block(&self, mode: usize) -> (usize, usize) {
        cyclic(mode)
    }

    pub fn coupling(&self, mode: usize) -> Complex64 {
        self.omega * self.rho[mode]
    }

    /// `zeta = kappa * lambda` for the block of `mode`.
    pub fn kappa(&self, mode: usize) -> f64 {
        let (k, l) = cyclic(mode);
        (self.a[k] - self.a[l]) / (2.0 * self.rho[mode])
    }

    /// Semiclassical parameter of the Zakharov–Shabat problem seen by `mode`.
    pub fn zs_epsilon(&self, mode: usize) -> f64 {
        self.epsilon / self.rho[mode]
    }

    /// Potential matrix at one point from the three field values.
    pub fn potential(&self, q: [Complex64; 3]) -> [[Complex64; 3]; 3] {
        let mut m = [[Complex64::new(0.0, 0.0); 3]; 3];
        for (j, qj) in q.iter().enumerate() {
            let (k, l) = cyclic(j);
            let v = self.coupling(j) * qj;
            m[k][l] = v;
            m[l][k] = -v.conj();
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Shape {
    Sech,
    Gaussian,
    /// Profile sampled at increasing abscissae `u` (in units of the width, relative to
    /// the center); interpolated by monotone cubic Hermite and zero outside the table.
    Tabulated { u: Vec<f64>, values: Vec<f64> },
}

impl Shape {
    /// Unit-peak profile.
    pub fn profile(&self, u: f64) -> f64 {
        match self {
            Shape::Sech => 1.0 / u.cosh(),
            Shape::Gaussian => (-u * u).exp(),
            Shape::Tabulated { u: us, values } => pchip(us, values, u) / values.iter().cloned().fold(0.0, f64::max),
        }
    }

    pub(crate) fn default_halfwidth(&self, tol: f64) -> f64 {
        match self {
            Shape::Sech => (1.0 / tol).acosh(),
            Shape::Gaussian => (1.0 / tol).ln().sqrt(),
            Shape::Tabulated { u, .. } => u.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        }
    }
}

fn pchip(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n < 2 || x < xs[0] || x > xs[n - 1] {
        return 0.0;
    }
    let i = match xs.partition_point(|&v| v <= x) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    };
    let slope = |i: usize| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    let deriv = |i: usize| -> f64 {
        if i == 0 {
            slope(0)
        } else if i == n - 1 {
            slope(n - 2)
        } else {
            let (s0, s1) = (slope(i - 1), slope(i));
            if s0 * s1 <= 0.0 {
                0.0
            } else {
                let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
                let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                (w1 + w2) / (w1 / s0 + w2 / s1)
            }
        }
    };
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let (d0, d1) = (deriv(i), deriv(i + 1));
    let t2 = t * t;
    let t3 = t2 * t;
    ys[i] * (2.0 * t3 - 3.0 * t2 + 1.0) + h * d0 * (t3 - 2.0 * t2 + t) + ys[i + 1] * (-2.0 * t3 + 3.0 * t2) + h * d1 * (t3 - t2)
}

/// One localized real envelope `A * shape((x - x0) / w)` assigned to a single mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Packet {
    /// One-based mode index.
    pub mode: usize,
    pub shape: Shape,
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    /// Truncation radius; the envelope is exactly zero beyond it.
    pub support_halfwidth: f64,
}

impl Packet {
    pub fn new(mode: usize, shape: Shape, amplitude: f64, width: f64, center: f64) -> Result<Self> {
        let l = width * shape.default_halfwidth(DEFAULT_TRUNCATION_TOL);
        Self::with_support(mode, shape, amplitude, width, center, l, DEFAULT_TRUNCATION_TOL)
    }

    pub fn sech(mode: usize, amplitude: f64, width: f64, center: f64) -> Result<Self> {
        Self::new(mode, Shape::Sech, amplitude, width, center)
    }

    pub fn gaussian(mode: usize, amplitude: f64, width: f64, center: f64) -> Result<Self> {
        Self::new(mode, Shape::Gaussian, amplitude, width, center)
    }

    /// Packet with an explicit truncation radius, checked against `truncation_tol`
    /// (relative to peak amplitude).
    pub fn with_support(
        mode: usize,
        shape: Shape,
        amplitude: f64,
        width: f64,
        center: f64,
        support_halfwidth: f64,
        truncation_tol: f64,
    ) -> Result<Self> {
        let p = Self { mode, shape, amplitude, width, center, support_halfwidth };
        p.validate(truncation_tol)?;
        Ok(p)
    }

    pub fn validate(&self, truncation_tol: f64) -> Result<()> {
        if !(1..=3).contains(&self.mode) {
            return Err(Error::InvalidPacket(format!("mode must be 1, 2 or 3, got {}", self.mode)));
        }
        for (name, v) in [("amplitude", self.amplitude), ("width", self.width), ("support_halfwidth", self.support_halfwidth)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidPacket(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.center.is_finite() {
            return Err(Error::InvalidPacket("center must be finite".into()));
        }
        if let Shape::Tabulated { u, values } = &self.shape {
            if u.len() < 3 || u.len() != values.len() || u.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidPacket("tabulated shape needs ≥ 3 strictly increasing abscissae with matching values".into()));
            }
            if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || values.iter().all(|v| *v == 0.0) {
                return Err(Error::InvalidPacket("tabulated values must be finite, nonnegative and not all zero".into()));
            }
        }
        let edge = self.shape.profile(self.support_halfwidth / self.width);
        let edge = edge.max(self.shape.profile(-self.support_halfwidth / self.width));
        if edge > truncation_tol {
            return Err(Error::InvalidPacket(format!(
                "envelope at the truncation radius is {edge:e} of peak, above tolerance {truncation_tol:e}"
            )));
        }
        self.check_single_lobe()
    }

    fn check_single_lobe(&self) -> Result<()> {
        let l = self.support_halfwidth;
        let xs: Vec<f64> = (0..LOBE_SAMPLES).map(|i| -l + 2.0 * l * i as f64 / (LOBE_SAMPLES - 1) as f64).collect();
        let v: Vec<f64> = xs.iter().map(|&x| self.shape.profile(x / self.width)).collect();
        let peak = v.iter().cloned().fold(0.0, f64::max);
        let tol = 1e-12 * peak;
        // after the first strict descent no strict ascent may follow
        let mut descending = false;
        for w in v.windows(2) {
            if w[1] < w[0] - tol {
                descending = true;
            } else if descending && w[1] > w[0] + tol {
                return Err(Error::InvalidPacket("envelope is not single-lobe".into()));
            }
        }
        Ok(())
    }

    pub fn mode_index(&self) -> usize {
        self.mode - 1
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.support_halfwidth, self.center + self.support_halfwidth)
    }

    pub fn envelope(&self, x: f64) -> f64 {
        let u = x - self.center;
        if u.abs() > self.support_halfwidth {
            0.0
        } else {
            self.amplitude * self.shape.profile(u / self.width)
        }
    }

    /// The same packet translated to the origin.
    pub fn centered(&self) -> Packet {
        Packet { center: 0.0, ..self.clone() }
    }
}

/// `∫ envelope dx` over the truncated support.
pub fn packet_mass(p: &Packet) -> f64 {
    let (a, b) = p.support();
    let c = p.center;
    // split at the peak region for the adaptive rule
    let f = |x: f64| p.envelope(x);
    quad::integrate(f, a, c, 0.0, 1e-12) + quad::integrate(f, c, b, 0.0, 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.nt < 1 {
            return Err(Error::InvalidGrid(format!("need nx ≥ 2 and nt ≥ 1, got {} × {}", self.nx, self.nt)));
        }
        if !(self.x_max > self.x_min) {
            return Err(Error::InvalidGrid("x_max must exceed x_min".into()));
        }
        if self.nt == 1 && self.t_max != self.t_min {
            return Err(Error::InvalidGrid("a single time slice needs t_min == t_max".into()));
        }
        if self.nt > 1 && !(self.t_max > self.t_min) {
            return Err(Error::InvalidGrid("t_max must exceed t_min".into()));
        }
        Ok(())
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn ht(&self) -> f64 {
        if self.nt > 1 {
            (self.t_max - self.t_min) / (self.nt - 1) as f64
        } else {
            0.0
        }
    }

    pub fn x(&self, ix: usize) -> f64 {
        if ix == self.nx - 1 {
            self.x_max
        } else {
            self.x_min + ix as f64 * self.hx()
        }
    }

    pub fn t(&self, it: usize) -> f64 {
        if self.nt > 1 && it == self.nt - 1 {
            self.t_max
        } else {
            self.t_min + it as f64 * self.ht()
        }
    }
}

/// Sampled `q1, q2, q3` on an `nt × nx` grid, stored t-major (`it * nx + ix`).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub spec: GridSpec,
    pub q: [Vec<Complex64>; 3],
    pub params: ModelParams,
}

impl FieldGrid {
    pub fn zeros(spec: GridSpec, params: ModelParams) -> Result<Self> {
        spec.validate()?;
        let n = spec.nx * spec.nt;
        let z = vec![Complex64::new(0.0, 0.0); n];
        Ok(Self { spec, q: [z.clone(), z.clone(), z], params })
    }

    pub fn from_fn<F>(spec: GridSpec, params: ModelParams, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> [Complex64; 3],
    {
        let mut g = Self::zeros(spec, params)?;
        for it in 0..spec.nt {
            for ix in 0..spec.nx {
                let v = f(spec.x(ix), spec.t(it));
                for j in 0..3 {
                    g.q[j][it * spec.nx + ix] = v[j];
                }
            }
        }
        Ok(g)
    }

    pub fn at(&self, mode: usize, it: usize, ix: usize) -> Complex64 {
        self.q[mode][it * self.spec.nx + ix]
    }

    pub fn slice(&self, mode: usize, it: usize) -> &[Complex64] {
        let nx = self.spec.nx;
        &self.q[mode][it * nx..(it + 1) * nx]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max: [f64; 3],
    pub l2: [f64; 3],
    pub interior_points: usize,
}

/// Norms of `eps (d_t + c_j d_x) q_j - i eta_j conj(q_k) conj(q_l)` on interior points,
/// with second-order centered differences.
pub fn residual_norm(grid: &FieldGrid) -> Result<ResidualReport> {
    let s = grid.spec;
    if s.nx < 3 || s.nt < 3 {
        return Err(Error::InvalidGrid(format!("residual needs nx, nt ≥ 3, got {} × {}", s.nx, s.nt)));
    }
    if grid.q.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("field grid".into()));
    }
    let (hx, ht) = (s.hx(), s.ht());
    let p = &grid.params;
    let mut max = [0.0f64; 3];
    let mut sq = [0.0f64; 3];
    for it in 1..s.nt - 1 {
        for ix in 1..s.nx - 1 {
            for j in 0..3 {
                let (k, l) = cyclic(j);
                let dt = (grid.at(j, it + 1, ix) - grid.at(j, it - 1, ix)) / (2.0 * ht);
                let dx = (grid.at(j, it, ix + 1) - grid.at(j, it, ix - 1)) / (2.0 * hx);
                let rhs = Complex64::i() * p.eta(j) * (grid.at(k, it, ix) * grid.at(l, it, ix)).conj();
                let r = ((dt + dx * p.speeds[j]) * p.epsilon - rhs).norm();
                max[j] = max[j].max(r);
                sq[j] += r * r;
            }
        }
    }
    Ok(ResidualReport {
        max,
        l2: sq.map(|v| (v * hx * ht).sqrt()),
        interior_points: (s.nx - 2) * (s.nt - 2),
    })
}

/// Manley–Rowe functionals `M_jk(t) = eta_k ∫|q_j|² - eta_j ∫|q_k|²` for
/// `(j, k) ∈ {(1,2), (1,3), (2,3)}`, trapezoidal in x.
///
/// Every slice must have `|q_j| ≤ decay_tol` at both x-boundaries.
pub fn manley_rowe_invariants(grid: &FieldGrid, decay_tol: f64) -> Result<[Vec<f64>; 3]> {
    let s = grid.spec;
    let hx = s.hx();
    let mut out: [Vec<f64>; 3] = Default::default();
    for it in 0..s.nt {
        let mut mass = [0.0; 3];
        for j in 0..3 {
            let row = grid.slice(j, it);
            for &edge in &[row[0], row[s.nx - 1]] {
                if edge.norm() > decay_tol {
                    return Err(Error::BoundaryDecay { mode: j + 1, slice: it, value: edge.norm() });
                }
            }
            let inner: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            mass[j] = hx * (inner - 0.5 * (row[0].norm_sqr() + row[s.nx - 1].norm_sqr()));
        }
        let p = &grid.params;
        for (n, (j, k)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            out[n].push(p.eta(k) * mass[j] - p.eta(j) * mass[k]);
        }
    }
    Ok(out)
}


/// Statistics of one rectangular window of a field grid, on `a = sqrt(|q1|² + |q2|² + |q3|²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStat {
    pub x: (f64, f64),
    pub t: (f64, f64),
    pub mean_amplitude: f64,
    pub max_amplitude: f64,
    /// Total variation of `a` along x per unit length, averaged over the window's slices.
    pub variation: f64,
}

impl WindowStat {
    /// Variation relative to the local amplitude: roughly oscillations per unit length.
    pub fn oscillation_index(&self) -> f64 {
        if self.mean_amplitude > 0.0 {
            self.variation / self.mean_amplitude
        } else {
            0.0
        }
    }
}

/// Splits the grid into `wx × wt` windows (row-major in t) and measures each.
pub fn windowed_variation(grid: &FieldGrid, wx: usize, wt: usize) -> Result<Vec<WindowStat>> {
    let s = grid.spec;
    if wx == 0 || wt == 0 || s.nx < 2 * wx || s.nt < wt {
        return Err(Error::InvalidGrid(format!("cannot split {} × {} samples into {wx} × {wt} windows", s.nx, s.nt)));
    }
    let amp = |it: usize, ix: usize| (0..3).map(|j| grid.at(j, it, ix).norm_sqr()).sum::<f64>().sqrt();
    let mut out = Vec::with_capacity(wx * wt);
    for bt in 0..wt {
        let (t0, t1) = (bt * s.nt / wt, (bt + 1) * s.nt / wt);
        for bx in 0..wx {
            let (x0, x1) = (bx * s.nx / wx, (bx + 1) * s.nx / wx);
            let (mut sum, mut max, mut tv) = (0.0, 0.0f64, 0.0);
            for it in t0..t1 {
                for ix in x0..x1 {
                    let a = amp(it, ix);
                    sum += a;
                    max = max.max(a);
                    if ix + 1 < x1 {
                        tv += (amp(it, ix + 1) - a).abs();
                    }
                }
            }
            let rows = (t1 - t0) as f64;
            let len = (x1 - x0 - 1) as f64 * s.hx();
            out.push(WindowStat {
                x: (s.x(x0), s.x(x1 - 1)),
                t: (s.t(t0), s.t(t1 - 1)),
                mean_amplitude: sum / (rows * (x1 - x0) as f64),
                max_amplitude: max,
                variation: tv / (rows * len),
            });
        }
    }
    Ok(out)
}
