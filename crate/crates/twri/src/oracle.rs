//! Direct scattering by numerical integration of the spectral ODE.
//!
//! Everything here is a brute-force reference: transfer matrices come from integrating
//! the de-oscillated system `eps Y' = E(x)^{-1} Q(x) E(x) Y` with `E(x) = exp(-i lambda A x / eps)`,
//! and discrete eigenvalues are zeros of analytic scattering entries located by the
//! argument principle and polished by Newton iteration.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{LaxPair, ModelParams, Packet};
use crate::ode::{self, Tolerance};
use crate::quad::gauss_legendre;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Initial data for the 3×3 problem: the three field values at a point.
pub trait InitialData: Sync {
    fn sample(&self, x: f64) -> [Complex64; 3];
}

impl InitialData for [Packet] {
    fn sample(&self, x: f64) -> [Complex64; 3] {
        let mut q = [ZERO; 3];
        for p in self {
            q[p.mode_index()] += p.envelope(x);
        }
        q
    }
}

impl InitialData for Vec<Packet> {
    fn sample(&self, x: f64) -> [Complex64; 3] {
        self.as_slice().sample(x)
    }
}

/// Closure-backed initial data.
pub struct FnData<F>(pub F);

impl<F: Fn(f64) -> [Complex64; 3] + Sync> InitialData for FnData<F> {
    fn sample(&self, x: f64) -> [Complex64; 3] {
        (self.0)(x)
    }
}

/// Smallest window containing every packet support.
pub fn packets_window(packets: &[Packet]) -> Option<(f64, f64)> {
    packets.iter().map(Packet::support).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
}

/// Which Jost normalization a matrix maps between.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `E(x_right)^{-1} Φ(x_right, x_left) E(x_left)`: left-normalized data to right-normalized.
    LeftToRight,
    /// The inverse map.
    RightToLeft,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub dim: usize,
    /// Row-major entries.
    pub entries: Vec<Complex64>,
    pub lambda: Complex64,
    pub x_left: f64,
    pub x_right: f64,
    pub normalization: Normalization,
}

impl TransferMatrix {
    pub fn identity(dim: usize, lambda: Complex64, x_left: f64, x_right: f64) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Self { dim, entries, lambda, x_left, x_right, normalization: Normalization::LeftToRight }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn det(&self) -> Complex64 {
        let m = |i, j| self.get(i, j);
        match self.dim {
            2 => m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
            3 => {
                m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
            }
            _ => unreachable!("transfer matrices are 2×2 or 3×3"),
        }
    }

    /// Largest magnitude among the products summed in the determinant (at least one);
    /// the floating-point scale against which `det - 1` is judged.
    pub fn det_scale(&self) -> f64 {
        let m = |i, j| self.get(i, j).norm();
        let s = match self.dim {
            2 => (m(0, 0) * m(1, 1)).max(m(0, 1) * m(1, 0)),
            _ => {
                let mut s: f64 = 0.0;
                for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                    s = s.max(m(0, p[0]) * m(1, p[1]) * m(2, p[2]));
                }
                s
            }
        };
        s.max(1.0)
    }

    /// `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &TransferMatrix) -> TransferMatrix {
        let n = self.dim;
        let mut e = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                e[i * n + j] = (0..n).map(|k| self.get(i, k) * rhs.get(k, j)).sum();
            }
        }
        TransferMatrix {
            dim: n,
            entries: e,
            lambda: self.lambda,
            x_left: rhs.x_left.min(self.x_left),
            x_right: self.x_right.max(rhs.x_right),
            normalization: self.normalization,
        }
    }

    /// Inverse via the adjugate (determinant is one up to integration error).
    pub fn inverse(&self) -> TransferMatrix {
        let n = self.dim;
        let d = self.det();
        let m = |i, j| self.get(i, j);
        let mut e = vec![ZERO; n * n];
        if n == 2 {
            e = vec![m(1, 1) / d, -m(0, 1) / d, -m(1, 0) / d, m(0, 0) / d];
        } else {
            for i in 0..3 {
                for j in 0..3 {
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    e[i * 3 + j] = (m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0)) / d;
                }
            }
        }
        let normalization = match self.normalization {
            Normalization::LeftToRight => Normalization::RightToLeft,
            Normalization::RightToLeft => Normalization::LeftToRight,
        };
        TransferMatrix { entries: e, normalization, ..self.clone() }
    }

    /// `max |self - other|` over entries.
    pub fn max_diff(&self, other: &TransferMatrix) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn check_finite(q: &[Complex64], x: f64) -> Result<()> {
    if q.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("field sample at x = {x}")))
    }
}

/// De-oscillated 3×3 transfer matrix of the initial data across `window`.
pub fn transfer_matrix(
    data: &(impl InitialData + ?Sized),
    lambda: Complex64,
    params: &ModelParams,
    window: (f64, f64),
    tol: Tolerance,
) -> Result<TransferMatrix> {
    let lax = params.lax()?;
    let eps = params.epsilon;
    let (xl, xr) = window;
    // segments short enough that the de-oscillation factors stay O(1) inside each one
    let span = lax.a.iter().cloned().fold(f64::MIN, f64::max) - lax.a.iter().cloned().fold(f64::MAX, f64::min);
    let growth = lambda.im.abs() * span * (xr - xl) / eps;
    let nseg = ((growth / 4.0).ceil() as usize).max(1);
    let mut total = TransferMatrix::identity(3, lambda, xl, xr);
    let mut bad = None;
    for s in 0..nseg {
        let s0 = xl + (xr - xl) * s as f64 / nseg as f64;
        let s1 = if s + 1 == nseg { xr } else { xl + (xr - xl) * (s + 1) as f64 / nseg as f64 };
        let c = 0.5 * (s0 + s1);
        let mut y = TransferMatrix::identity(3, lambda, s0, s1).entries;
        ode::integrate(
            |x, y, dy| {
                let q = data.sample(x);
                if bad.is_none() && check_finite(&q, x).is_err() {
                    bad = Some(x);
                }
                let w = conjugated_potential(&lax, q, lambda, x - c);
                for i in 0..3 {
                    for j in 0..3 {
                        dy[i * 3 + j] = (0..3).map(|k| w[i][k] * y[k * 3 + j]).sum::<Complex64>() / eps;
                    }
                }
            },
            s0,
            s1,
            &mut y,
            tol,
            lambda,
        )?;
        if let Some(x) = bad {
            return Err(Error::NonFinite(format!("field sample at x = {x}")));
        }
        for m in 0..3 {
            for n in 0..3 {
                if m != n {
                    y[m * 3 + n] *= (Complex64::i() * lambda * (lax.a[m] - lax.a[n]) * c / eps).exp();
                }
            }
        }
        let seg = TransferMatrix { dim: 3, entries: y, lambda, x_left: s0, x_right: s1, normalization: Normalization::LeftToRight };
        total = seg.compose(&total);
    }
    total.x_left = xl;
    total.x_right = xr;
    Ok(total)
}

/// `E(x)^{-1} Q E(x)`.
fn conjugated_potential(lax: &LaxPair, q: [Complex64; 3], lambda: Complex64, x: f64) -> [[Complex64; 3]; 3] {
    let mut w = lax.potential(q);
    for (m, row) in w.iter_mut().enumerate() {
        for (n, v) in row.iter_mut().enumerate() {
            if m != n && *v != ZERO {
                *v *= (Complex64::i() * lambda * (lax.a[m] - lax.a[n]) * x / lax.epsilon).exp();
            }
        }
    }
    w
}

/// De-oscillated 2×2 transfer matrix of `eps v' = [[-i zeta, q], [-q, i zeta]] v` with
/// `q` the packet envelope, across the packet support.
pub fn zs_transfer_matrix(p: &Packet, zeta: Complex64, epsilon: f64, tol: Tolerance) -> Result<TransferMatrix> {
    zs_transfer_matrix_fn(|x| p.envelope(x), p.support(), zeta, epsilon, tol)
}

/// Same for an arbitrary real potential `q` over `window`.
pub fn zs_transfer_matrix_fn(
    q: impl Fn(f64) -> f64,
    window: (f64, f64),
    zeta: Complex64,
    epsilon: f64,
    tol: Tolerance,
) -> Result<TransferMatrix> {
    let (xl, xr) = window;
    let mut y = TransferMatrix::identity(2, zeta, xl, xr).entries;
    ode::integrate(
        |x, y, dy| {
            let q = q(x);
            let ph = (Complex64::i() * 2.0 * zeta * x / epsilon).exp();
            let w12 = ph * q / epsilon;
            let w21 = -q / (ph * epsilon);
            dy[0] = w12 * y[2];
            dy[1] = w12 * y[3];
            dy[2] = w21 * y[0];
            dy[3] = w21 * y[1];
        },
        xl,
        xr,
        &mut y,
        tol,
        zeta,
    )?;
    Ok(TransferMatrix { dim: 2, entries: y, lambda: zeta, x_left: xl, x_right: xr, normalization: Normalization::LeftToRight })
}

/// An analytic function of the spectral parameter whose zeros are eigenvalues.
pub trait SpectralFunction: Sync {
    fn eval(&self, z: Complex64) -> Result<Complex64>;
}

/// `a(zeta)` of the 2×2 problem for one packet; analytic in the upper half-plane.
pub struct ZsScatteringEntry<'a> {
    pub packet: &'a Packet,
    pub epsilon: f64,
    pub tol: Tolerance,
}

impl SpectralFunction for ZsScatteringEntry<'_> {
    fn eval(&self, zeta: Complex64) -> Result<Complex64> {
        let (xl, xr) = self.packet.support();
        let m = zs_left_column(self.packet, zeta, self.epsilon, xl, xr, self.tol)?;
        Ok(m[0])
    }
}

/// `exp(i zeta x / eps) psi_1^-(x)` carried from `x_left` to `x`.
fn zs_left_column(p: &Packet, zeta: Complex64, eps: f64, xl: f64, x: f64, tol: Tolerance) -> Result<[Complex64; 2]> {
    let mut m = [ONE, ZERO];
    let d = 2.0 * Complex64::i() * zeta / eps;
    ode::integrate(
        |x, y, dy| {
            let q = p.envelope(x) / eps;
            dy[0] = q * y[1];
            dy[1] = -q * y[0] + d * y[1];
        },
        xl,
        x,
        &mut m,
        tol,
        zeta,
    )?;
    Ok(m)
}

/// `exp(-i zeta x / eps) psi_2^+(x)` carried from `x_right` back to `x`.
fn zs_right_column(p: &Packet, zeta: Complex64, eps: f64, xr: f64, x: f64, tol: Tolerance) -> Result<[Complex64; 2]> {
    let mut n = [ZERO, ONE];
    let d = -2.0 * Complex64::i() * zeta / eps;
    ode::integrate(
        |x, y, dy| {
            let q = p.envelope(x) / eps;
            dy[0] = d * y[0] + q * y[1];
            dy[1] = -q * y[0];
        },
        xr,
        x,
        &mut n,
        tol,
        zeta,
    )?;
    Ok(n)
}

/// Proportionality constant `b` in `psi_1^-(zeta) = b psi_2^+(zeta)` at an eigenvalue,
/// matched at the packet center.
pub fn zs_proportionality(p: &Packet, zeta: Complex64, epsilon: f64, tol: Tolerance) -> Result<Complex64> {
    let (xl, xr) = p.support();
    let x0 = p.center;
    let m = zs_left_column(p, zeta, epsilon, xl, x0, tol)?;
    let n = zs_right_column(p, zeta, epsilon, xr, x0, tol)?;
    let phase = (-2.0 * Complex64::i() * zeta * x0 / epsilon).exp();
    let i = if n[0].norm() > n[1].norm() { 0 } else { 1 };
    Ok(phase * m[i] / n[i])
}

/// Product `S_11(lambda) (S^{-1})_33(lambda)` of the 3×3 problem (upper half-plane).
///
/// For lower half-plane arguments the conjugate-symmetric counterpart
/// `conj(f(conj lambda))` is returned, whose zeros are the lower eigenvalues.
pub struct ThreeWaveScatteringEntry<'a, D: InitialData + ?Sized> {
    pub data: &'a D,
    pub params: ModelParams,
    pub window: (f64, f64),
    pub tol: Tolerance,
}

impl<D: InitialData + ?Sized> ThreeWaveScatteringEntry<'_, D> {
    fn upper(&self, lambda: Complex64) -> Result<Complex64> {
        let lax = self.params.lax()?;
        let eps = self.params.epsilon;
        let (xl, xr) = self.window;
        let (top, bottom) = ordering(&lax);
        // column: exp(i lambda a_top x / eps) psi^-_top
        let mut m = [ZERO; 3];
        m[top] = ONE;
        ode::integrate(
            |x, y, dy| {
                let pot = lax.potential(self.data.sample(x));
                for i in 0..3 {
                    let mut acc = -Complex64::i() * lambda * (lax.a[i] - lax.a[top]) * y[i];
                    for k in 0..3 {
                        acc += pot[i][k] * y[k];
                    }
                    dy[i] = acc / eps;
                }
            },
            xl,
            xr,
            &mut m,
            self.tol,
            lambda,
        )?;
        // row: exp(-i lambda a_bottom x / eps) times row `bottom` of (psi^-)^{-1}
        let mut r = [ZERO; 3];
        r[bottom] = ONE;
        ode::integrate(
            |x, y, dy| {
                let pot = lax.potential(self.data.sample(x));
                for n in 0..3 {
                    let mut acc = Complex64::i() * lambda * (lax.a[n] - lax.a[bottom]) * y[n];
                    for k in 0..3 {
                        acc -= y[k] * pot[k][n];
                    }
                    dy[n] = acc / eps;
                }
            },
            xl,
            xr,
            &mut r,
            self.tol,
            lambda,
        )?;
        Ok(m[top] * r[bottom])
    }
}

/// Indices of the largest and smallest diagonal coefficient.
fn ordering(lax: &LaxPair) -> (usize, usize) {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| lax.a[j].total_cmp(&lax.a[i]));
    (idx[0], idx[2])
}

impl<D: InitialData + ?Sized> SpectralFunction for ThreeWaveScatteringEntry<'_, D> {
    fn eval(&self, lambda: Complex64) -> Result<Complex64> {
        if lambda.im >= 0.0 {
            self.upper(lambda)
        } else {
            Ok(self.upper(lambda.conj())?.conj())
        }
    }
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Region {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Self {
        Self { re, im }
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re.0 - slack && z.re <= self.re.1 + slack && z.im >= self.im.0 - slack && z.im <= self.im.1 + slack
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LocateOptions {
    pub nodes_per_edge: usize,
    pub max_depth: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub separation_tol: f64,
    pub residual_tol: f64,
}

impl Default for LocateOptions {
    fn default() -> Self {
        Self { nodes_per_edge: 64, max_depth: 12, newton_tol: 1e-10, newton_max_iter: 50, separation_tol: 1e-7, residual_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EigenvalueList {
    pub points: Vec<Complex64>,
    /// `|f|` at each returned point.
    pub residual_bounds: Vec<f64>,
    /// Suspected multiple zero (pairs closer than the separation tolerance, or a
    /// winding number above one at the finest subdivision).
    pub multiple: Vec<bool>,
    /// Newton reached its step tolerance.
    pub converged: Vec<bool>,
}

impl EigenvalueList {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points sorted by decreasing imaginary part.
    pub fn sorted_points(&self) -> Vec<Complex64> {
        let mut p = self.points.clone();
        p.sort_by(|a, b| b.im.total_cmp(&a.im).then(a.re.total_cmp(&b.re)));
        p
    }
}

fn newton_step_size(z: Complex64) -> f64 {
    1e-6 * (1.0 + z.norm())
}

fn derivative(f: &dyn SpectralFunction, z: Complex64) -> Result<Complex64> {
    let h = newton_step_size(z);
    Ok((f.eval(z + h)? - f.eval(z - h)?) / (2.0 * h))
}

struct Locator<'a> {
    f: &'a dyn SpectralFunction,
    opts: LocateOptions,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Locator<'_> {
    /// `(1/2πi) ∮ f'/f dz` and `(1/2πi) ∮ z f'/f dz` around the rectangle.
    fn moments(&self, r: &Region) -> Result<(Complex64, Complex64, Complex64)> {
        let corners = [
            Complex64::new(r.re.0, r.im.0),
            Complex64::new(r.re.1, r.im.0),
            Complex64::new(r.re.1, r.im.1),
            Complex64::new(r.re.0, r.im.1),
        ];
        let mut m0 = ZERO;
        let mut m1 = ZERO;
        let mut m2 = ZERO;
        for e in 0..4 {
            let (a, b) = (corners[e], corners[(e + 1) % 4]);
            let half = (b - a) * 0.5;
            let mid = (a + b) * 0.5;
            let h = newton_step_size(mid) * half / half.norm();
            for (u, w) in self.nodes.iter().zip(&self.weights) {
                let z = mid + half * *u;
                let fz = self.f.eval(z)?;
                if fz.norm() < 1e-300 {
                    return Err(Error::ContourZero(z));
                }
                let dfdz = (self.f.eval(z + h)? - self.f.eval(z - h)?) / (2.0 * h);
                let g = dfdz / fz * half * *w;
                m0 += g;
                m1 += g * z;
                m2 += g * z * z;
            }
        }
        let s = 1.0 / (2.0 * PI * Complex64::i());
        Ok((m0 * s, m1 * s, m2 * s))
    }

    fn split(r: &Region) -> [Region; 4] {
        // off-center split keeps subdivision lines away from symmetric zeros
        let xm = r.re.0 + 0.5123 * (r.re.1 - r.re.0);
        let ym = r.im.0 + 0.4871 * (r.im.1 - r.im.0);
        [
            Region::new((r.re.0, xm), (r.im.0, ym)),
            Region::new((xm, r.re.1), (r.im.0, ym)),
            Region::new((r.re.0, xm), (ym, r.im.1)),
            Region::new((xm, r.re.1), (ym, r.im.1)),
        ]
    }

    fn search(&self, r: Region, depth: usize, out: &mut Vec<(Complex64, bool, bool, f64)>) -> Result<()> {
        let (m0, m1, m2) = self.moments(&r)?;
        let n = m0.re.round();
        let integral = (m0.re - n).abs() <= 0.1 && m0.im.abs() <= 0.1;
        if !integral {
            if depth >= self.opts.max_depth {
                return Err(Error::ContourZero(Complex64::new(0.5 * (r.re.0 + r.re.1), 0.5 * (r.im.0 + r.im.1))));
            }
            for s in Self::split(&r) {
                self.search(s, depth + 1, out)?;
            }
            return Ok(());
        }
        match n as i64 {
            i64::MIN..=0 => Ok(()),
            1 => {
                let (z, ok, res) = self.newton(m1 / m0, &r, 1.0)?;
                out.push((z, ok, false, res));
                Ok(())
            }
            _ if depth >= self.opts.max_depth || self.single_cluster(&r, m0, m1, m2) => {
                let (z, ok, res) = self.newton(m1 / m0, &r, n)?;
                out.push((z, ok, true, res));
                Ok(())
            }
            _ => {
                for s in Self::split(&r) {
                    self.search(s, depth + 1, out)?;
                }
                Ok(())
            }
        }
    }

    /// All `m0` zeros sit at one point: the spread about the centroid vanishes.
    fn single_cluster(&self, r: &Region, m0: Complex64, m1: Complex64, m2: Complex64) -> bool {
        let c = m1 / m0;
        let spread = (m2 / m0 - c * c).norm().sqrt();
        let diam = (r.re.1 - r.re.0).hypot(r.im.1 - r.im.0);
        spread <= 1e-3 * diam
    }

    /// Newton with the step scaled by the multiplicity.
    fn newton(&self, z0: Complex64, r: &Region, mult: f64) -> Result<(Complex64, bool, f64)> {
        let mut z = z0;
        let mut converged = false;
        for _ in 0..self.opts.newton_max_iter {
            let fz = self.f.eval(z)?;
            let dz = fz / derivative(self.f, z)? * mult;
            if !(dz.re.is_finite() && dz.im.is_finite()) {
                break;
            }
            z -= dz;
            if dz.norm() <= self.opts.newton_tol * (1.0 + z.norm()) {
                converged = true;
                break;
            }
        }
        if !r.contains(z, 1e-6) {
            // Newton wandered off; fall back to the contour estimate
            z = z0;
            converged = false;
        }
        let res = self.f.eval(z)?.norm();
        Ok((z, converged, res))
    }
}

/// Zeros of `f` inside `region` by argument-principle subdivision and Newton polish.
pub fn locate_zeros(f: &dyn SpectralFunction, region: Region, opts: LocateOptions) -> Result<EigenvalueList> {
    if region.im.0 < 0.0 && region.im.1 > 0.0 || region.im.0 == 0.0 || region.im.1 == 0.0 {
        return Err(Error::RegionStraddlesAxis);
    }
    let (nodes, weights) = gauss_legendre(opts.nodes_per_edge);
    let loc = Locator { f, opts, nodes, weights };
    let mut found = Vec::new();
    loc.search(region, 0, &mut found)?;
    let mut list = EigenvalueList::default();
    for (z, ok, mult, res) in found {
        if let Some(i) = list.points.iter().position(|p| (p - z).norm() < opts.separation_tol) {
            list.multiple[i] = true;
            continue;
        }
        list.points.push(z);
        list.converged.push(ok);
        list.multiple.push(mult);
        list.residual_bounds.push(res);
    }
    Ok(list)
}

/// Eigenvalues of the 3×3 problem for the given initial data inside `region`.
pub fn locate_eigenvalues(
    data: &(impl InitialData + ?Sized),
    params: &ModelParams,
    window: (f64, f64),
    region: Region,
    tol: Tolerance,
    opts: LocateOptions,
) -> Result<EigenvalueList> {
    let f = ThreeWaveScatteringEntry { data, params: *params, window, tol };
    locate_zeros(&f, region, opts)
}

/// Eigenvalues `zeta` of the 2×2 problem of one packet inside an upper half-plane region.
pub fn locate_zs_eigenvalues(p: &Packet, epsilon: f64, region: Region, tol: Tolerance, opts: LocateOptions) -> Result<EigenvalueList> {
    if region.im.0 <= 0.0 {
        return Err(Error::RegionStraddlesAxis);
    }
    let f = ZsScatteringEntry { packet: p, epsilon, tol };
    locate_zeros(&f, region, opts)
}
