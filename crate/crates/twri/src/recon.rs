//! Time evolution of ensemble data and reflectionless reconstruction.
//!
//! The pole-only solution is built by dressing the vacuum `Phi0 = exp(-i lambda (A x + B t) / eps)`:
//!
//! ```text
//! chi(lambda) = I + sum_n F_n p_n^† / (lambda - conj(lambda_n)),   p_n = Phi0(lambda_n) c_n,
//! chi(lambda_m) p_m = 0   =>   F = -P M^{-1},   M_nm = <p_n, p_m> / (lambda_m - conj(lambda_n)),
//! ```
//!
//! and the fields come from the `1/lambda` coefficient `chi_1 = -P M^{-1} P^†` through
//! `Q = i [A, chi_1]`. Time enters only through the polarization vectors `c_n`, which is
//! what [`evolve`] updates.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::Cdd;
use crate::ensemble::EnsembleData;
use crate::error::{Error, Result};
use crate::linalg::{norm1, Lu, Scalar};
use crate::model::{FieldGrid, GridSpec, LaxPair};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Balance exponent beyond which a pole's polarization is treated as a pure unit vector;
/// the neglected weight is below `exp(-60)`.
pub const NEGLIGIBLE_EXPONENT: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Double precision, switching to double-double above the condition threshold.
    #[default]
    Double,
    /// Always double-double.
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconOptions {
    pub precision: Precision,
    pub condition_threshold: f64,
}

impl Default for ReconOptions {
    fn default() -> Self {
        Self { precision: Precision::Double, condition_threshold: 1e12 }
    }
}

/// Data evolved to absolute time `t`; only the norming constants change.
pub fn evolve(e: &EnsembleData, t: f64) -> Result<EnsembleData> {
    let mut out = e.clone();
    let dt = t - e.time;
    if dt != 0.0 {
        let lax = e.lax()?;
        for pole in &mut out.poles {
            let (k, l) = lax.block(pole.mode - 1);
            pole.log_norming += -Complex64::i() * pole.lambda * (lax.b[l] - lax.b[k]) * dt / lax.epsilon;
        }
    }
    out.time = t;
    Ok(out)
}

/// Per-point diagnostics of the reconstruction system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveInfo {
    pub condition: f64,
    pub extended: bool,
    /// Every weight was negligible and the exact zero field was returned.
    pub underflow: bool,
}

struct System {
    lambdas: Vec<Complex64>,
    /// `N × 3`, row `n` is `p_n` scaled to unit largest entry.
    p: Vec<[Complex64; 3]>,
}

fn assemble(e: &EnsembleData, lax: &LaxPair, x: f64) -> Option<System> {
    let mut lambdas = Vec::with_capacity(e.poles.len());
    let mut p = Vec::with_capacity(e.poles.len());
    let mut all_negligible = true;
    for pole in &e.poles {
        let (k, l) = lax.block(pole.mode - 1);
        let lk = -Complex64::i() * pole.lambda * lax.a[k] * x / lax.epsilon;
        let ll = pole.log_norming - Complex64::i() * pole.lambda * lax.a[l] * x / lax.epsilon;
        let shift = lk.re.max(ll.re);
        if (lk.re - ll.re).abs() < NEGLIGIBLE_EXPONENT {
            all_negligible = false;
        }
        let mut v = [ZERO; 3];
        v[k] = (lk - shift).exp();
        v[l] = (ll - shift).exp();
        lambdas.push(pole.lambda);
        p.push(v);
    }
    if all_negligible {
        None
    } else {
        Some(System { lambdas, p })
    }
}

fn gram<T: Scalar>(sys: &System, conv: impl Fn(Complex64) -> T, conj: impl Fn(T) -> T) -> Vec<T> {
    let n = sys.lambdas.len();
    let mut m = vec![T::zero(); n * n];
    for a in 0..n {
        for b in 0..n {
            let mut dot = T::zero();
            for i in 0..3 {
                dot = dot + conj(conv(sys.p[a][i])) * conv(sys.p[b][i]);
            }
            m[a * n + b] = dot / (conv(sys.lambdas[b]) - conj(conv(sys.lambdas[a])));
        }
    }
    m
}

/// `chi_1 = -P M^{-1} P^†` from a factored Gram matrix.
fn chi1<T: Scalar>(sys: &System, lu: &Lu<T>, conv: impl Fn(Complex64) -> T, conj: impl Fn(T) -> T, back: impl Fn(T) -> Complex64) -> [[Complex64; 3]; 3] {
    let mut chi = [[ZERO; 3]; 3];
    for col in 0..3 {
        let rhs: Vec<T> = sys.p.iter().map(|v| conj(conv(v[col]))).collect();
        let y = lu.solve(&rhs);
        for (row, out) in chi.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (a, ya) in y.iter().enumerate() {
                acc = acc + conv(sys.p[a][row]) * *ya;
            }
            out[col] = -back(acc);
        }
    }
    chi
}

fn solve_double(sys: &System) -> Option<(Lu<Complex64>, f64)> {
    let n = sys.lambdas.len();
    let m = gram(sys, |z| z, |z: Complex64| z.conj());
    let lu = Lu::new(m.clone(), n)?;
    let cond = norm1(&m, n) * norm1(&lu.inverse(), n);
    Some((lu, if cond.is_finite() { cond } else { f64::INFINITY }))
}

fn solve_extended(sys: &System) -> Option<[[Complex64; 3]; 3]> {
    let m = gram(sys, Cdd::from_c64, Cdd::conj);
    let lu = Lu::new(m, sys.lambdas.len())?;
    Some(chi1(sys, &lu, Cdd::from_c64, Cdd::conj, Cdd::to_c64))
}

/// Fields `(q1, q2, q3)` of the ensemble at position `x` and the ensemble's time.
pub fn point_solve(e: &EnsembleData, x: f64) -> Result<[Complex64; 3]> {
    point_solve_with(e, x, ReconOptions::default()).map(|(q, _)| q)
}

pub fn point_solve_with(e: &EnsembleData, x: f64, opts: ReconOptions) -> Result<([Complex64; 3], SolveInfo)> {
    let lax = e.lax()?;
    if e.poles.is_empty() {
        return Ok(([ZERO; 3], SolveInfo { condition: 1.0, extended: false, underflow: true }));
    }
    let Some(sys) = assemble(e, &lax, x) else {
        return Ok(([ZERO; 3], SolveInfo { condition: 1.0, extended: false, underflow: true }));
    };
    let singular = |cond: f64| Error::SingularSystem { x, t: e.time, condition: cond };
    // the condition estimate always comes from the double factorization
    let double = solve_double(&sys);
    let cond = double.as_ref().map_or(f64::INFINITY, |d| d.1);
    let (chi, extended) = match double {
        Some((lu, c)) if opts.precision == Precision::Double && c <= opts.condition_threshold => {
            (chi1(&sys, &lu, |z| z, |z: Complex64| z.conj(), |z| z), false)
        }
        _ => (solve_extended(&sys).ok_or_else(|| singular(cond))?, true),
    };
    if cond > 1e30 {
        return Err(singular(cond));
    }
    let mut q = [ZERO; 3];
    for (j, qj) in q.iter_mut().enumerate() {
        let (k, l) = lax.block(j);
        let big_q = Complex64::i() * (lax.a[k] - lax.a[l]) * chi[k][l];
        *qj = big_q / lax.coupling(j);
    }
    if q.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(singular(cond));
    }
    Ok((q, SolveInfo { condition: cond, extended, underflow: false }))
}

/// Reconstruction on a full grid; every slice is evolved from `e` directly.
pub fn grid_solve(e: &EnsembleData, spec: GridSpec) -> Result<FieldGrid> {
    grid_solve_with(e, spec, ReconOptions::default(), true)
}

pub fn grid_solve_with(e: &EnsembleData, spec: GridSpec, opts: ReconOptions, parallel: bool) -> Result<FieldGrid> {
    let mut grid = FieldGrid::zeros(spec, e.params)?;
    let row = |it: usize| -> Result<Vec<[Complex64; 3]>> {
        let et = evolve(e, spec.t(it))?;
        (0..spec.nx)
            .map(|ix| {
                point_solve_with(&et, spec.x(ix), opts)
                    .map(|r| r.0)
                    .map_err(|err| Error::AtGridPoint { it, ix, source: Box::new(err) })
            })
            .collect()
    };
    let rows: Vec<Result<Vec<[Complex64; 3]>>> =
        if parallel { (0..spec.nt).into_par_iter().map(row).collect() } else { (0..spec.nt).map(row).collect() };
    for (it, r) in rows.into_iter().enumerate() {
        for (ix, v) in r?.into_iter().enumerate() {
            for j in 0..3 {
                grid.q[j][it * spec.nx + ix] = v[j];
            }
        }
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub points: Vec<(f64, f64)>,
    pub conditions: Vec<f64>,
    pub underflow: Vec<bool>,
    pub max_condition: f64,
    pub precision: Vec<Precision>,
}

/// One-norm condition estimates of the reconstruction system at `(x, t)` samples.
pub fn conditioning(e: &EnsembleData, samples: &[(f64, f64)]) -> Result<ConditionReport> {
    if e.poles.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut rep = ConditionReport { points: samples.to_vec(), conditions: vec![], underflow: vec![], max_condition: 1.0, precision: vec![] };
    for &(x, t) in samples {
        let et = evolve(e, t)?;
        let (_, info) = point_solve_with(&et, x, ReconOptions::default())?;
        let c = info.condition.max(1.0);
        rep.conditions.push(c);
        rep.underflow.push(info.underflow);
        rep.precision.push(if info.extended { Precision::Extended } else { Precision::Double });
        rep.max_condition = rep.max_condition.max(c);
    }
    Ok(rep)
}


#[cfg(test)]
mod ordering_tests {
    use super::*;
    use crate::ensemble::compose_ensemble;
    use crate::model::{ModelParams, Packet, Shape};
    use crate::spectra::{sech_spectrum_exact, wkb_norming_constants};

    // reflectionless: amplitude * width an integer multiple of eps_j, spectra pairwise distinct
    fn sech_at(mode: usize, center: f64, eps_j: f64) -> (Packet, crate::spectra::ZSData) {
        let (n, w) = [(2.0, 1.0), (3.0, 1.0), (3.0, 1.5)][mode - 1];
        let a = n * eps_j / w;
        let p = Packet::with_support(mode, Shape::Sech, a, w, center, 6.0 * w, 1e-2).unwrap();
        let d = wkb_norming_constants(&p, &sech_spectrum_exact(a, w, eps_j)).unwrap();
        (p, d)
    }

    #[test]
    fn separated_packets_superpose() {
        let configs: &[&[usize]] = &[&[1, 3], &[3, 1], &[1, 2], &[2, 1], &[2, 3], &[3, 2], &[1, 2, 3], &[3, 2, 1], &[2, 1, 3]];
        for modes in configs {
            let params = ModelParams::with_epsilon(0.25).unwrap();
            let lax = params.lax().unwrap();
            let n = modes.len();
            let (packets, data): (Vec<_>, Vec<_>) = modes
                .iter()
                .enumerate()
                .map(|(i, &m)| {
                    let c = -20.0 * (n as f64 - 1.0) / 2.0 + 20.0 * i as f64;
                    sech_at(m, c, lax.zs_epsilon(m - 1))
                })
                .unzip();
            let e = compose_ensemble(&params, &packets, &data).unwrap();
            let err = super::tests::max_err_pub(&e, &packets);
            assert!(err < 1e-4, "{modes:?}: {err}");
        }
    }

    #[test]
    fn evolved_reconstruction_solves_pde() {
        use crate::model::{residual_norm, GridSpec};
        let params = ModelParams::with_epsilon(0.5).unwrap();
        let lax = params.lax().unwrap();
        let (p1, d1) = sech_at(1, -7.0, lax.zs_epsilon(0));
        let (p3, d3) = sech_at(3, 10.0, lax.zs_epsilon(2));
        let e = compose_ensemble(&params, &[p1, p3], &[d1, d3]).unwrap();
        let mut prev = f64::NAN;
        for n in [800, 1600, 3200] {
            let spec = GridSpec { x_min: -20.0, x_max: 20.0, nx: n + 1, t_min: 0.0, t_max: 12.0, nt: n / 4 + 1 };
            let g = grid_solve(&e, spec).unwrap();
            let r = residual_norm(&g).unwrap();
            let m = r.max.iter().cloned().fold(0.0, f64::max);
            let peak = g.q.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(peak > 0.1);
            if prev.is_finite() {
                let ratio = prev / m;
                assert!((3.5..4.5).contains(&ratio), "n {n}: ratio {ratio}");
            }
            prev = m;
        }
    }

    #[test]
    fn extended_precision_agrees_and_far_field_underflows() {
        let params = ModelParams::with_epsilon(0.25).unwrap();
        let lax = params.lax().unwrap();
        let (p1, d1) = sech_at(1, -10.0, lax.zs_epsilon(0));
        let (p2, d2) = sech_at(2, 10.0, lax.zs_epsilon(1));
        let e = compose_ensemble(&params, &[p1, p2], &[d1, d2]).unwrap();
        let ext = ReconOptions { precision: Precision::Extended, ..Default::default() };
        for x in [-12.0, -9.5, 0.0, 10.3] {
            let (a, _) = point_solve_with(&e, x, ReconOptions::default()).unwrap();
            let (b, info) = point_solve_with(&e, x, ext).unwrap();
            assert!(info.extended);
            for j in 0..3 {
                assert!((a[j] - b[j]).norm() < 1e-10);
            }
        }
        let (q, info) = point_solve_with(&e, 500.0, ReconOptions::default()).unwrap();
        assert!(info.underflow && q.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        let rep = conditioning(&e, &[(0.0, 0.0), (-10.0, 1.0)]).unwrap();
        assert_eq!(rep.conditions.len(), 2);
        assert!(rep.max_condition >= 1.0);
    }
}
