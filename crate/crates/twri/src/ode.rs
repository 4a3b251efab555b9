//! Adaptive Dormand–Prince 5(4) integration of complex linear systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Largest step allowed; keeps the stepper from jumping over localized coefficients.
    pub max_step: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-12, max_step: 0.25 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction), overwriting `y`.
///
/// The error norm is scaled by the largest component so that linear systems whose
/// entries span many orders of magnitude are controlled in a norm-relative sense.
/// `lambda` is only used to annotate step-underflow errors.
pub fn integrate<F>(
    mut f: F,
    x0: f64,
    x1: f64,
    y: &mut [Complex64],
    tol: Tolerance,
    lambda: Complex64,
) -> Result<usize>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len();
    if x0 == x1 {
        return Ok(0);
    }
    let dir = (x1 - x0).signum();
    let span = (x1 - x0).abs();
    let mut h = (1e-3 * span).min(tol.max_step).max(1e-12);
    let mut x = x0;
    let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut y5 = vec![Complex64::new(0.0, 0.0); n];
    let mut steps = 0usize;
    f(x, y, &mut k[0]);
    while (x1 - x) * dir > 0.0 {
        let remaining = (x1 - x).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = h * dir;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        acc += kj[i] * (hs * A[s][j]);
                    }
                }
                tmp[i] = acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            f(x + C[s] * hs, &tmp, &mut tail[0]);
        }
        let mut err: f64 = 0.0;
        let mut ymax: f64 = 0.0;
        for i in 0..n {
            let mut s5 = y[i];
            let mut e = Complex64::new(0.0, 0.0);
            for s in 0..7 {
                s5 += k[s][i] * (hs * B5[s]);
                e += k[s][i] * (hs * (B5[s] - B4[s]));
            }
            y5[i] = s5;
            err = err.max(e.norm());
            ymax = ymax.max(y[i].norm()).max(s5.norm());
        }
        let scale = tol.abs + tol.rel * ymax;
        let ratio = err / scale;
        if !ratio.is_finite() {
            return Err(Error::NonFinite(format!("spectral integration at x = {x}")));
        }
        if ratio <= 1.0 {
            x = if last { x1 } else { x + hs };
            y.copy_from_slice(&y5);
            // FSAL: stage 7 of this step is stage 1 of the next.
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);
            steps += 1;
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * factor).min(tol.max_step);
        if h < 1e-13 * (1.0 + x.abs()) {
            return Err(Error::StepUnderflow { x, lambda });
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let mut y = [Complex64::new(1.0, 0.0)];
        let w = Complex64::new(0.3, 2.0);
        integrate(|_, y, dy| dy[0] = w * y[0], 0.0, 3.0, &mut y, Tolerance::default(), w).unwrap();
        let exact = (w * 3.0).exp();
        assert!((y[0] - exact).norm() < 1e-8 * exact.norm());
    }

    #[test]
    fn backward_direction() {
        let mut y = [Complex64::new(1.0, 0.0)];
        integrate(|x, _, dy| dy[0] = Complex64::new(x.cos(), 0.0), 2.0, -1.0, &mut y, Tolerance::default(), Complex64::new(0.0, 0.0))
            .unwrap();
        let exact = 1.0 + (-1.0f64).sin() - 2.0f64.sin();
        assert!((y[0].re - exact).abs() < 1e-9);
    }
}
