//! Dense LU with partial pivoting over complex doubles or complex double-doubles.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::dd::Cdd;

pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn magnitude(self) -> f64;
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.re.abs() + self.im.abs()
    }
}

impl Scalar for Cdd {
    fn zero() -> Self {
        Cdd::ZERO
    }
    fn one() -> Self {
        Cdd::from_c64(Complex64::new(1.0, 0.0))
    }
    fn magnitude(self) -> f64 {
        self.l1()
    }
}

/// Row-major square matrix factored in place.
pub struct Lu<T> {
    n: usize,
    a: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    /// Factors `a` (row-major `n × n`); `None` if a pivot vanishes.
    pub fn new(mut a: Vec<T>, n: usize) -> Option<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmag) = (k..n).map(|i| (i, a[i * n + k].magnitude())).fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            if !(pmag > 0.0) || !pmag.is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let inv = T::one() / a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] * inv;
                a[i * n + k] = f;
                for j in k + 1..n {
                    let v = a[k * n + j];
                    a[i * n + j] = a[i * n + j] - f * v;
                }
            }
        }
        Some(Self { n, a, perm })
    }

    /// Solves `A x = b` for one right-hand side.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] = x[i] - self.a[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] = x[i] - self.a[i * n + j] * x[j];
            }
            x[i] = x[i] / self.a[i * n + i];
        }
        x
    }

    /// Column-by-column inverse, row-major.
    pub fn inverse(&self) -> Vec<T> {
        let n = self.n;
        let mut inv = vec![T::zero(); n * n];
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[i * n + j] = col[i];
            }
        }
        inv
    }
}

/// Induced one-norm of a row-major square matrix.
pub fn norm1<T: Scalar>(a: &[T], n: usize) -> f64 {
    (0..n).map(|j| (0..n).map(|i| a[i * n + j].magnitude()).sum::<f64>()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_pivoting_system() {
        let c = |r: f64, i: f64| Complex64::new(r, i);
        let a = vec![c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0), c(1.0, -1.0)];
        let lu = Lu::new(a.clone(), 2).unwrap();
        let x = lu.solve(&[c(1.0, 0.0), c(0.0, 1.0)]);
        for i in 0..2 {
            let r: Complex64 = (0..2).map(|j| a[i * 2 + j] * x[j]).sum();
            assert!((r - [c(1.0, 0.0), c(0.0, 1.0)][i]).norm() < 1e-15);
        }
        assert!(Lu::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)], 2).is_none());
    }
}
