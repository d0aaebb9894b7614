//! Dense complex LU factorization with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from rows; panics if the rows are ragged or not square.
    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        let mut data = Vec::with_capacity(N * N);
        for r in rows.iter() {
            data.extend_from_slice(r);
        }
        Matrix { n: N, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// `P A = L U`, stored with split real and imaginary planes so the
/// elimination inner loop vectorizes.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
    perm: Vec<usize>,
    // Smallest and largest pivot modulus, a cheap conditioning hint.
    min_pivot: f64,
    max_pivot: f64,
}

impl Lu {
    /// Factors `a`. Fails only on an exactly zero (or non-finite) pivot.
    pub fn factor(a: Matrix) -> Result<Lu> {
        let n = a.n;
        let mut re: Vec<f64> = a.data.iter().map(|z| z.re).collect();
        let mut im: Vec<f64> = a.data.iter().map(|z| z.im).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot: f64 = 0.0;

        for k in 0..n {
            let mut p = k;
            let mut best = -1.0;
            for i in k..n {
                let m = re[i * n + k] * re[i * n + k] + im[i * n + k] * im[i * n + k];
                if m > best {
                    best = m;
                    p = i;
                }
            }
            let piv_mod = num_traits::Float::sqrt(best);
            if !(piv_mod > 0.0) || !piv_mod.is_finite() {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                });
            }
            min_pivot = min_pivot.min(piv_mod);
            max_pivot = max_pivot.max(piv_mod);
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    re.swap(p * n + j, k * n + j);
                    im.swap(p * n + j, k * n + j);
                }
            }
            let pr = re[k * n + k];
            let pi = im[k * n + k];
            let inv_den = 1.0 / (pr * pr + pi * pi);
            let (re_top, re_bot) = re.split_at_mut((k + 1) * n);
            let (im_top, im_bot) = im.split_at_mut((k + 1) * n);
            let rk = &re_top[k * n + k + 1..(k + 1) * n];
            let ik = &im_top[k * n + k + 1..(k + 1) * n];
            for row in 0..(n - k - 1) {
                let base = row * n;
                let ar = re_bot[base + k];
                let ai = im_bot[base + k];
                if ar == 0.0 && ai == 0.0 {
                    continue;
                }
                // l = a_ik / a_kk
                let lr = (ar * pr + ai * pi) * inv_den;
                let li = (ai * pr - ar * pi) * inv_den;
                re_bot[base + k] = lr;
                im_bot[base + k] = li;
                let ri = &mut re_bot[base + k + 1..base + n];
                let ii = &mut im_bot[base + k + 1..base + n];
                for (((xr, xi), &ur), &ui) in ri.iter_mut().zip(ii.iter_mut()).zip(rk).zip(ik) {
                    *xr -= lr * ur - li * ui;
                    *xi -= lr * ui + li * ur;
                }
            }
        }
        Ok(Lu {
            n,
            re,
            im,
            perm,
            min_pivot,
            max_pivot,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Ratio of the largest to the smallest pivot modulus.
    pub fn pivot_ratio(&self) -> f64 {
        self.max_pivot / self.min_pivot
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut xr: Vec<f64> = self.perm.iter().map(|&p| b[p].re).collect();
        let mut xi: Vec<f64> = self.perm.iter().map(|&p| b[p].im).collect();
        // Forward substitution with unit lower triangle.
        for i in 0..n {
            let row_r = &self.re[i * n..i * n + i];
            let row_i = &self.im[i * n..i * n + i];
            let (mut sr, mut si) = (0.0, 0.0);
            for j in 0..i {
                sr += row_r[j] * xr[j] - row_i[j] * xi[j];
                si += row_r[j] * xi[j] + row_i[j] * xr[j];
            }
            xr[i] -= sr;
            xi[i] -= si;
        }
        for i in (0..n).rev() {
            let (mut sr, mut si) = (xr[i], xi[i]);
            for j in i + 1..n {
                let (ur, ui) = (self.re[i * n + j], self.im[i * n + j]);
                sr -= ur * xr[j] - ui * xi[j];
                si -= ur * xi[j] + ui * xr[j];
            }
            let (dr, di) = (self.re[i * n + i], self.im[i * n + i]);
            let den = dr * dr + di * di;
            xr[i] = (sr * dr + si * di) / den;
            xi[i] = (si * dr - sr * di) / den;
        }
        xr.into_iter()
            .zip(xi)
            .map(|(r, i)| Complex64::new(r, i))
            .collect()
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.n;
        let mut inv = Matrix::zeros(n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e);
            e[j] = Complex64::new(0.0, 0.0);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// 1-norm condition number `||A||_1 ||A^-1||_1`, computed exactly.
/// Intended for the small moment systems only.
pub fn condition_1(a: &Matrix, lu: &Lu) -> f64 {
    a.norm_1() * lu.inverse().norm_1()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solves_with_pivoting() {
        // Zero leading entry forces a row swap.
        let a = Matrix::from_rows([
            [c(0.0, 0.0), c(2.0, 1.0), c(1.0, 0.0)],
            [c(1.0, -1.0), c(0.5, 0.0), c(0.0, 3.0)],
            [c(4.0, 0.0), c(1.0, 1.0), c(2.0, -2.0)],
        ]);
        let x = [c(1.0, 2.0), c(-3.0, 0.5), c(0.25, -1.0)];
        let b = a.mul_vec(&x);
        let lu = Lu::factor(a.clone()).unwrap();
        let y = lu.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).norm() < 1e-14);
        }
        let prod = {
            let inv = lu.inverse();
            let mut m = Matrix::zeros(3);
            for i in 0..3 {
                for j in 0..3 {
                    m[(i, j)] = (0..3).map(|k| a[(i, k)] * inv[(k, j)]).sum();
                }
            }
            m
        };
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - e).norm() < 1e-14);
            }
        }
        assert!(condition_1(&a, &lu) > 1.0);
    }

    #[test]
    fn singular_is_reported() {
        let a = Matrix::from_rows([[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]]);
        assert!(matches!(Lu::factor(a), Err(Error::IllConditioned { .. })));
    }
}
