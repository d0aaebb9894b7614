//! Liouvillian superoperator and its steady state.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Unused when std is linked (its inherent f64 methods take precedence).
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, solve_refined, ComplexDd, CsrMatrix, Lu, Matrix, TripletBuilder};

use super::fock::{adjoint, matmul};

/// Tolerance on `|L rho|` relative to the largest Liouvillian row sum.
pub const STEADY_STATE_TOL: f64 = 1e-10;

/// Position of `rho_ij` in the column-stacked vector.
#[inline]
pub fn vec_index(n: usize, i: usize, j: usize) -> usize {
    i + n * j
}

/// `L rho = -i [H, rho] + sum_k (C_k rho C_k+ - {C_k+ C_k, rho} / 2)`, column-stacked.
pub fn liouvillian(h: &Matrix, collapse: &[Matrix]) -> CsrMatrix {
    let n = h.dim();
    let mut h_eff = h.clone();
    for c in collapse {
        let cdc = matmul(&adjoint(c), c);
        for i in 0..n {
            for j in 0..n {
                h_eff[(i, j)] -= Complex64::new(0.0, 0.5) * cdc[(i, j)];
            }
        }
    }
    let nz = |m: &Matrix| -> Vec<(usize, usize, Complex64)> {
        let mut v = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let x = m[(i, j)];
                if x.re != 0.0 || x.im != 0.0 {
                    v.push((i, j, x));
                }
            }
        }
        v
    };
    let mut tb = TripletBuilder::new(n * n, n * n);
    let heff_nz = nz(&h_eff);
    let mi = Complex64::new(0.0, -1.0);
    for &(i, k, x) in &heff_nz {
        // -i H_eff rho
        for j in 0..n {
            tb.push(vec_index(n, i, j), vec_index(n, k, j), mi * x);
        }
        // +i rho H_eff^dagger
        for m in 0..n {
            tb.push(vec_index(n, m, i), vec_index(n, m, k), -mi * x.conj());
        }
    }
    for c in collapse {
        let c_nz = nz(c);
        for &(i, k, x) in &c_nz {
            for &(j, l, y) in &c_nz {
                tb.push(vec_index(n, i, j), vec_index(n, k, l), x * y.conj());
            }
        }
    }
    tb.build()
}

/// Density matrix held in double-double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    // Column-stacked.
    data: Vec<ComplexDd>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> ComplexDd {
        self.data[vec_index(self.n, i, j)]
    }

    pub fn trace(&self) -> ComplexDd {
        (0..self.n).fold(ComplexDd::ZERO, |acc, i| acc + self.get(i, i))
    }

    /// `tr(rho O)`.
    pub fn expect(&self, op: &Matrix) -> ComplexDd {
        let mut acc = ComplexDd::ZERO;
        for i in 0..self.n {
            for j in 0..self.n {
                let o = op[(j, i)];
                if o.re != 0.0 || o.im != 0.0 {
                    acc = acc + self.get(i, j).mul_c64(o);
                }
            }
        }
        acc
    }

    pub fn population(&self, i: usize) -> f64 {
        self.get(i, i).re.to_f64()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                e = e.max((self.get(i, j) - self.get(j, i).conj()).to_c64().norm());
            }
        }
        e
    }

    /// Cholesky of `rho + tol I` succeeds iff every eigenvalue exceeds `-tol`
    /// (up to round-off).
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.n;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self.get(j, j).to_c64().re + tol;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) {
                return false;
            }
            let djj = d.sqrt();
            l[j * n + j] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = self.get(i, j).to_c64();
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        true
    }

    /// Round to ordinary precision as a row-major matrix.
    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self.get(i, j).to_c64();
            }
        }
        m
    }
}

/// How the steady state was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyMethod {
    /// One equation replaced by the trace condition, solved directly.
    TraceConstraint,
    /// Inverse iteration on a slightly shifted Liouvillian.
    ShiftInvert,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `max |L rho|` over the largest absolute row sum of `L`.
    pub residual: f64,
    pub method: SteadyMethod,
}

fn row_norm(l: &CsrMatrix) -> f64 {
    (0..l.rows())
        .map(|i| l.row(i).map(|(_, v)| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn relative_residual(l: &CsrMatrix, x: &[ComplexDd], scale: f64) -> f64 {
    let zero = vec![Complex64::new(0.0, 0.0); l.rows()];
    let r = l.residual_dd(&zero, x);
    r.iter().map(|z| z.to_c64().norm()).fold(0.0, f64::max) / scale
}

fn normalize(mut x: Vec<ComplexDd>, n: usize) -> Vec<ComplexDd> {
    let tr = (0..n).fold(ComplexDd::ZERO, |acc, i| acc + x[vec_index(n, i, i)]);
    let t = tr.to_c64();
    let inv = Complex64::new(1.0, 0.0) / t;
    // One Newton step on 1/tr in double-double keeps the trace exact to ~1e-32.
    let corr = ComplexDd::from(Complex64::new(2.0, 0.0)) - tr.mul_c64(inv);
    let inv_dd = corr.mul_c64(inv);
    for v in x.iter_mut() {
        *v = *v * inv_dd;
    }
    x
}

/// Trace-one null vector of the Liouvillian `l` acting on `n x n` matrices.
pub fn steady_state(l: &CsrMatrix, n: usize) -> Result<SteadyState> {
    let scale = row_norm(l).max(f64::MIN_POSITIVE);
    let trace_row: Vec<(usize, Complex64)> = (0..n)
        .map(|i| (vec_index(n, i, i), Complex64::new(1.0, 0.0)))
        .collect();
    let constrained = l.with_row(0, &trace_row);
    let mut rhs = vec![Complex64::new(0.0, 0.0); n * n];
    rhs[0] = Complex64::new(1.0, 0.0);

    let mut best: Option<SteadyState> = None;
    if let Ok(lu) = Lu::factor(constrained.to_dense()) {
        let (x, _) = solve_refined(&lu, &constrained, &rhs, 12);
        let x = normalize(x, n);
        let residual = relative_residual(l, &x, scale);
        let s = SteadyState {
            rho: DensityMatrix { n, data: x },
            residual,
            method: SteadyMethod::TraceConstraint,
        };
        if residual <= STEADY_STATE_TOL {
            return Ok(s);
        }
        best = Some(s);
    }

    // Shift-invert fallback.
    let sigma = Complex64::new(-1e-9 * scale, 0.0);
    let mut tb = TripletBuilder::new(n * n, n * n);
    for i in 0..n * n {
        for (j, v) in l.row(i) {
            tb.push(i, j, v);
        }
        tb.push(i, i, -sigma);
    }
    let shifted_sparse = tb.build();
    if let Ok(lu) = Lu::factor(shifted_sparse.to_dense()) {
        let mut x: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            x[vec_index(n, i, i)] = Complex64::new(1.0 / n as f64, 0.0);
        }
        let mut xd: Vec<ComplexDd> = x.iter().map(|&z| ComplexDd::from(z)).collect();
        for _ in 0..30 {
            let (y, _) = solve_refined(&lu, &shifted_sparse, &x, 4);
            xd = normalize(y, n);
            x = xd.iter().map(|z| z.to_c64()).collect();
            if norm_inf(&x) == 0.0 {
                break;
            }
            if relative_residual(l, &xd, scale) <= STEADY_STATE_TOL {
                break;
            }
        }
        let residual = relative_residual(l, &xd, scale);
        let s = SteadyState {
            rho: DensityMatrix { n, data: xd },
            residual,
            method: SteadyMethod::ShiftInvert,
        };
        if residual <= STEADY_STATE_TOL {
            return Ok(s);
        }
        if best.as_ref().map_or(true, |b| s.residual < b.residual) {
            best = Some(s);
        }
    }
    Err(Error::NonConvergence {
        residual: best.map_or(f64::INFINITY, |b| b.residual),
    })
}

/// Largest `|tr(L rho)|` over the basis matrices `|k><l|`, i.e. how far the
/// superoperator is from trace preserving.
pub fn trace_defect(l: &CsrMatrix, n: usize) -> f64 {
    let mut sums = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for (j, v) in l.row(vec_index(n, i, i)) {
            sums[j] += v;
        }
    }
    norm_inf(&sums)
}

#[cfg(test)]
mod tests {
    use super::super::fock::{Basis, LocalOp, Site};
    use super::*;

    fn driven_damped_oscillator(alpha: f64) -> (Basis, CsrMatrix, Matrix) {
        let dim = 6;
        let b = Basis::new(vec![Site::Boson { dim }], dim - 1);
        let one = Complex64::new(1.0, 0.0);
        let a = b.operator(one, &[(0, &LocalOp::annihilation(dim))]);
        let n_op = b.operator(one, &[(0, &LocalOp::number(dim))]);
        let mut h = Matrix::zeros(b.len());
        let ad = adjoint(&a);
        for i in 0..b.len() {
            for j in 0..b.len() {
                h[(i, j)] = -0.7 * n_op[(i, j)] + alpha * (a[(i, j)] + ad[(i, j)]);
            }
        }
        let mut c = a.clone();
        for i in 0..b.len() {
            for j in 0..b.len() {
                c[(i, j)] *= (2.0f64 * 0.4).sqrt();
            }
        }
        let l = liouvillian(&h, &[c]);
        (b, l, a)
    }

    #[test]
    fn trace_preserving() {
        let (b, l, _) = driven_damped_oscillator(0.3);
        assert!(trace_defect(&l, b.len()) < 1e-12);
    }

    #[test]
    fn coherent_steady_state_of_driven_oscillator() {
        let alpha = 1e-2;
        let (b, l, a) = driven_damped_oscillator(alpha);
        let s = steady_state(&l, b.len()).unwrap();
        assert!(s.residual < STEADY_STATE_TOL);
        // d<a>/dt = i(Delta + i gamma)<a> - i alpha = 0, with Delta = 0.7, gamma = 0.4.
        let want = alpha / Complex64::new(0.7, 0.4);
        let got = s.rho.expect(&a).to_c64();
        assert!((got - want).norm() < 1e-9 * want.norm(), "{got} {want}");
        assert!((s.rho.trace().to_c64() - 1.0).norm() < 1e-14);
        assert!(s.rho.hermiticity_error() < 1e-15);
        assert!(s.rho.is_positive_semidefinite(1e-12));
    }

    #[test]
    fn undriven_state_is_vacuum() {
        let (b, l, _) = driven_damped_oscillator(0.0);
        let s = steady_state(&l, b.len()).unwrap();
        assert!((s.rho.population(0) - 1.0).abs() < 1e-14);
        for i in 1..b.len() {
            assert!(s.rho.population(i).abs() < 1e-14);
        }
    }
}
