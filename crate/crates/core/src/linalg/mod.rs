//! Small self-contained complex linear algebra.
//!
//! Everything here is sized for this crate: 3x3 and 6x6 moment systems, and
//! dense Liouvillians with at most a few thousand unknowns.

mod dd;
mod eig3;
mod lu;
mod sparse;

pub use dd::{ComplexDd, Dd};
pub use eig3::{eigen3, Eigen3};
pub use lu::{condition_1, Lu, Matrix};
pub use sparse::{CsrMatrix, TripletBuilder};

use alloc::vec::Vec;
use num_complex::Complex64;

/// Euclidean norm of a complex vector.
pub fn norm2(v: &[Complex64]) -> f64 {
    num_traits::Float::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Largest modulus in a complex vector.
pub fn norm_inf(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Solves `A x = b` with iterative refinement whose residuals are accumulated
/// in double-double arithmetic.
///
/// `lu` must factor the same matrix as `a` (held separately in sparse form so
/// residuals are cheap). Returns the refined solution and the final
/// infinity-norm of the correction relative to the solution.
pub fn solve_refined(
    lu: &Lu,
    a: &CsrMatrix,
    b: &[Complex64],
    max_iter: usize,
) -> (Vec<ComplexDd>, f64) {
    let mut x: Vec<ComplexDd> = lu.solve(b).into_iter().map(ComplexDd::from).collect();
    let mut last = f64::INFINITY;
    for _ in 0..max_iter {
        let r = a.residual_dd(b, &x);
        let r64: Vec<Complex64> = r.iter().map(|z| z.to_c64()).collect();
        let dx = lu.solve(&r64);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi = xi.add_c64(*di);
        }
        let xnorm = x.iter().map(|z| z.to_c64().norm()).fold(0.0, f64::max);
        let rel = norm_inf(&dx) / xnorm.max(f64::MIN_POSITIVE);
        // Stop once the update is below double-double resolution or stalls.
        if rel < 1e-31 || rel >= 0.5 * last {
            last = rel.min(last);
            break;
        }
        last = rel;
    }
    (x, last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn refinement_recovers_small_components() {
        // A well-conditioned system whose solution spans 30 orders of magnitude.
        let n = 5;
        let mut dense = Matrix::zeros(n);
        let mut tb = TripletBuilder::new(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = if i == j {
                    Complex64::new(4.0, 1.0)
                } else if j + 1 == i {
                    Complex64::new(0.3, -0.2)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                if v.norm() > 0.0 {
                    dense[(i, j)] = v;
                    tb.push(i, j, v);
                }
            }
        }
        let csr = tb.build();
        // Lower bidiagonal: x_k solves exactly by forward substitution in exact arithmetic;
        // the right-hand side is chosen so x = (1, 1e-8, 1e-16, 1e-24, 1e-32).
        let xs: Vec<f64> = vec![1.0, 1e-8, 1e-16, 1e-24, 1e-32];
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                b[i] += dense[(i, j)] * xs[j];
            }
        }
        // b is only known to double precision, so compare against the refined
        // solution of the rounded system, checked through its residual.
        let lu = Lu::factor(dense).unwrap();
        let (x, _) = solve_refined(&lu, &csr, &b, 10);
        let r = csr.residual_dd(&b, &x);
        for ri in r {
            assert!(ri.to_c64().norm() < 1e-30, "{:?}", ri);
        }
        // Rounding b perturbs x[1] by about eps * |b[1]| / 4.
        assert!((x[1].to_c64().re - 1e-8).abs() < 1e-16);
    }
}
