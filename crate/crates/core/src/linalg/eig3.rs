//! Eigen-decomposition of a general complex 3x3 matrix.

use num_complex::Complex64;
// Unused when std is linked (its inherent f64 methods take precedence).
#[allow(unused_imports)]
use num_traits::Float;

use super::lu::{condition_1, Lu, Matrix};

/// Eigenvalues, right eigenvectors (columns) and the 1-norm condition
/// number of the eigenvector matrix.
#[derive(Debug, Clone)]
pub struct Eigen3 {
    pub values: [Complex64; 3],
    /// `vectors[i][k]` is component `i` of eigenvector `k`.
    pub vectors: [[Complex64; 3]; 3],
    /// `f64::INFINITY` when the eigenvectors are linearly dependent.
    pub vector_condition: f64,
}

/// Relative separation below which two eigenvalues count as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-6;

fn cubic_roots(b: Complex64, c: Complex64, d: Complex64) -> [Complex64; 3] {
    // Depressed cubic t^3 + p t + q with lambda = t - b/3.
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let u3a = -q / 2.0 + disc;
    let u3b = -q / 2.0 - disc;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    let omega = Complex64::new(-0.5, 0.75f64.sqrt());
    let mut t = [Complex64::new(0.0, 0.0); 3];
    if u3.norm() > 0.0 {
        let mut u = u3.powf(1.0 / 3.0);
        for tk in t.iter_mut() {
            *tk = u - p / (3.0 * u);
            u *= omega;
        }
    }
    let mut roots = [t[0] - shift, t[1] - shift, t[2] - shift];
    // Newton polishing on the monic cubic.
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let f = ((*r + b) * *r + c) * *r + d;
            let df = (3.0 * *r + 2.0 * b) * *r + c;
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            if !step.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    roots
}

fn cross(u: &[Complex64; 3], v: &[Complex64; 3]) -> [Complex64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn norm3(v: &[Complex64; 3]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

pub fn eigen3(a: &[[Complex64; 3]; 3]) -> Eigen3 {
    let tr = a[0][0] + a[1][1] + a[2][2];
    let minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    let values = cubic_roots(-tr, minors, -det);

    let mut vectors = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (k, &lam) in values.iter().enumerate() {
        let mut m = *a;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= lam;
        }
        let cands = [
            cross(&m[0], &m[1]),
            cross(&m[0], &m[2]),
            cross(&m[1], &m[2]),
        ];
        let best = cands
            .iter()
            .max_by(|x, y| norm3(x).total_cmp(&norm3(y)))
            .copied()
            .unwrap();
        let n = norm3(&best);
        for i in 0..3 {
            vectors[i][k] = if n > 0.0 {
                best[i] / n
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
    }

    // A double root splits by ~sqrt(eps) under rounding, leaving nearly
    // parallel vectors whose condition number understates the defect.
    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let clustered = (0..3)
        .any(|i| (i + 1..3).any(|j| (values[i] - values[j]).norm() < COINCIDENCE_TOL * scale));
    let w = Matrix::from_rows(vectors);
    let vector_condition = if clustered {
        f64::INFINITY
    } else {
        match Lu::factor(w.clone()) {
            Ok(lu) => {
                let c = condition_1(&w, &lu);
                if c.is_finite() {
                    c
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    };
    Eigen3 {
        values,
        vectors,
        vector_condition,
    }
}
