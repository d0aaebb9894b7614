//! Dormand-Prince 5(4) integrator for small complex linear systems.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Unused when std is linked (its inherent f64 methods take precedence).
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Tolerances and budget for [`solve`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-11,
            atol: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

/// Integrates `y' = f(t, y)` from `t_out[0]` (where `y = y0`) and returns the
/// state at every requested time. `t_out` must be non-decreasing.
pub fn solve<F>(
    mut f: F,
    y0: &[Complex64],
    t_out: &[f64],
    opts: OdeOptions,
) -> Result<Vec<Vec<Complex64>>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let mut out = Vec::with_capacity(t_out.len());
    if t_out.is_empty() {
        return Ok(out);
    }
    let mut t = t_out[0];
    let mut y = y0.to_vec();
    out.push(y.clone());

    let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut y5 = vec![Complex64::new(0.0, 0.0); n];
    let span = t_out[t_out.len() - 1] - t;
    let mut h = (span * 1e-3).max(1e-6);
    let mut steps = 0usize;
    let mut last_err = 0.0;

    for &target in &t_out[1..] {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::NonConvergence { residual: last_err });
            }
            steps += 1;
            let clipped = h >= target - t;
            let h_step = if clipped { target - t } else { h };
            f(t, &y, &mut k[0]);
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += kj[i] * (h_step * A[s][j]);
                    }
                    tmp[i] = acc;
                }
                f(t + C[s] * h_step, &tmp, &mut k[s]);
            }
            let mut err: f64 = 0.0;
            for i in 0..n {
                let mut s5 = Complex64::new(0.0, 0.0);
                let mut s4 = Complex64::new(0.0, 0.0);
                for j in 0..7 {
                    s5 += k[j][i] * B5[j];
                    s4 += k[j][i] * B4[j];
                }
                y5[i] = y[i] + s5 * h_step;
                let sc = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
                let e = ((s5 - s4) * h_step).norm() / sc;
                err = err.max(e);
            }
            last_err = err;
            let accepted = err <= 1.0;
            if accepted {
                t = if clipped { target } else { t + h_step };
                y.copy_from_slice(&y5);
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !factor.is_finite() {
                h *= 0.2;
            } else if accepted && clipped {
                // A short step to hit an output time says nothing about the scale.
                h = h.max(h_step * factor);
            } else {
                h = h_step * factor;
            }
            if h < 1e-14 * span.max(1.0) {
                return Err(Error::NonConvergence { residual: last_err });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
