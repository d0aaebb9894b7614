//! Measurable photon statistics built from the intracavity moments.
//!
//! Intensities are normalized by the incoming intensity `alpha^2 / 2 gamma_c_L`
//! and the reflected pair moment by its square.

use alloc::vec::Vec;

use num_complex::Complex64;
// Unused when std is linked (its inherent f64 methods take precedence).
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eigen3, Lu, Matrix};
use crate::ode::{self, OdeOptions};
use crate::params::{Detunings, SystemParams};
use crate::perturbative::{FirstOrderState, SecondOrderMoments};

/// Below this `|<a>|` the transmitted intensity is treated as zero.
pub const AMPLITUDE_FLOOR: f64 = 1e-30;
/// Tiny negative values above this are round-off and get clipped to zero.
pub const CLIP_TOL: f64 = 1e-12;
/// Above this eigenvector condition number `g2(tau)` is integrated numerically.
pub const MAX_EIGENVECTOR_CONDITION: f64 = 1e8;
/// Accuracy demanded of either `g2(tau)` path.
pub const TAU_TOL: f64 = 1e-9;

/// Reflected intensity and pair moment, unclipped, in units of the incoming
/// intensity (and its square).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectedMoments {
    pub i_refl: f64,
    pub pair_refl: f64,
}

impl ReflectedMoments {
    /// `pair / intensity^2`.
    pub fn g2_r_zero(&self) -> Result<f64> {
        let den = self.i_refl * self.i_refl;
        let g2 = self.pair_refl / den;
        if !(den > 0.0) || !g2.is_finite() {
            return Err(Error::ZeroDenominator {
                quantity: "reflected intensity",
                value: self.i_refl,
            });
        }
        Ok(g2)
    }
}

/// Zero-delay statistics of the transmitted and reflected light.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub g2_t_zero: f64,
    pub g2_r_zero: f64,
    pub i_trans: f64,
    pub i_refl: f64,
    pub pair_refl: f64,
    /// Values before round-off clipping.
    pub raw: ReflectedMoments,
}

fn clip(x: f64) -> f64 {
    if x < 0.0 && x >= -CLIP_TOL {
        0.0
    } else {
        x
    }
}

fn check_amplitude(fo: &FirstOrderState) -> Result<()> {
    let m = fo.a1.norm();
    if m > AMPLITUDE_FLOOR && (m * m * m * m) > 0.0 {
        Ok(())
    } else {
        Err(Error::ZeroDenominator {
            quantity: "transmitted intensity",
            value: m * m,
        })
    }
}

/// `g2_t(0) = |<aa>|^2 / |<a>|^4`.
pub fn transmitted_g2_zero(fo: &FirstOrderState, so: &SecondOrderMoments) -> Result<f64> {
    check_amplitude(fo)?;
    let n = fo.a1.norm_sqr();
    Ok(so.aa.norm_sqr() / (n * n))
}

/// `2 gamma_c_R |<a>|^2` over the incoming intensity.
pub fn transmitted_intensity(p: &SystemParams, fo: &FirstOrderState) -> f64 {
    4.0 * p.gamma_c_l * p.gamma_c_r * fo.a1.norm_sqr() / (p.alpha * p.alpha)
}

/// Reflected intensity and pair moment from the input-output expansion
///
/// ```text
/// <A+A+AA> = (2g)^2 <a+a+aa> + 4 i alpha g (<a+a+a> - <a+aa>) + i alpha^3/g (<a+> - <a>)
///          + alpha^2 (4 <a+a> - <a+a+> - <aa>) + alpha^4 / (2g)^2
/// <A+A>    = 2g <a+a> + i alpha (<a+> - <a>) + alpha^2 / 2g
/// ```
///
/// with `g = gamma_c_L`, evaluated with the lowest-order factorizations.
pub fn reflected_moments(
    p: &SystemParams,
    fo: &FirstOrderState,
    so: &SecondOrderMoments,
) -> ReflectedMoments {
    let g = p.gamma_c_l;
    let al = p.alpha;
    let i = Complex64::i();
    let a = fo.a1;
    let aa = so.aa;
    let n = a.norm_sqr();
    let adag_adag_a = aa.conj() * a;
    let adag_a_a = a.conj() * aa;

    let pair = (2.0 * g) * (2.0 * g) * aa.norm_sqr()
        + 4.0 * i * al * g * (adag_adag_a - adag_a_a)
        + i * (al * al * al / g) * (a.conj() - a)
        + al * al * (4.0 * n - aa.conj() - aa)
        + al.powi(4) / ((2.0 * g) * (2.0 * g));
    let inten = 2.0 * g * n + i * al * (a.conj() - a) + al * al / (2.0 * g);

    let i0 = al * al / (2.0 * g);
    ReflectedMoments {
        i_refl: inten.re / i0,
        pair_refl: pair.re / (i0 * i0),
    }
}

/// Builds the full zero-delay report.
pub fn correlation_report(
    p: &SystemParams,
    fo: &FirstOrderState,
    so: &SecondOrderMoments,
) -> Result<CorrelationReport> {
    let g2_t_zero = transmitted_g2_zero(fo, so)?;
    let raw = reflected_moments(p, fo, so);
    let g2_r_zero = clip(raw.g2_r_zero()?);
    Ok(CorrelationReport {
        g2_t_zero,
        g2_r_zero,
        i_trans: transmitted_intensity(p, fo),
        i_refl: clip(raw.i_refl),
        pair_refl: clip(raw.pair_refl),
        raw,
    })
}

/// Delay-resolved correlations on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TauTrace {
    pub tau_grid: Vec<f64>,
    /// Transmitted `g2(tau)`.
    pub g2_tau: Vec<f64>,
    /// `<a(t + tau) a(t)>`.
    pub raw: Vec<Complex64>,
    /// Reflected `g2(tau)`. Experimental: built from the same `<a(t+tau) a(t)>`
    /// and the left-mirror input-output relation.
    pub g2_r_tau: Vec<f64>,
    /// True when the eigen-decomposition was too ill-conditioned and the
    /// trace was integrated numerically.
    pub integrated: bool,
}

/// Generator `-i M` of the delay equations and the drive `-i alpha a1 e_1`.
fn tau_system(
    p: &SystemParams,
    d: &Detunings,
    fo: &FirstOrderState,
) -> ([[Complex64; 3]; 3], [Complex64; 3]) {
    let g = Complex64::new(p.collective_coupling(), 0.0);
    let h = Complex64::new(0.5 * p.omega_cf, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let m = [[-d.d_c, g, z], [g, -d.d_e, h], [z, h, -d.d_r]];
    let mi = Complex64::new(0.0, -1.0);
    let mut a = [[z; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            a[r][c] = mi * m[r][c];
        }
    }
    (a, [mi * p.alpha * fo.a1, z, z])
}

/// Long-delay limit of `(<aa>, <ba>, <ca>)`.
pub fn tau_fixed_point(
    p: &SystemParams,
    d: &Detunings,
    fo: &FirstOrderState,
) -> Result<[Complex64; 3]> {
    let (a, f) = tau_system(p, d, fo);
    let lu = Lu::factor(Matrix::from_rows(a))?;
    let v = lu.solve(&[-f[0], -f[1], -f[2]]);
    Ok([v[0], v[1], v[2]])
}

fn solve_by_eigen(
    a: &[[Complex64; 3]; 3],
    v0: &[Complex64; 3],
    v_inf: &[Complex64; 3],
    taus: &[f64],
) -> core::result::Result<Vec<Complex64>, f64> {
    let e = eigen3(a);
    if !(e.vector_condition <= MAX_EIGENVECTOR_CONDITION) {
        return Err(e.vector_condition);
    }
    let w = Matrix::from_rows(e.vectors);
    let lu = Lu::factor(w.clone()).map_err(|_| f64::INFINITY)?;
    let dv = [v0[0] - v_inf[0], v0[1] - v_inf[1], v0[2] - v_inf[2]];
    let coef = lu.solve(&dv);
    // Reconstruction check at tau = 0.
    let back = w.mul_vec(&coef);
    let scale = dv.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let err = back
        .iter()
        .zip(&dv)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    if scale > 0.0 && err > TAU_TOL * scale {
        return Err(e.vector_condition);
    }
    Ok(taus
        .iter()
        .map(|&t| {
            let mut v = v_inf[0];
            for k in 0..3 {
                v += coef[k] * (e.values[k] * t).exp() * e.vectors[0][k];
            }
            v
        })
        .collect())
}

/// Integrates `dv/dtau = -i alpha a1 e_1 - i M v` from `v(0) = (<aa>, <ab>, <ac>)`
/// and returns `g2(tau) = |v_1(tau)|^2 / |a1|^4` on a uniform grid.
pub fn g2_tau(
    p: &SystemParams,
    d: &Detunings,
    fo: &FirstOrderState,
    so: &SecondOrderMoments,
    tau_max: f64,
    n_pts: usize,
) -> Result<TauTrace> {
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tau_max",
            value: tau_max,
            reason: "must be positive",
        });
    }
    if n_pts < 2 {
        return Err(Error::InvalidParameter {
            name: "n_pts",
            value: n_pts as f64,
            reason: "must be at least 2",
        });
    }
    check_amplitude(fo)?;
    let tau_grid: Vec<f64> = (0..n_pts)
        .map(|k| tau_max * k as f64 / (n_pts - 1) as f64)
        .collect();
    let (a, f) = tau_system(p, d, fo);
    let v0 = [so.aa, so.ab, so.ac];
    let v_inf = tau_fixed_point(p, d, fo)?;

    let (mut raw, integrated) = match solve_by_eigen(&a, &v0, &v_inf, &tau_grid) {
        Ok(r) => (r, false),
        Err(cond) => {
            let opts = OdeOptions {
                rtol: TAU_TOL * 1e-2,
                atol: 1e-3 * TAU_TOL * v0.iter().map(|z| z.norm()).fold(0.0, f64::max),
                ..OdeOptions::default()
            };
            let ys = ode::solve(
                |_, y, dy| {
                    for r in 0..3 {
                        dy[r] = f[r] + a[r][0] * y[0] + a[r][1] * y[1] + a[r][2] * y[2];
                    }
                },
                &v0,
                &tau_grid,
                opts,
            )
            .map_err(|_| Error::DegenerateSpectrum {
                eigenvector_condition: cond,
            })?;
            (ys.into_iter().map(|y| y[0]).collect(), true)
        }
    };
    raw[0] = so.aa;

    let n2 = fo.a1.norm_sqr() * fo.a1.norm_sqr();
    let g2 = raw.iter().map(|v| v.norm_sqr() / n2).collect();

    // Reflected: <A(t+tau) A(t)> = 2g v1 + 2 i alpha a1 - alpha^2 / 2g.
    let g = p.gamma_c_l;
    let al = p.alpha;
    let drive = Complex64::new(0.0, 2.0 * al) * fo.a1 - al * al / (2.0 * g);
    let inten = 2.0 * g * fo.a1.norm_sqr() + 2.0 * al * fo.a1.im + al * al / (2.0 * g);
    let g2_r_tau = raw
        .iter()
        .map(|v| (2.0 * g * v + drive).norm_sqr() / (inten * inten))
        .collect();

    Ok(TauTrace {
        tau_grid,
        g2_tau: g2,
        raw,
        g2_r_tau,
        integrated,
    })
}
