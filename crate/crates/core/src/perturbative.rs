//! Lowest-order steady state: first-order amplitudes, the interaction kernel
//! and the closed 6x6 system of two-operator moments.

use core::f64::consts::PI;

use num_complex::Complex64;
// Unused when std is linked (its inherent f64 methods take precedence).
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{condition_1, Lu, Matrix};
use crate::params::{Detunings, SystemParams};
use crate::quadrature;

/// Smallest modulus accepted for a denominator.
pub const DENOMINATOR_FLOOR: f64 = 1e-14;
/// `|1 - V_b / V|` at or below this means the sample is fully blockaded.
pub const SATURATION_TOL: f64 = 1e-12;
/// Largest acceptable 1-norm condition number of the moment system.
pub const MAX_CONDITION: f64 = 1e12;
/// Evaluation budget of the radial kernel quadrature.
pub const QUADRATURE_BUDGET: usize = 1_000_000;
/// Relative accuracy of the radial kernel quadrature.
pub const QUADRATURE_RTOL: f64 = 1e-10;

/// `<a>`, `<b>`, `<c>` to first order in the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderState {
    pub a1: Complex64,
    /// Collective intermediate-state coherence, `sqrt(N) <sigma_ge>`.
    pub b1: Complex64,
    /// Collective Rydberg coherence, `sqrt(N) <sigma_gr>`.
    pub c1: Complex64,
}

/// Blockade kernel `K`, bubble volume `V_b` and bubble count `N_b = V / V_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionKernel {
    pub k: Complex64,
    pub v_b: Complex64,
    /// Infinite (real part) when `V_b = 0`.
    pub n_b: Complex64,
}

/// Same-time moments `<aa>`, `<ab>`, `<ac>`, `<bb>`, `<bc>`, `<cc>` to second order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderMoments {
    pub aa: Complex64,
    pub ab: Complex64,
    pub ac: Complex64,
    pub bb: Complex64,
    pub bc: Complex64,
    pub cc: Complex64,
}

impl SecondOrderMoments {
    /// Components in the fixed order `aa, ab, ac, bb, bc, cc`.
    pub fn to_array(&self) -> [Complex64; 6] {
        [self.aa, self.ab, self.ac, self.bb, self.bc, self.cc]
    }

    pub fn from_array(v: [Complex64; 6]) -> Self {
        SecondOrderMoments {
            aa: v[0],
            ab: v[1],
            ac: v[2],
            bb: v[3],
            bc: v[4],
            cc: v[5],
        }
    }
}

fn check_denominator(z: Complex64) -> Result<Complex64> {
    if z.norm() > DENOMINATOR_FLOOR && z.is_finite() {
        Ok(z)
    } else {
        Err(Error::SingularDenominator { modulus: z.norm() })
    }
}

/// Solves the three linear steady-state equations
///
/// ```text
/// D_c a = alpha + G b,   D_e b = G a + (Omega/2) c,   D_r c = (Omega/2) b
/// ```
///
/// with `G = sqrt(g2N)`.
pub fn first_order(p: &SystemParams, d: &Detunings) -> Result<FirstOrderState> {
    let g = p.collective_coupling();
    let om = p.omega_cf;
    if om != 0.0 {
        check_denominator(d.d_r)?;
    }
    let de_eff = d.d_e - om * om / (4.0 * d.d_r);
    let den = check_denominator(d.d_c * de_eff - p.g2n)?;
    let a1 = p.alpha * de_eff / den;
    let b1 = p.alpha * g / den;
    let c1 = if om == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        om * b1 / (2.0 * d.d_r)
    };
    Ok(FirstOrderState { a1, b1, c1 })
}

/// Largest residual of the first-order equations relative to the drive.
pub fn first_order_residual(p: &SystemParams, d: &Detunings, fo: &FirstOrderState) -> f64 {
    let g = p.collective_coupling();
    let h = 0.5 * p.omega_cf;
    let r = [
        d.d_c * fo.a1 - p.alpha - g * fo.b1,
        d.d_e * fo.b1 - g * fo.a1 - h * fo.c1,
        d.d_r * fo.c1 - h * fo.b1,
    ];
    let scale = p.alpha.abs().max(f64::MIN_POSITIVE);
    r.iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
}

// X = D_e + D_r - Omega^2 / 4 D_e
fn x_factor(p: &SystemParams, d: &Detunings) -> Result<Complex64> {
    let om2 = p.omega_cf * p.omega_cf;
    if om2 != 0.0 && d.d_e.norm() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateKernel {
            modulus: d.d_e.norm(),
        });
    }
    Ok(d.d_e + d.d_r - om2 / (4.0 * d.d_e))
}

// A = X D_r - Omega^2 / 4, the C6 = 0 kernel denominator.
fn kernel_denominator(p: &SystemParams, d: &Detunings) -> Result<(Complex64, Complex64)> {
    let x = x_factor(p, d)?;
    let a = x * d.d_r - 0.25 * p.omega_cf * p.omega_cf;
    if a.norm() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateKernel { modulus: a.norm() });
    }
    Ok((x, a))
}

/// Blockade ("bubble") volume
///
/// ```text
/// V_b = (sqrt(2) pi^2 / 3) sqrt(-C6 / (D_r - Omega^2 / (4 (D_e + D_r) - Omega^2 / D_e)))
/// ```
///
/// on the principal branch.
pub fn bubble_volume(p: &SystemParams, d: &Detunings) -> Result<Complex64> {
    if p.c6 == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let om2 = p.omega_cf * p.omega_cf;
    let mut inner = d.d_r;
    if om2 != 0.0 {
        if d.d_e.norm() < DENOMINATOR_FLOOR {
            return Err(Error::DegenerateKernel {
                modulus: d.d_e.norm(),
            });
        }
        let q = 4.0 * (d.d_e + d.d_r) - om2 / d.d_e;
        if q.norm() < DENOMINATOR_FLOOR {
            return Err(Error::DegenerateKernel { modulus: q.norm() });
        }
        inner -= om2 / q;
    }
    if inner.norm() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateKernel {
            modulus: inner.norm(),
        });
    }
    Ok((2.0f64.sqrt() * PI * PI / 3.0) * (-p.c6 / inner).sqrt())
}

/// Radius of the sphere of volume `volume`.
pub fn sphere_radius(volume: f64) -> f64 {
    (3.0 * volume / (4.0 * PI)).cbrt()
}

/// Large-sample kernel `K = (1 - V_b / V) / ((D_e + D_r - Omega^2/4D_e) D_r - Omega^2/4)`.
pub fn kernel_analytic(p: &SystemParams, d: &Detunings) -> Result<InteractionKernel> {
    let (_, a) = kernel_denominator(p, d)?;
    let v_b = bubble_volume(p, d)?;
    let one_minus = 1.0 - v_b / p.volume;
    if one_minus.norm() <= SATURATION_TOL {
        return Err(Error::BlockadeSaturation {
            bubble_volume_re: v_b.re,
            bubble_volume_im: v_b.im,
            volume: p.volume,
        });
    }
    let n_b = if v_b.norm() == 0.0 {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        p.volume / v_b
    };
    Ok(InteractionKernel {
        k: one_minus / a,
        v_b,
        n_b,
    })
}

/// Finite-sphere kernel
///
/// ```text
/// K(R) = (3 / R^3) int_0^R r^2 dr / ((D_e + D_r - Omega^2/4D_e)(D_r - C6/2r^6) - Omega^2/4)
/// ```
///
/// by adaptive Gauss-Kronrod quadrature. The integrand is rewritten as
/// `r^8 / (A r^6 - X C6 / 2)` so that it stays finite at the origin.
pub fn kernel_quadrature(p: &SystemParams, d: &Detunings, r_max: f64) -> Result<Complex64> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "r_max",
            value: r_max,
            reason: "must be positive",
        });
    }
    let (x, a) = kernel_denominator(p, d)?;
    let shift = 0.5 * x * p.c6;
    let r3 = r_max * r_max * r_max;
    let integrand = |r: f64| {
        let r2 = r * r;
        let r6 = r2 * r2 * r2;
        let num = r6 * r2;
        if num == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            num / (a * r6 - shift)
        }
    };
    // Split at the blockade radius, where the integrand turns over.
    let rb = (shift / a).norm().powf(1.0 / 6.0);
    let mut breaks = [0.0, r_max, r_max];
    let mut nseg = 1;
    if rb.is_finite() && rb > 0.0 && rb < r_max {
        breaks = [0.0, rb, r_max];
        nseg = 2;
    }
    // Scale estimate from the C6 = 0 value, then tighten to the actual |K|.
    let scale0 = r3 / (3.0 * a.norm());
    let mut tol = QUADRATURE_RTOL * scale0;
    for _ in 0..3 {
        let mut total = Complex64::new(0.0, 0.0);
        let mut budget = QUADRATURE_BUDGET;
        for s in 0..nseg {
            let part = quadrature::integrate(
                integrand,
                breaks[s],
                breaks[s + 1],
                tol / nseg as f64,
                budget,
            )?;
            budget -= part.evaluations;
            total += part.value;
        }
        let needed = QUADRATURE_RTOL * total.norm();
        if tol <= needed * 1.000_001 || needed == 0.0 {
            return Ok(3.0 * total / r3);
        }
        tol = needed;
    }
    Err(Error::QuadratureFailure {
        evaluations: QUADRATURE_BUDGET,
        error_estimate: tol,
    })
}

/// Matrix and right-hand side of the second-order system, rows in the order
/// of the unknowns `aa, ab, ac, bb, bc, cc`. The last row is returned
/// separately so the effective model can substitute its own.
fn moment_rows(
    p: &SystemParams,
    d: &Detunings,
    fo: &FirstOrderState,
) -> Result<(Matrix, [Complex64; 6])> {
    let g = p.collective_coupling();
    let om = p.omega_cf;
    let al = p.alpha;
    let one = Complex64::new(1.0, 0.0);
    let mut m = Matrix::identity(6);
    let mut rhs = [Complex64::new(0.0, 0.0); 6];

    let dc = check_denominator(d.d_c)?;
    m[(0, 1)] = -g / dc;
    rhs[0] = al / dc * fo.a1;

    let s = check_denominator(d.d_c + d.d_e)?;
    m[(1, 2)] = -om / (2.0 * s);
    m[(1, 0)] = -g / s;
    m[(1, 3)] = -g / s;
    rhs[1] = al / s * fo.b1;

    let s = check_denominator(d.d_c + d.d_r)?;
    m[(2, 4)] = -g / s;
    m[(2, 1)] = -om / (2.0 * s);
    rhs[2] = al / s * fo.c1;

    let de = check_denominator(d.d_e)?;
    m[(3, 4)] = -om / (2.0 * de);
    m[(3, 1)] = -g / de;

    let s = check_denominator(d.d_e + d.d_r)?;
    m[(4, 5)] = -om / (2.0 * s);
    m[(4, 2)] = -g / s;
    m[(4, 3)] = -om / (2.0 * s);

    m[(5, 5)] = one;
    Ok((m, rhs))
}

fn solve_moments(m: Matrix, rhs: [Complex64; 6]) -> Result<SecondOrderMoments> {
    let lu = Lu::factor(m.clone())?;
    let cond = condition_1(&m, &lu);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition: cond });
    }
    let x = lu.solve(&rhs);
    Ok(SecondOrderMoments::from_array([
        x[0], x[1], x[2], x[3], x[4], x[5],
    ]))
}

/// Assembles the six second-order equations and solves them.
pub fn second_order(
    p: &SystemParams,
    d: &Detunings,
    fo: &FirstOrderState,
    k: &InteractionKernel,
) -> Result<SecondOrderMoments> {
    let (mut m, rhs) = moment_rows(p, d, fo)?;
    let g = p.collective_coupling();
    let om = p.omega_cf;
    m[(5, 2)] = -0.5 * om * g * k.k;
    m[(5, 1)] = -om * om * g / (4.0 * d.d_e) * k.k;
    solve_moments(m, rhs)
}

/// Same system with the `<cc>` row `(D_r - kappa/2) <cc> = (Omega/2) <bc>`.
pub(crate) fn second_order_with_cc_row(
    p: &SystemParams,
    d: &Detunings,
    fo: &FirstOrderState,
    kappa: Complex64,
) -> Result<SecondOrderMoments> {
    let (mut m, rhs) = moment_rows(p, d, fo)?;
    let dr_eff = check_denominator(d.d_r - 0.5 * kappa)?;
    m[(5, 4)] = -p.omega_cf / (2.0 * dr_eff);
    solve_moments(m, rhs)
}

/// Relative residual of the printed second-order equations at `so`.
pub fn second_order_residual(
    p: &SystemParams,
    d: &Detunings,
    fo: &FirstOrderState,
    k: &InteractionKernel,
    so: &SecondOrderMoments,
) -> Result<f64> {
    let (mut m, rhs) = moment_rows(p, d, fo)?;
    let g = p.collective_coupling();
    m[(5, 2)] = -0.5 * p.omega_cf * g * k.k;
    m[(5, 1)] = -p.omega_cf * p.omega_cf * g / (4.0 * d.d_e) * k.k;
    let x = so.to_array();
    let mx = m.mul_vec(&x);
    let scale = x
        .iter()
        .chain(rhs.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    Ok(mx
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{effective_detunings, DampingMode};

    pub(crate) fn dispersive() -> SystemParams {
        SystemParams {
            delta_c: -6.0,
            delta_e: -35.0,
            delta_r: 0.4,
            gamma_c_l: 1.0 / 3.0,
            gamma_c_r: 0.0,
            gamma_e: 1.0,
            gamma_r: 0.01,
            gamma_d: 0.15,
            omega_cf: 10.0,
            g2n: 2000.0 / 3.0,
            alpha: 0.01,
            c6: -8.83e6,
            volume: 40.0 * PI * 225.0,
            n_atoms: 10_000,
        }
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn empty_cavity() {
        let mut p = dispersive();
        p.g2n = 0.0;
        let (d, _) = effective_detunings(&p, DampingMode::Radiative);
        let fo = first_order(&p, &d).unwrap();
        assert!(rel(fo.a1, p.alpha / d.d_c) < 1e-15);
        assert_eq!(fo.b1, Complex64::new(0.0, 0.0));
        assert_eq!(fo.c1, Complex64::new(0.0, 0.0));
        let k = kernel_analytic(&p, &d).unwrap();
        let so = second_order(&p, &d, &fo, &k).unwrap();
        assert!(rel(so.aa, fo.a1 * fo.a1) < 1e-14);
        assert_eq!(so.bb.norm() + so.cc.norm() + so.ab.norm(), 0.0);
    }

    #[test]
    fn two_level_limit() {
        let mut p = dispersive();
        p.omega_cf = 0.0;
        let (d, _) = effective_detunings(&p, DampingMode::Radiative);
        let fo = first_order(&p, &d).unwrap();
        assert!(rel(fo.a1, p.alpha / (d.d_c - p.g2n / d.d_e)) < 1e-14);
        assert_eq!(fo.c1, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn first_order_residual_is_tiny() {
        let p = dispersive();
        for mode in [DampingMode::Radiative, DampingMode::Dephasing] {
            let (d, _) = effective_detunings(&p, mode);
            let fo = first_order(&p, &d).unwrap();
            assert!(first_order_residual(&p, &d, &fo) < 1e-12);
        }
    }

    #[test]
    fn linear_medium_factorizes() {
        let mut p = dispersive();
        p.c6 = 0.0;
        let (d, _) = effective_detunings(&p, DampingMode::Dephasing);
        let fo = first_order(&p, &d).unwrap();
        let k = kernel_analytic(&p, &d).unwrap();
        assert_eq!(k.v_b, Complex64::new(0.0, 0.0));
        assert!(k.n_b.re.is_infinite());
        let x = d.d_e + d.d_r - p.omega_cf * p.omega_cf / (4.0 * d.d_e);
        assert_eq!(k.k, 1.0 / (x * d.d_r - 25.0));
        let so = second_order(&p, &d, &fo, &k).unwrap();
        let want = [
            fo.a1 * fo.a1,
            fo.a1 * fo.b1,
            fo.a1 * fo.c1,
            fo.b1 * fo.b1,
            fo.b1 * fo.c1,
            fo.c1 * fo.c1,
        ];
        for (got, want) in so.to_array().iter().zip(want) {
            assert!(rel(*got, want) < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn second_order_residual_is_tiny() {
        let p = dispersive();
        let (d, _) = effective_detunings(&p, DampingMode::Dephasing);
        let fo = first_order(&p, &d).unwrap();
        let k = kernel_analytic(&p, &d).unwrap();
        let so = second_order(&p, &d, &fo, &k).unwrap();
        assert!(second_order_residual(&p, &d, &fo, &k, &so).unwrap() < 1e-10);
    }

    #[test]
    fn alpha_scaling() {
        let p = dispersive();
        let mut p2 = p;
        p2.alpha *= 2.0;
        let (d, _) = effective_detunings(&p, DampingMode::Dephasing);
        let fo = first_order(&p, &d).unwrap();
        let fo2 = first_order(&p2, &d).unwrap();
        assert!(rel(fo2.a1, 2.0 * fo.a1) < 1e-14);
        assert!(rel(fo2.c1, 2.0 * fo.c1) < 1e-14);
        let k = kernel_analytic(&p, &d).unwrap();
        let so = second_order(&p, &d, &fo, &k).unwrap();
        let so2 = second_order(&p2, &d, &fo2, &k).unwrap();
        for (a, b) in so2.to_array().iter().zip(so.to_array()) {
            assert!(rel(*a, 4.0 * b) < 1e-12);
        }
    }

    #[test]
    fn bubble_volume_limits() {
        // Dispersive: |D_e|, |D_r| >> Omega.
        let mut p = dispersive();
        p.omega_cf = 0.1;
        p.gamma_r = 1e-4;
        let (d, _) = effective_detunings(&p, DampingMode::Radiative);
        let vb = bubble_volume(&p, &d).unwrap();
        let want = 2.0f64.sqrt() * PI * PI / 3.0 * (8.83e6 / 0.4).sqrt();
        assert!(rel(vb, Complex64::new(want, 0.0)) < 1e-2);
        assert!(vb.re > 0.0);

        // Resonant: Delta_e = Delta_r = 0, Omega >> gamma_e >> gamma_r.
        let mut p = dispersive();
        p.delta_e = 0.0;
        p.delta_r = 0.0;
        p.omega_cf = 30.0;
        p.gamma_r = 1e-3;
        let (d, _) = effective_detunings(&p, DampingMode::Radiative);
        let vb = bubble_volume(&p, &d).unwrap();
        let want = PI * PI / 3.0 * Complex64::new(1.0, -1.0) * 8.83e6f64.sqrt();
        assert!(rel(vb, want) < 0.05, "{vb} vs {want}");
    }

    #[test]
    fn quadrature_at_zero_c6_is_exact() {
        let mut p = dispersive();
        p.c6 = 0.0;
        let (d, _) = effective_detunings(&p, DampingMode::Dephasing);
        let k = kernel_analytic(&p, &d).unwrap();
        for r in [1.0, 17.0, 300.0] {
            assert!(rel(kernel_quadrature(&p, &d, r).unwrap(), k.k) < 1e-13);
        }
    }

    #[test]
    fn quadrature_approaches_analytic_for_large_spheres() {
        let p = dispersive();
        let (d, _) = effective_detunings(&p, DampingMode::Dephasing);
        let vb = bubble_volume(&p, &d).unwrap().norm();
        let r = sphere_radius(1e4 * vb);
        let mut q = p;
        q.volume = 4.0 * PI * r * r * r / 3.0;
        let ka = kernel_analytic(&q, &d).unwrap();
        let kq = kernel_quadrature(&q, &d, r).unwrap();
        assert!(rel(kq, ka.k) < 1e-6, "{kq} vs {}", ka.k);
    }

    #[test]
    fn saturation_is_reported() {
        // Without control field and with negligible damping V_b is real.
        let mut p = dispersive();
        p.omega_cf = 0.0;
        p.gamma_r = 1e-15;
        p.delta_r = 1.0;
        p.c6 = -1e6;
        let (d, _) = effective_detunings(&p, DampingMode::Radiative);
        let vb = bubble_volume(&p, &d).unwrap();
        p.volume = vb.re;
        assert!(matches!(
            kernel_analytic(&p, &d),
            Err(Error::BlockadeSaturation { .. })
        ));
    }

    #[test]
    fn singular_first_order_is_reported() {
        let mut p = dispersive();
        p.omega_cf = 0.0;
        let mut d = effective_detunings(&p, DampingMode::Radiative).0;
        // D_c D_e = g2N exactly.
        p.g2n = 4.0;
        d.d_c = Complex64::new(2.0, 0.0);
        d.d_e = Complex64::new(2.0, 0.0);
        assert!(matches!(
            first_order(&p, &d),
            Err(Error::SingularDenominator { .. })
        ));
    }
}
