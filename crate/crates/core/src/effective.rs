//! Effective three-boson model: the collective Rydberg excitation `c` gets a
//! Kerr term `kappa_r / 2 c+c+cc` and a two-quanta loss at rate `kappa_i`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{Detunings, SystemParams};
use crate::perturbative::{
    first_order, second_order_with_cc_row, InteractionKernel, SecondOrderMoments,
    DENOMINATOR_FLOOR, SATURATION_TOL,
};

/// `kappa = kappa_r - i kappa_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveNonlinearity {
    pub kappa: Complex64,
    pub kappa_r: f64,
    pub kappa_i: f64,
    /// `1 / ((D_r - kappa/2)(D_r + D_e - Omega^2/4D_e) - Omega^2/4)`, which
    /// must reproduce the blockade kernel.
    pub reconstructed_k: Complex64,
}

/// ```text
/// kappa = 2 V_b / (V - V_b) * (Omega^2 / (4 (D_r + D_e - Omega^2/4D_e)) - D_r)
/// ```
pub fn effective_kappa(
    p: &SystemParams,
    d: &Detunings,
    kernel: &InteractionKernel,
) -> Result<EffectiveNonlinearity> {
    let v_b = kernel.v_b;
    let gap = p.volume - v_b;
    if gap.norm() <= SATURATION_TOL * p.volume.abs() {
        return Err(Error::BlockadeSaturation {
            bubble_volume_re: v_b.re,
            bubble_volume_im: v_b.im,
            volume: p.volume,
        });
    }
    let om2 = p.omega_cf * p.omega_cf;
    let x = if om2 == 0.0 {
        d.d_e + d.d_r
    } else {
        d.d_e + d.d_r - om2 / (4.0 * d.d_e)
    };
    if x.norm() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateKernel { modulus: x.norm() });
    }
    let kappa = if v_b.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        2.0 * v_b / gap * (om2 / (4.0 * x) - d.d_r)
    };
    let den = (d.d_r - 0.5 * kappa) * x - 0.25 * om2;
    if den.norm() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateKernel {
            modulus: den.norm(),
        });
    }
    Ok(EffectiveNonlinearity {
        kappa,
        kappa_r: kappa.re,
        kappa_i: -kappa.im,
        reconstructed_k: 1.0 / den,
    })
}

/// Second-order moments of the effective model: the perturbative system with
/// the `<cc>` row replaced by `<cc> = Omega / (2 (D_r - kappa/2)) <bc>`.
pub fn effective_second_order(
    p: &SystemParams,
    d: &Detunings,
    kappa: &EffectiveNonlinearity,
) -> Result<SecondOrderMoments> {
    let fo = first_order(p, d)?;
    second_order_with_cc_row(p, d, &fo, kappa.kappa)
}
