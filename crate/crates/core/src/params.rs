//! Physical parameter set and the complex detunings derived from it.

use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for the consistency of `g2N` and the cooperativity when both are given.
pub const COUPLING_CONSISTENCY_TOL: f64 = 1e-12;

/// Factor used for "much smaller than" in the dephasing-regime check.
pub const MUCH_SMALLER_FACTOR: f64 = 5.0;

/// Physical parameters of the driven atom-cavity system.
///
/// Rates and detunings are in units of `gamma_e`, `c6` in `gamma_e µm^6`,
/// `volume` in `µm^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Probe-cavity detuning `Delta_c = omega_p - omega_c`.
    pub delta_c: f64,
    /// Probe detuning from the intermediate state.
    pub delta_e: f64,
    /// Two-photon detuning from the Rydberg state.
    pub delta_r: f64,
    /// Field decay rate through the input (left) mirror.
    pub gamma_c_l: f64,
    /// Field decay rate through the output (right) mirror.
    pub gamma_c_r: f64,
    /// Intermediate-state dipole decay rate; 1 in natural units.
    pub gamma_e: f64,
    /// Radiative decay of the ground-Rydberg coherence.
    pub gamma_r: f64,
    /// Extra dephasing of the ground-Rydberg coherence (laser noise).
    pub gamma_d: f64,
    /// Control-field Rabi frequency.
    pub omega_cf: f64,
    /// Collective coupling `g^2 N`.
    pub g2n: f64,
    /// Cavity feeding rate (real).
    pub alpha: f64,
    /// Van der Waals coefficient; negative for the usual nD Rydberg states.
    pub c6: f64,
    /// Sample volume.
    pub volume: f64,
    /// Total atom number, only used for the dephasing-regime check.
    pub n_atoms: u64,
}

impl SystemParams {
    /// Total cavity field decay rate `gamma_c = gamma_c_l + gamma_c_r`.
    pub fn gamma_c(&self) -> f64 {
        self.gamma_c_l + self.gamma_c_r
    }

    /// Collective coupling `g sqrt(N)`.
    pub fn collective_coupling(&self) -> f64 {
        num_traits::Float::sqrt(self.g2n)
    }

    /// Sets `g2n` from a cooperativity `C = g^2 N / (2 gamma_e gamma_c)`.
    pub fn set_cooperativity(&mut self, cooperativity: f64) {
        self.g2n = 2.0 * cooperativity * self.gamma_e * self.gamma_c();
    }

    pub fn with_cooperativity(mut self, cooperativity: f64) -> Self {
        self.set_cooperativity(cooperativity);
        self
    }

    /// Checks every domain constraint on the parameter set.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("delta_c", self.delta_c),
            ("delta_e", self.delta_e),
            ("delta_r", self.delta_r),
            ("omega_cf", self.omega_cf),
            ("alpha", self.alpha),
            ("c6", self.c6),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
        }
        let positive = [
            ("gamma_c_L", self.gamma_c_l),
            ("gamma_e", self.gamma_e),
            ("gamma_r", self.gamma_r),
            ("volume", self.volume),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be positive",
                });
            }
        }
        let non_negative = [
            ("gamma_c_R", self.gamma_c_r),
            ("gamma_d", self.gamma_d),
            ("g2N", self.g2n),
        ];
        for (name, value) in non_negative {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be non-negative",
                });
            }
        }
        Ok(())
    }
}

/// Checks that an explicitly given `g2N` agrees with `2 C gamma_e gamma_c`.
pub fn check_coupling_consistency(p: &SystemParams, cooperativity: f64) -> Result<()> {
    let implied = 2.0 * cooperativity * p.gamma_e * p.gamma_c();
    let scale = p.g2n.abs().max(implied.abs());
    if scale > 0.0 && (p.g2n - implied).abs() > COUPLING_CONSISTENCY_TOL * scale {
        return Err(Error::InvalidParameter {
            name: "g2N",
            value: p.g2n,
            reason: "inconsistent with the given cooperativity (g2N = 2 C gamma_e gamma_c)",
        });
    }
    Ok(())
}

/// How the ground-Rydberg coherence is damped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DampingMode {
    /// Purely radiative damping at `gamma_r`.
    #[default]
    Radiative,
    /// Technical dephasing dominates: `gamma_r` is replaced by `gamma_d`.
    /// Valid when `gamma_r << gamma_d << N gamma_r`.
    Dephasing,
}

/// Complex effective detunings `D_k = Delta_k + i gamma_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detunings {
    pub d_c: Complex64,
    pub d_e: Complex64,
    pub d_r: Complex64,
    /// Detuning of the `e`-`r` coherence. Not needed by the closed moment system.
    pub d_er: Complex64,
}

/// Raised when the dephasing substitution is used outside `gamma_r << gamma_d << N gamma_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeWarning {
    pub gamma_r: f64,
    pub gamma_d: f64,
    pub n_gamma_r: f64,
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dephasing substitution used outside gamma_r << gamma_d << N gamma_r \
             (gamma_r = {:e}, gamma_d = {:e}, N gamma_r = {:e}, margin x{})",
            self.gamma_r, self.gamma_d, self.n_gamma_r, MUCH_SMALLER_FACTOR
        )
    }
}

/// Effective Rydberg coherence damping for the chosen mode.
pub fn rydberg_damping(p: &SystemParams, mode: DampingMode) -> f64 {
    match mode {
        DampingMode::Radiative => p.gamma_r,
        DampingMode::Dephasing => p.gamma_d,
    }
}

/// Builds the complex detunings, returning a warning when the dephasing
/// substitution is requested outside its regime of validity.
pub fn effective_detunings(
    p: &SystemParams,
    mode: DampingMode,
) -> (Detunings, Option<RegimeWarning>) {
    let gamma_r_eff = rydberg_damping(p, mode);
    let d = Detunings {
        d_c: Complex64::new(p.delta_c, p.gamma_c()),
        d_e: Complex64::new(p.delta_e, p.gamma_e),
        d_r: Complex64::new(p.delta_r, gamma_r_eff),
        d_er: Complex64::new(p.delta_r - p.delta_e, gamma_r_eff + p.gamma_e),
    };
    let warning = match mode {
        DampingMode::Radiative => None,
        DampingMode::Dephasing => {
            let n_gamma_r = p.n_atoms as f64 * p.gamma_r;
            let lower = MUCH_SMALLER_FACTOR * p.gamma_r <= p.gamma_d;
            let upper = MUCH_SMALLER_FACTOR * p.gamma_d <= n_gamma_r;
            (!(lower && upper)).then_some(RegimeWarning {
                gamma_r: p.gamma_r,
                gamma_d: p.gamma_d,
                n_gamma_r,
            })
        }
    };
    (d, warning)
}

/// Cooperativity `C = g^2 N / (2 gamma_e gamma_c)`.
pub fn cooperativity(p: &SystemParams) -> f64 {
    p.g2n / (2.0 * p.gamma_e * p.gamma_c())
}
