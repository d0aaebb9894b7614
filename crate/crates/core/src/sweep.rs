//! One-dimensional parameter scans and the linear-cavity optimum.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::params::{effective_detunings, DampingMode, SystemParams};
use crate::perturbative::first_order;
use crate::pipeline::{evaluate_point, PointOptions, PointResult};

/// Scannable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanParameter {
    DeltaC,
    /// `Delta_c - Delta_c0`, measured from the linear-cavity optimum.
    ThetaC,
    OmegaCf,
    DeltaE,
    DeltaR,
    Alpha,
    C6,
}

impl ScanParameter {
    pub const ALL: [ScanParameter; 7] = [
        ScanParameter::DeltaC,
        ScanParameter::ThetaC,
        ScanParameter::OmegaCf,
        ScanParameter::DeltaE,
        ScanParameter::DeltaR,
        ScanParameter::Alpha,
        ScanParameter::C6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScanParameter::DeltaC => "delta_c",
            ScanParameter::ThetaC => "theta_c",
            ScanParameter::OmegaCf => "omega_cf",
            ScanParameter::DeltaE => "delta_e",
            ScanParameter::DeltaR => "delta_r",
            ScanParameter::Alpha => "alpha",
            ScanParameter::C6 => "c6",
        }
    }

    /// Writes `value` into `p`. `reference` is the optimum detuning used by
    /// [`ScanParameter::ThetaC`] and ignored otherwise.
    pub fn apply(self, p: &mut SystemParams, value: f64, reference: f64) {
        match self {
            ScanParameter::DeltaC => p.delta_c = value,
            ScanParameter::ThetaC => p.delta_c = reference + value,
            ScanParameter::OmegaCf => p.omega_cf = value,
            ScanParameter::DeltaE => p.delta_e = value,
            ScanParameter::DeltaR => p.delta_r = value,
            ScanParameter::Alpha => p.alpha = value,
            ScanParameter::C6 => p.c6 = value,
        }
    }
}

impl fmt::Display for ScanParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScanParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ScanParameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or(Error::InvalidParameter {
                name: "parameter",
                value: f64::NAN,
                reason: "unknown scan parameter",
            })
    }
}

/// Scalar output of a point evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    G2T0,
    G2R0,
    ITrans,
    IRefl,
    PairRefl,
    KappaR,
    KappaI,
}

impl Observable {
    pub const ALL: [Observable; 7] = [
        Observable::G2T0,
        Observable::G2R0,
        Observable::ITrans,
        Observable::IRefl,
        Observable::PairRefl,
        Observable::KappaR,
        Observable::KappaI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::G2T0 => "g2_t_0",
            Observable::G2R0 => "g2_r_0",
            Observable::ITrans => "i_trans",
            Observable::IRefl => "i_refl",
            Observable::PairRefl => "pair_refl",
            Observable::KappaR => "kappa_r",
            Observable::KappaI => "kappa_i",
        }
    }

    pub fn extract(self, r: &PointResult) -> f64 {
        let c = &r.correlations;
        match self {
            Observable::G2T0 => c.g2_t_zero,
            Observable::G2R0 => c.g2_r_zero,
            Observable::ITrans => c.i_trans,
            Observable::IRefl => c.i_refl,
            Observable::PairRefl => c.pair_refl,
            Observable::KappaR => r.kappa.kappa_r,
            Observable::KappaI => r.kappa.kappa_i,
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or(Error::InvalidParameter {
                name: "observable",
                value: f64::NAN,
                reason: "unknown observable",
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub parameter: ScanParameter,
    pub start: f64,
    pub stop: f64,
    pub n_points: usize,
    pub observables: Vec<Observable>,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(Error::InvalidParameter {
                name: "n_points",
                value: self.n_points as f64,
                reason: "must be at least 2",
            });
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start == self.stop {
            return Err(Error::InvalidParameter {
                name: "stop",
                value: self.stop,
                reason: "scan range must be finite and non-empty",
            });
        }
        if self.observables.is_empty() {
            return Err(Error::InvalidParameter {
                name: "observables",
                value: 0.0,
                reason: "none requested",
            });
        }
        Ok(())
    }

    /// Value of the scanned parameter at index `k`.
    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.n_points {
            return self.stop;
        }
        self.start + (self.stop - self.start) * k as f64 / (self.n_points - 1) as f64
    }

    /// Parameter set at index `k`.
    pub fn params_at(&self, base: &SystemParams, k: usize, reference: f64) -> SystemParams {
        let mut p = *base;
        self.parameter.apply(&mut p, self.value(k), reference);
        p
    }

    /// Requested observables at index `k`.
    pub fn evaluate(
        &self,
        base: &SystemParams,
        opts: PointOptions,
        k: usize,
        reference: f64,
    ) -> Result<Vec<f64>> {
        let r = evaluate_point(&self.params_at(base, k, reference), opts)?;
        Ok(self.observables.iter().map(|o| o.extract(&r)).collect())
    }

    /// Reference detuning needed by this scan (zero unless scanning `theta_c`).
    pub fn reference(&self, base: &SystemParams, mode: DampingMode) -> Result<f64> {
        match self.parameter {
            ScanParameter::ThetaC => find_linear_optimum(base, mode),
            _ => Ok(0.0),
        }
    }
}

const COARSE_POINTS: usize = 4001;
const GOLDEN_TOL: f64 = 1e-9;

/// Cavity detuning `Delta_c0` maximizing the first-order photon number `|<a>|^2`.
///
/// A coarse grid over a window wide enough to hold every polariton branch
/// locates the best bracket, then golden-section search refines it.
pub fn find_linear_optimum(p: &SystemParams, mode: DampingMode) -> Result<f64> {
    p.validate()?;
    let intensity = |dc: f64| -> Result<f64> {
        let mut q = *p;
        q.delta_c = dc;
        let (d, _) = effective_detunings(&q, mode);
        Ok(first_order(&q, &d)?.a1.norm_sqr())
    };
    let g = p.collective_coupling();
    let half = 4.0
        * (p.delta_e.abs() + p.delta_r.abs() + p.omega_cf.abs() + g + p.gamma_c() + p.gamma_e)
        + 10.0;
    let (lo, hi) = (-half, half);
    let step = (hi - lo) / (COARSE_POINTS - 1) as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for k in 0..COARSE_POINTS {
        let v = intensity(lo + step * k as f64)?;
        if v > best.1 {
            best = (k, v);
        }
    }
    if best.0 == 0 || best.0 + 1 == COARSE_POINTS {
        return Err(Error::NoInteriorMaximum {
            location: lo + step * best.0 as f64,
        });
    }
    let mut a = lo + step * (best.0 - 1) as f64;
    let mut b = lo + step * (best.0 + 1) as f64;
    let inv_phi = 0.618_033_988_749_894_8;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = intensity(x1)?;
    let mut f2 = intensity(x2)?;
    while b - a > GOLDEN_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = intensity(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = intensity(x1)?;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn base() -> SystemParams {
        SystemParams {
            delta_c: 0.0,
            delta_e: -35.0,
            delta_r: 0.4,
            gamma_c_l: 0.3,
            gamma_c_r: 0.0,
            gamma_e: 1.0,
            gamma_r: 0.01,
            gamma_d: 0.15,
            omega_cf: 10.0,
            g2n: 600.0,
            alpha: 0.01,
            c6: -8.83e6,
            volume: 28_274.333_882_308_14,
            n_atoms: 10_000,
        }
    }

    #[test]
    fn names_round_trip() {
        for p in ScanParameter::ALL {
            assert_eq!(p.name().parse::<ScanParameter>().unwrap(), p);
        }
        for o in Observable::ALL {
            assert_eq!(o.name().parse::<Observable>().unwrap(), o);
        }
        assert!("g2".parse::<Observable>().is_err());
    }

    #[test]
    fn empty_cavity_optimum_is_bare_resonance() {
        let mut p = base();
        p.g2n = 0.0;
        let x = find_linear_optimum(&p, DampingMode::Radiative).unwrap();
        assert!(x.abs() < 1e-6);
    }

    #[test]
    fn two_level_optimum_matches_dense_scan() {
        let mut p = base();
        p.omega_cf = 0.0;
        let x = find_linear_optimum(&p, DampingMode::Radiative).unwrap();
        let mut best = (0.0, 0.0);
        for k in 0..200_001 {
            let dc = -40.0 + 80.0 * k as f64 / 200_000.0;
            let mut q = p;
            q.delta_c = dc;
            let (d, _) = effective_detunings(&q, DampingMode::Radiative);
            let v = first_order(&q, &d).unwrap().a1.norm_sqr();
            if v > best.1 {
                best = (dc, v);
            }
        }
        assert!((x - best.0).abs() < 1e-3, "{x} vs {}", best.0);
    }

    #[test]
    fn spec_validation_and_grid() {
        let s = ScanSpec {
            parameter: ScanParameter::OmegaCf,
            start: 1.0,
            stop: 15.0,
            n_points: 3,
            observables: vec![Observable::IRefl],
        };
        assert!(s.validate().is_ok());
        assert_eq!([s.value(0), s.value(1), s.value(2)], [1.0, 8.0, 15.0]);
        let mut bad = s.clone();
        bad.n_points = 1;
        assert!(bad.validate().is_err());
        let mut bad = s;
        bad.stop = 1.0;
        assert!(bad.validate().is_err());
    }
}
