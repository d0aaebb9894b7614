//! Lowest-order photon statistics of an optical cavity filled with a
//! Rydberg-EIT ladder medium.
//!
//! All rates, detunings and Rabi frequencies are expressed in units of the
//! intermediate-state dipole decay rate `gamma_e`; lengths are in µm.
//!
//! The crate is `no_std` (with `alloc`). Reading config files, writing CSV and
//! the command-line front end live in the `rydberg-cavity` companion crate.
//!
//! Pipeline for a single parameter point:
//!
//! ```text
//! SystemParams --effective_detunings--> Detunings
//!              --first_order----------> FirstOrderState  (<a>, <b>, <c>)
//!              --kernel_analytic------> InteractionKernel (K, V_b, N_b)
//!              --second_order---------> SecondOrderMoments (<aa> ... <cc>)
//!              --correlators----------> g2(0), g2(tau), reflected moments
//!              --effective_kappa------> kappa = kappa_r - i kappa_i
//! ```
//!
//! The [`oracle`] module is an independent check: it builds the effective
//! three-boson master equation (and a few-atom ladder system) in a truncated
//! number-state basis and extracts the same observables from the exact
//! steady-state density matrix.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod correlators;
pub mod effective;
mod error;
pub mod linalg;
pub mod ode;
pub mod oracle;
pub mod params;
pub mod perturbative;
pub mod pipeline;
pub mod quadrature;
pub mod sweep;

pub use error::{Error, ErrorKind, Result};

pub use num_complex::Complex64;

pub use correlators::{
    correlation_report, g2_tau, reflected_moments, transmitted_g2_zero, transmitted_intensity,
    CorrelationReport,
    ReflectedMoments, TauTrace,
};
pub use effective::{effective_kappa, effective_second_order, EffectiveNonlinearity};
pub use params::{
    cooperativity, effective_detunings, DampingMode, Detunings, RegimeWarning, SystemParams,
};
pub use perturbative::{
    bubble_volume, first_order, kernel_analytic, kernel_quadrature, second_order, sphere_radius,
    FirstOrderState, InteractionKernel, SecondOrderMoments,
};
pub use pipeline::{evaluate_point, KernelMode, PointOptions, PointResult};
pub use sweep::{find_linear_optimum, Observable, ScanParameter, ScanSpec};
