//! Full evaluation of one parameter point.

use num_complex::Complex64;

use crate::correlators::{correlation_report, CorrelationReport};
use crate::effective::{effective_kappa, EffectiveNonlinearity};
use crate::error::Result;
use crate::params::{effective_detunings, DampingMode, Detunings, RegimeWarning, SystemParams};
use crate::perturbative::{
    first_order, kernel_analytic, kernel_quadrature, second_order, sphere_radius, FirstOrderState,
    InteractionKernel, SecondOrderMoments,
};

/// Which blockade kernel feeds the `<cc>` equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelMode {
    /// Large-sample limit, independent of the sample shape.
    #[default]
    Analytic,
    /// Radial integral over a sphere of the configured volume.
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PointOptions {
    pub mode: DampingMode,
    pub kernel: KernelMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub params: SystemParams,
    pub detunings: Detunings,
    pub warning: Option<RegimeWarning>,
    pub first: FirstOrderState,
    /// Kernel actually used; `k` is the sphere integral in [`KernelMode::Sphere`].
    pub kernel: InteractionKernel,
    pub second: SecondOrderMoments,
    pub correlations: CorrelationReport,
    /// Always derived from the large-sample kernel.
    pub kappa: EffectiveNonlinearity,
}

impl PointResult {
    /// Mean intracavity photon number to lowest order.
    pub fn photon_number(&self) -> f64 {
        self.first.a1.norm_sqr()
    }
}

pub fn evaluate_point(p: &SystemParams, opts: PointOptions) -> Result<PointResult> {
    p.validate()?;
    let (d, warning) = effective_detunings(p, opts.mode);
    let first = first_order(p, &d)?;
    let analytic = kernel_analytic(p, &d)?;
    let kernel = match opts.kernel {
        KernelMode::Analytic => analytic,
        KernelMode::Sphere => {
            let k: Complex64 = kernel_quadrature(p, &d, sphere_radius(p.volume))?;
            InteractionKernel { k, ..analytic }
        }
    };
    let second = second_order(p, &d, &first, &kernel)?;
    let correlations = correlation_report(p, &first, &second)?;
    let kappa = effective_kappa(p, &d, &analytic)?;
    Ok(PointResult {
        params: *p,
        detunings: d,
        warning,
        first,
        kernel,
        second,
        correlations,
        kappa,
    })
}
