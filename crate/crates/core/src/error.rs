use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure modes of the solvers.
///
/// Variants carry the offending quantity so that front ends can report it
/// without re-deriving anything.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its domain (negative rate, zero volume, ...).
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// `D_c (D_e - Omega^2 / 4 D_r) - g^2 N` vanished in the first-order solution.
    SingularDenominator { modulus: f64 },
    /// The inner denominator of the blockade volume vanished.
    DegenerateKernel { modulus: f64 },
    /// `V_b` equals `V`: the sample is fully blockaded.
    BlockadeSaturation {
        bubble_volume_re: f64,
        bubble_volume_im: f64,
        volume: f64,
    },
    /// Adaptive quadrature could not reach its tolerance within budget.
    QuadratureFailure {
        evaluations: usize,
        error_estimate: f64,
    },
    /// A dense linear system was too ill-conditioned to trust.
    IllConditioned { condition: f64 },
    /// A normalising intensity underflowed.
    ZeroDenominator { quantity: &'static str, value: f64 },
    /// Neither the eigen-decomposition nor the adaptive integrator reached tolerance.
    DegenerateSpectrum { eigenvector_condition: f64 },
    /// Population at the truncation edge is too large for the requested basis.
    TruncationTooSmall { edge_population: f64 },
    /// Steady-state search did not converge.
    NonConvergence { residual: f64 },
    /// The maximum of the scanned quantity lies on the search boundary.
    NoInteriorMaximum { location: f64 },
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input.
    Config,
    /// The physics is singular at this point (saturation, resonance conspiracy).
    Physics,
    /// A numerical method failed.
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter { .. } => ErrorKind::Config,
            Error::SingularDenominator { .. }
            | Error::DegenerateKernel { .. }
            | Error::BlockadeSaturation { .. }
            | Error::ZeroDenominator { .. } => ErrorKind::Physics,
            Error::QuadratureFailure { .. }
            | Error::IllConditioned { .. }
            | Error::DegenerateSpectrum { .. }
            | Error::TruncationTooSmall { .. }
            | Error::NonConvergence { .. }
            | Error::NoInteriorMaximum { .. } => ErrorKind::Numerical,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value, reason } => {
                write!(f, "invalid parameter {name} = {value}: {reason}")
            }
            Error::SingularDenominator { modulus } => write!(
                f,
                "first-order denominator D_c(D_e - Omega_cf^2/4D_r) - g2N is singular (|.| = {modulus:e})"
            ),
            Error::DegenerateKernel { modulus } => write!(
                f,
                "blockade volume denominator is degenerate (|.| = {modulus:e})"
            ),
            Error::BlockadeSaturation { bubble_volume_re, bubble_volume_im, volume } => write!(
                f,
                "blockade saturation: bubble volume V_b = {bubble_volume_re:e}{bubble_volume_im:+e}i equals sample volume V = {volume:e}"
            ),
            Error::QuadratureFailure { evaluations, error_estimate } => write!(
                f,
                "radial kernel quadrature failed after {evaluations} evaluations (error estimate {error_estimate:e})"
            ),
            Error::IllConditioned { condition } => {
                write!(f, "linear system is ill-conditioned (condition estimate {condition:e})")
            }
            Error::ZeroDenominator { quantity, value } => {
                write!(f, "{quantity} underflows ({value:e}); normalised correlation undefined")
            }
            Error::DegenerateSpectrum { eigenvector_condition } => write!(
                f,
                "g2(tau) evolution failed: eigenvector condition {eigenvector_condition:e} and adaptive integration did not converge"
            ),
            Error::TruncationTooSmall { edge_population } => write!(
                f,
                "truncated basis too small: population {edge_population:e} at the truncation edge"
            ),
            Error::NonConvergence { residual } => {
                write!(f, "steady state did not converge (residual {residual:e})")
            }
            Error::NoInteriorMaximum { location } => {
                write!(f, "maximum found on the search boundary at {location}")
            }
        }
    }
}

impl core::error::Error for Error {}
