//! Non-perturbative reference solutions from truncated master equations.

pub mod fock;
pub mod ladder;
pub mod lindblad;
pub mod three_boson;

pub use ladder::{factorization_check, DephasingDiagnostic, FactorizationReport, LadderOptions};
pub use lindblad::{liouvillian, steady_state, DensityMatrix, SteadyMethod, SteadyState};
pub use three_boson::{
    build_three_boson, cavity_moments, oracle_report, CavityMoments, OracleReport, TruncatedSystem,
};
