//! Master equation of the effective three-boson model.

use alloc::vec;

use num_complex::Complex64;
// Unused when std is linked (its inherent f64 methods take precedence).
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{ComplexDd, CsrMatrix, Matrix};
use crate::params::{rydberg_damping, DampingMode, SystemParams};

use super::fock::{add_assign, adjoint, matmul, Basis, LocalOp, Site};
use super::lindblad::{liouvillian, steady_state, SteadyState};

/// Largest population allowed on the truncation edge.
pub const EDGE_POPULATION_TOL: f64 = 1e-8;
/// Relative change of `g2(0)` under one refinement step accepted as converged.
pub const TRUNCATION_TOL: f64 = 1e-3;
/// Per-mode truncation at which refinement stops.
pub const MAX_DIM: usize = 8;

/// Annihilation operators of the three modes in the truncated basis.
#[derive(Debug, Clone)]
pub struct OperatorCache {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

#[derive(Debug, Clone)]
pub struct TruncatedSystem {
    /// Number states kept per mode `(n_a, n_b, n_c)`.
    pub dims: [usize; 3],
    /// Largest total excitation number kept.
    pub cap: usize,
    pub basis: Basis,
    pub liouvillian: CsrMatrix,
    pub ops: OperatorCache,
}

fn scaled(m: &Matrix, s: f64) -> Matrix {
    let n = m.dim();
    let mut out = m.clone();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] *= s;
        }
    }
    out
}

/// Assembles
///
/// ```text
/// H = -Delta_c a+a + alpha (a + a+) - Delta_e b+b - Delta_r c+c
///     + G (a+b + b+a) + (Omega/2)(b c+ + b+ c) + (kappa_r/2) c+c+cc
/// ```
///
/// with jump operators `sqrt(2 gamma_c) a`, `sqrt(2 gamma_e) b`,
/// `sqrt(2 gamma_r') c` and `sqrt(kappa_i) cc`.
pub fn build_three_boson(
    p: &SystemParams,
    mode: DampingMode,
    kappa: Complex64,
    dims: [usize; 3],
    cap: usize,
) -> Result<TruncatedSystem> {
    for &d in &dims {
        if d < 2 {
            return Err(Error::InvalidParameter {
                name: "dims",
                value: d as f64,
                reason: "each mode needs at least 2 levels",
            });
        }
    }
    let kappa_r = kappa.re;
    let kappa_i = -kappa.im;
    if kappa_i < 0.0 {
        return Err(Error::InvalidParameter {
            name: "kappa_i",
            value: kappa_i,
            reason: "two-quanta loss rate must be non-negative",
        });
    }
    let basis = Basis::new(dims.iter().map(|&dim| Site::Boson { dim }).collect(), cap);
    let one = Complex64::new(1.0, 0.0);
    let a = basis.operator(one, &[(0, &LocalOp::annihilation(dims[0]))]);
    let b = basis.operator(one, &[(1, &LocalOp::annihilation(dims[1]))]);
    let c = basis.operator(one, &[(2, &LocalOp::annihilation(dims[2]))]);
    let ad = adjoint(&a);
    let bd = adjoint(&b);
    let cd = adjoint(&c);

    let g = p.collective_coupling();
    let mut h = scaled(&matmul(&ad, &a), -p.delta_c);
    let mut drive = a.clone();
    add_assign(&mut drive, &ad);
    add_assign(&mut h, &scaled(&drive, p.alpha));
    add_assign(&mut h, &scaled(&matmul(&bd, &b), -p.delta_e));
    add_assign(&mut h, &scaled(&matmul(&cd, &c), -p.delta_r));
    let mut hop = matmul(&ad, &b);
    add_assign(&mut hop, &matmul(&bd, &a));
    add_assign(&mut h, &scaled(&hop, g));
    // Lowering first: with an excitation cap, P b P c+ P is not P c+ P b P.
    let mut ctl = matmul(&cd, &b);
    add_assign(&mut ctl, &matmul(&bd, &c));
    add_assign(&mut h, &scaled(&ctl, 0.5 * p.omega_cf));
    let cc = matmul(&c, &c);
    if kappa_r != 0.0 {
        add_assign(&mut h, &scaled(&matmul(&adjoint(&cc), &cc), 0.5 * kappa_r));
    }

    let mut jumps = vec![
        scaled(&a, (2.0 * p.gamma_c()).sqrt()),
        scaled(&b, (2.0 * p.gamma_e).sqrt()),
        scaled(&c, (2.0 * rydberg_damping(p, mode)).sqrt()),
    ];
    if kappa_i > 0.0 {
        jumps.push(scaled(&cc, kappa_i.sqrt()));
    }
    let l = liouvillian(&h, &jumps);
    Ok(TruncatedSystem {
        dims,
        cap,
        basis,
        liouvillian: l,
        ops: OperatorCache { a, b, c },
    })
}

impl TruncatedSystem {
    pub fn steady_state(&self) -> Result<SteadyState> {
        steady_state(&self.liouvillian, self.basis.len())
    }

    /// Population on states that touch the truncation.
    pub fn edge_population(&self, s: &SteadyState) -> f64 {
        (0..self.basis.len())
            .filter(|&i| self.basis.is_edge(i))
            .map(|i| s.rho.population(i).abs())
            .sum()
    }
}

/// Steady-state cavity observables of one truncated system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMoments {
    pub mean_a: Complex64,
    pub mean_aa: Complex64,
    pub n_photon: f64,
    pub pair: f64,
    pub g2_zero: f64,
}

pub fn cavity_moments(sys: &TruncatedSystem, s: &SteadyState) -> CavityMoments {
    let a = &sys.ops.a;
    let ad = adjoint(a);
    let aa = matmul(a, a);
    let n_op = matmul(&ad, a);
    let pair_op = matmul(&adjoint(&aa), &aa);
    let n: ComplexDd = s.rho.expect(&n_op);
    let pair = s.rho.expect(&pair_op);
    let n_photon = n.re.to_f64();
    let pair_v = pair.re.to_f64();
    CavityMoments {
        mean_a: s.rho.expect(a).to_c64(),
        mean_aa: s.rho.expect(&aa).to_c64(),
        n_photon,
        pair: pair_v,
        g2_zero: pair_v / (n_photon * n_photon),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub mean_a: Complex64,
    pub mean_aa: Complex64,
    pub n_photon: f64,
    pub g2_zero: f64,
    /// `|g2(0)` change| relative to `g2(0)` when every truncation grows by one.
    pub truncation_error: f64,
    /// False when the truncation error exceeds [`TRUNCATION_TOL`].
    pub reliable: bool,
    pub dims: [usize; 3],
    pub cap: usize,
    pub edge_population: f64,
    pub residual: f64,
}

/// Solves the three-boson model, enlarging the truncation by one level (and
/// one excitation) until `g2(0)` is stable to [`TRUNCATION_TOL`] or the modes
/// reach [`MAX_DIM`]. The returned values come from the larger basis of the
/// last comparison.
pub fn oracle_report(
    p: &SystemParams,
    mode: DampingMode,
    kappa: Complex64,
    dims: [usize; 3],
    cap: usize,
) -> Result<OracleReport> {
    let solve = |dims: [usize; 3], cap: usize| -> Result<(CavityMoments, f64, f64)> {
        let sys = build_three_boson(p, mode, kappa, dims, cap)?;
        let s = sys.steady_state()?;
        Ok((
            cavity_moments(&sys, &s),
            sys.edge_population(&s),
            s.residual,
        ))
    };
    let mut dims = dims;
    let mut cap = cap;
    let (mut prev, _, _) = solve(dims, cap)?;
    loop {
        let next_dims = [dims[0] + 1, dims[1] + 1, dims[2] + 1];
        let (cur, edge, residual) = solve(next_dims, cap + 1)?;
        let truncation_error =
            (cur.g2_zero - prev.g2_zero).abs() / cur.g2_zero.abs().max(f64::MIN_POSITIVE);
        let reliable = truncation_error <= TRUNCATION_TOL;
        let done = reliable || next_dims.iter().any(|&d| d >= MAX_DIM);
        if done {
            if edge > EDGE_POPULATION_TOL {
                return Err(Error::TruncationTooSmall {
                    edge_population: edge,
                });
            }
            return Ok(OracleReport {
                mean_a: cur.mean_a,
                mean_aa: cur.mean_aa,
                n_photon: cur.n_photon,
                g2_zero: cur.g2_zero,
                truncation_error,
                reliable,
                dims: next_dims,
                cap: cap + 1,
                edge_population: edge,
                residual,
            });
        }
        dims = next_dims;
        cap += 1;
        prev = cur;
    }
}
