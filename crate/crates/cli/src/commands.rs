//! The subcommands. Each writes its result to `out` and diagnostics to stderr.

use std::io::Write;

use rayon::prelude::*;
use rydberg_cavity_core::oracle::{factorization_check, oracle_report, LadderOptions};
use rydberg_cavity_core::{
    cooperativity, evaluate_point, find_linear_optimum, g2_tau, Complex64, PointResult, ScanSpec,
};

use crate::config::Config;
use crate::csv;
use crate::error::CliError;

/// Human-readable values carry 9 significant digits.
fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

fn line<W: Write + ?Sized>(out: &mut W, name: &str, x: f64) -> std::io::Result<()> {
    writeln!(out, "{name:<16} {}", sci(x))
}

fn cline<W: Write + ?Sized>(out: &mut W, name: &str, z: Complex64) -> std::io::Result<()> {
    writeln!(out, "{name:<16} {} {}", sci(z.re), sci(z.im))
}

fn point_context(c: &Config) -> String {
    let p = &c.params;
    format!(
        "point delta_c = {}, omega_cf = {}, c6 = {}, volume = {}",
        p.delta_c, p.omega_cf, p.c6, p.volume
    )
}

pub fn evaluate(c: &Config) -> Result<PointResult, CliError> {
    evaluate_point(&c.params, c.options).map_err(|e| CliError::core(point_context(c), e))
}

/// Full single-point report.
pub fn point<W: Write + ?Sized>(c: &Config, out: &mut W) -> Result<(), CliError> {
    let r = evaluate(c)?;
    if let Some(w) = r.warning {
        eprintln!("warning: {w}");
    }
    let p = &r.params;
    writeln!(out, "# parameters")?;
    line(out, "delta_c", p.delta_c)?;
    line(out, "g2N", p.g2n)?;
    line(out, "cooperativity", cooperativity(p))?;
    writeln!(out, "# blockade (re im)")?;
    cline(out, "bubble_volume", r.kernel.v_b)?;
    cline(out, "bubble_atoms", r.kernel.n_b)?;
    cline(out, "kernel", r.kernel.k)?;
    writeln!(out, "# first order (re im)")?;
    cline(out, "a", r.first.a1)?;
    cline(out, "b", r.first.b1)?;
    cline(out, "c", r.first.c1)?;
    line(out, "n_photon", r.photon_number())?;
    writeln!(out, "# second order (re im)")?;
    let s = &r.second;
    for (name, z) in [("aa", s.aa), ("ab", s.ab), ("ac", s.ac), ("bb", s.bb), ("bc", s.bc), ("cc", s.cc)] {
        cline(out, name, z)?;
    }
    writeln!(out, "# correlations")?;
    let k = &r.correlations;
    line(out, "g2_t_0", k.g2_t_zero)?;
    line(out, "g2_r_0", k.g2_r_zero)?;
    line(out, "i_trans", k.i_trans)?;
    line(out, "i_refl", k.i_refl)?;
    line(out, "pair_refl", k.pair_refl)?;
    writeln!(out, "# effective nonlinearity")?;
    line(out, "kappa_r", r.kappa.kappa_r)?;
    line(out, "kappa_i", r.kappa.kappa_i)?;
    Ok(())
}

/// Scanned value and either the observables or the error message.
pub type ScanRow = (f64, Result<Vec<f64>, String>);

/// Scan rows in index order.
pub fn scan_rows(c: &Config, spec: &ScanSpec) -> Result<Vec<ScanRow>, CliError> {
    spec.validate().map_err(|e| CliError::core("scan", e))?;
    let reference = spec
        .reference(&c.params, c.options.mode)
        .map_err(|e| CliError::core("linear optimum for theta_c", e))?;
    Ok((0..spec.n_points)
        .into_par_iter()
        .map(|k| {
            let row = spec.evaluate(&c.params, c.options, k, reference).map_err(|e| e.to_string());
            (spec.value(k), row)
        })
        .collect())
}

pub fn scan<W: Write + ?Sized>(c: &Config, spec: &ScanSpec, out: &mut W) -> Result<(), CliError> {
    let rows = scan_rows(c, spec)?;
    let mut header = vec![spec.parameter.name()];
    header.extend(spec.observables.iter().map(|o| o.name()));
    csv::write_header(out, &header)?;
    let mut values = Vec::with_capacity(header.len());
    for (k, (x, row)) in rows.into_iter().enumerate() {
        values.clear();
        values.push(x);
        match row {
            Ok(v) => values.extend(v),
            Err(e) => {
                eprintln!("point {k} ({} = {x}): {e}", spec.parameter);
                values.extend(std::iter::repeat(f64::NAN).take(spec.observables.len()));
            }
        }
        csv::write_row(out, &values)?;
    }
    Ok(())
}

/// Default window: fifty of the slowest cavity or dipole lifetimes.
pub fn default_tau_max(c: &Config) -> f64 {
    50.0 / c.params.gamma_c().min(c.params.gamma_e)
}

pub fn tau<W: Write + ?Sized>(c: &Config, tau_max: f64, n_pts: usize, out: &mut W) -> Result<(), CliError> {
    let r = evaluate(c)?;
    let t = g2_tau(&r.params, &r.detunings, &r.first, &r.second, tau_max, n_pts)
        .map_err(|e| CliError::core(format!("g2(tau) up to tau = {tau_max}"), e))?;
    if t.integrated {
        eprintln!("note: near-defective spectrum, trace integrated numerically");
    }
    csv::write_header(out, &["tau", "g2_tau", "raw_re", "raw_im", "g2_r_tau"])?;
    for i in 0..t.tau_grid.len() {
        csv::write_row(out, &[t.tau_grid[i], t.g2_tau[i], t.raw[i].re, t.raw[i].im, t.g2_r_tau[i]])?;
    }
    Ok(())
}

pub fn optimum<W: Write + ?Sized>(c: &Config, out: &mut W) -> Result<f64, CliError> {
    let x = find_linear_optimum(&c.params, c.options.mode)
        .map_err(|e| CliError::core("linear-cavity optimum", e))?;
    line(out, "delta_c0", x)?;
    Ok(x)
}

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub dims: [usize; 3],
    pub cap: usize,
    /// Also run the few-atom moment factorization check with this many atoms.
    pub ladder_atoms: Option<usize>,
    pub pair_shift: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { dims: [4, 4, 4], cap: 3, ladder_atoms: None, pair_shift: 0.0 }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn oracle_check<W: Write + ?Sized>(c: &Config, o: &OracleOptions, out: &mut W) -> Result<(), CliError> {
    let r = evaluate(c)?;
    let orc = oracle_report(&c.params, c.options.mode, r.kappa.kappa, o.dims, o.cap)
        .map_err(|e| CliError::core("three-boson steady state", e))?;
    writeln!(out, "# perturbative vs truncated master equation (re im, then relative difference)")?;
    for (name, x, y) in [("a", r.first.a1, orc.mean_a), ("aa", r.second.aa, orc.mean_aa)] {
        writeln!(out, "{name:<16} {} {}  {} {}  {}", sci(x.re), sci(x.im), sci(y.re), sci(y.im), sci(rel(y, x)))?;
    }
    let g = r.correlations.g2_t_zero;
    writeln!(out, "{:<16} {}  {}  {}", "g2_t_0", sci(g), sci(orc.g2_zero), sci((orc.g2_zero - g).abs() / g))?;
    writeln!(
        out,
        "# basis {:?} cap {}: edge population {}, truncation error {}, residual {}",
        orc.dims,
        orc.cap,
        sci(orc.edge_population),
        sci(orc.truncation_error),
        sci(orc.residual)
    )?;
    if !orc.reliable {
        eprintln!("warning: truncation not converged, oracle g2 changes by {:e}", orc.truncation_error);
    }
    if let Some(n) = o.ladder_atoms {
        let opts = LadderOptions { n_atoms: n, pair_shift: o.pair_shift, ..LadderOptions::default() };
        let f = factorization_check(&c.params, &opts)
            .map_err(|e| CliError::core(format!("{n}-atom factorization check"), e))?;
        writeln!(out, "# {n}-atom ladder: excess over factorized moments")?;
        for (i, a) in f.alphas.iter().enumerate() {
            writeln!(out, "alpha {}  photon {}  pair {}", sci(*a), sci(f.photon_excess[i]), sci(f.pair_excess[i]))?;
        }
        line(out, "photon_slope", f.photon_slope)?;
        line(out, "pair_slope", f.pair_slope)?;
        if let Some(d) = f.dephasing {
            eprintln!("note: gamma_d = {} enters as a pure dephasing jump operator", d.gamma_d);
        }
    }
    Ok(())
}
