use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rydberg_cavity::commands::{evaluate, scan_rows};
use rydberg_cavity::load;
use rydberg_cavity_core::{
    bubble_volume, effective_detunings, evaluate_point, DampingMode, Observable, ScanParameter,
    ScanSpec,
};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(conf: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydberg-cavity"))
        .arg("--config")
        .arg(config(conf))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data rows of a CSV output, header dropped.
fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

fn argmin(rows: &[Vec<f64>], col: usize) -> &[f64] {
    rows.iter().min_by(|a, b| a[col].total_cmp(&b[col])).unwrap()
}

#[test]
fn dispersive_point_report() {
    let o = run("dispersive.conf", &["point"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    for key in ["g2_t_0", "g2_r_0", "i_trans", "i_refl", "pair_refl", "kappa_r", "kappa_i"] {
        assert!(text.lines().any(|l| l.starts_with(key)), "missing {key}");
    }
    // 9 significant digits
    let g2 = text.lines().find(|l| l.starts_with("g2_t_0")).unwrap();
    let mantissa = g2.split_whitespace().nth(1).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 9);
}

#[test]
fn saturated_blockade_exits_with_physics_code() {
    let mut c = load(Some(&config("resonant.conf")), &[]).unwrap();
    // Without control field and with negligible damping V_b is real.
    c.params.omega_cf = 0.0;
    c.params.gamma_r = 1e-15;
    c.params.delta_r = 1.0;
    c.params.c6 = -1e6;
    let (d, _) = effective_detunings(&c.params, DampingMode::Radiative);
    let vb = bubble_volume(&c.params, &d).unwrap();
    let o = run(
        "resonant.conf",
        &[
            "--set",
            "omega_cf=0",
            "--set",
            "gamma_r=1e-15",
            "--set",
            "delta_r=1",
            "--set",
            "c6=-1e6",
            "--set",
            &format!("volume={}", vb.re),
            "point",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bubble volume V_b"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_with_code_one() {
    let o = run("resonant.conf", &["--set", "omega=3", "point"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("omega"));
    let o = run("missing.conf", &["point"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run("resonant.conf", &["--set", "gamma_r=-1", "point"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run("resonant.conf", &["scan", "--param", "omega_cf", "--start", "1", "--stop", "1", "--n", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn csv_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |path: &Path| {
        vec![
            "--out".to_string(),
            path.display().to_string(),
            "scan".into(),
            "--param".into(),
            "theta_c".into(),
            "--start".into(),
            "-10".into(),
            "--stop".into(),
            "10".into(),
            "--n".into(),
            "97".into(),
            "--obs".into(),
            "g2_t_0,g2_r_0,i_trans,i_refl,pair_refl,kappa_r,kappa_i".into(),
        ]
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let args = args(path);
        let o = run("dispersive.conf", &args.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("theta_c,g2_t_0,g2_r_0,i_trans,i_refl,pair_refl,kappa_r,kappa_i\n"));
    assert_eq!(text.lines().count(), 98);
}

#[test]
fn scan_rows_match_single_points() {
    let c = load(Some(&config("detuned.conf")), &[]).unwrap();
    let spec = ScanSpec {
        parameter: ScanParameter::OmegaCf,
        start: 5.0,
        stop: 20.0,
        n_points: 31,
        observables: Observable::ALL.to_vec(),
    };
    let rows = scan_rows(&c, &spec).unwrap();
    for (k, (x, row)) in rows.iter().enumerate() {
        let mut p = c.params;
        p.omega_cf = *x;
        let r = evaluate_point(&p, c.options).unwrap();
        for (o, v) in Observable::ALL.iter().zip(row.as_ref().unwrap()) {
            let want = o.extract(&r);
            assert!((v - want).abs() <= 1e-12 * want.abs(), "row {k} {o}: {v} vs {want}");
        }
    }
}

#[test]
fn failed_points_print_nan_and_continue() {
    let o = run(
        "resonant.conf",
        &["scan", "--param", "alpha", "--start", "0", "--stop", "1e-2", "--n", "3", "--obs", "g2_t_0"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "0.00000000000e0,nan");
    assert!(!lines[2].contains("nan"));
    assert!(stderr(&o).contains("point 0 (alpha = 0)"));
}

#[test]
fn two_point_tau_trace_starts_at_g2_zero() {
    let o = run("dispersive.conf", &["tau", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("tau,g2_tau,raw_re,raw_im,g2_r_tau\n"));
    let t = rows(&text);
    assert_eq!(t.len(), 2);
    let c = load(Some(&config("dispersive.conf")), &[]).unwrap();
    let g2 = evaluate(&c).unwrap().correlations.g2_t_zero;
    assert!((t[0][1] - g2).abs() <= 1e-11 * g2);
    assert!((t[1][1] - 1.0).abs() <= 1e-4);
}

#[test]
fn no_interaction_gives_flat_trace() {
    let o = run("dispersive.conf", &["--set", "c6=0", "tau", "--n", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for row in rows(&stdout(&o)) {
        assert!((row[1] - 1.0).abs() <= 1e-9, "{row:?}");
    }
}

#[test]
fn optimum_without_atoms_is_bare_resonance() {
    let o = run("dispersive.conf", &["--set", "g2N=0", "--set", "cooperativity=0", "optimum"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let x: f64 = stdout(&o).split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!(x.abs() < 1e-6, "{x}");
}

#[test]
fn reflection_vanishes_at_impedance_matching() {
    let o = run(
        "resonant.conf",
        &["scan", "--param", "omega_cf", "--start", "1", "--stop", "15", "--n", "1401", "--obs", "i_refl"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let c = load(Some(&config("resonant.conf")), &[]).unwrap();
    let coop = c.params.g2n / (2.0 * c.params.gamma_e * c.params.gamma_c());
    let target = 2.0 * (c.params.gamma_e * c.params.gamma_r * (2.0 * coop - 1.0)).sqrt();
    let rows = rows(&stdout(&o));
    let best = argmin(&rows, 1);
    assert!((best[0] - target).abs() <= 0.02 * target, "{best:?} vs {target}");
    assert!(best[1] < 1e-5);
}

#[test]
fn detuned_pair_reflection_dip() {
    let o = run(
        "detuned.conf",
        &["scan", "--param", "omega_cf", "--start", "5", "--stop", "20", "--n", "601", "--obs", "pair_refl,i_refl"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = rows(&stdout(&o));
    let max = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    let best = argmin(&rows, 1);
    assert!((best[0] - 11.0).abs() < 1.1, "{best:?}");
    assert!(best[1] < 0.02 * max);
    assert!(best[2] > 0.1);
}

#[test]
fn oracle_check_agrees_at_weak_drive() {
    let o = run("resonant.conf", &["--set", "alpha=1e-3", "oracle-check", "--ladder-atoms", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let g2 = text.lines().find(|l| l.starts_with("g2_t_0")).unwrap();
    let diff: f64 = g2.split_whitespace().last().unwrap().parse().unwrap();
    assert!(diff < 1e-2, "{g2}");
    let slope = text.lines().find(|l| l.starts_with("pair_slope")).unwrap();
    let s: f64 = slope.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((s - 6.0).abs() < 0.05);
}

#[test]
fn radiative_optimum_at_lower_cooperativity() {
    // The dispersive file with radiative damping and C = 900 (g2N = 600).
    let o = run("dispersive.conf", &["--set", "cooperativity=900", "--set", "damping=radiative", "optimum"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let x: f64 = stdout(&o).split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((x + 6.15206).abs() < 1e-4, "{x}");
}
