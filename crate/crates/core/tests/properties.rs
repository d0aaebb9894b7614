use proptest::prelude::*;
use rydberg_cavity_core::{
    bubble_volume, correlation_report, effective_detunings, effective_kappa,
    effective_second_order, first_order, g2_tau, kernel_analytic, second_order, Complex64,
    DampingMode, FirstOrderState, SecondOrderMoments, SystemParams,
};

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

prop_compose! {
    /// Rates log-uniform in [1e-2, 1e2], detunings in [-50, 50],
    /// |C6| in [1e3, 1e7] with either sign, volume 2 to 1000 bubble volumes.
    fn params()(
        delta in prop::array::uniform3(-50.0f64..50.0),
        log_rates in prop::array::uniform5(-2.0f64..2.0),
        log_omega in -2.0f64..2.0,
        log_c6 in 3.0f64..7.0,
        negative in any::<bool>(),
        log_v in 0.3f64..3.0,
    ) -> SystemParams {
        let r = log_rates.map(|x| 10f64.powf(x));
        let mut p = SystemParams {
            delta_c: delta[0],
            delta_e: delta[1],
            delta_r: delta[2],
            gamma_c_l: r[0],
            gamma_c_r: r[1],
            gamma_e: 1.0,
            gamma_r: r[2],
            gamma_d: 0.0,
            omega_cf: 10f64.powf(log_omega),
            g2n: r[3] * r[4],
            alpha: 0.01,
            c6: if negative { -1.0 } else { 1.0 } * 10f64.powf(log_c6),
            volume: 1.0,
            n_atoms: 10_000,
        };
        let (d, _) = effective_detunings(&p, DampingMode::Radiative);
        let vb = bubble_volume(&p, &d).map(|v| v.norm()).unwrap_or(1.0);
        p.volume = vb * 10f64.powf(log_v);
        p
    }
}

fn solve(p: &SystemParams) -> Option<(FirstOrderState, SecondOrderMoments)> {
    let (d, _) = effective_detunings(p, DampingMode::Radiative);
    let fo = first_order(p, &d).ok()?;
    let k = kernel_analytic(p, &d).ok()?;
    let so = second_order(p, &d, &fo, &k).ok()?;
    Some((fo, so))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn effective_model_reproduces_second_order(p in params()) {
        let (d, _) = effective_detunings(&p, DampingMode::Radiative);
        let Some((_, so)) = solve(&p) else { return Ok(()) };
        let k = kernel_analytic(&p, &d).unwrap();
        let kappa = effective_kappa(&p, &d, &k).unwrap();
        let eff = effective_second_order(&p, &d, &kappa).unwrap();
        for (x, y) in eff.to_array().iter().zip(so.to_array()) {
            prop_assert!(rel(*x, y) <= 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn flipping_every_detuning_conjugates(p in params()) {
        let mut q = p;
        q.delta_c = -p.delta_c;
        q.delta_e = -p.delta_e;
        q.delta_r = -p.delta_r;
        q.c6 = -p.c6;
        let (Some((fo, so)), Some((fq, sq))) = (solve(&p), solve(&q)) else { return Ok(()) };
        // The drive does not flip, so odd orders pick up a sign.
        prop_assert!(rel(fq.a1, -fo.a1.conj()) <= 1e-10);
        prop_assert!(rel(sq.aa, so.aa.conj()) <= 1e-9);
        let g = correlation_report(&p, &fo, &so).unwrap();
        let h = correlation_report(&q, &fq, &sq).unwrap();
        prop_assert!((g.g2_t_zero - h.g2_t_zero).abs() <= 1e-8 * g.g2_t_zero);
    }

    #[test]
    fn delayed_correlation_decays_to_one(p in params()) {
        let (d, _) = effective_detunings(&p, DampingMode::Radiative);
        let Some((fo, so)) = solve(&p) else { return Ok(()) };
        let tau_max = 50.0 / p.gamma_c().min(p.gamma_e);
        let t = g2_tau(&p, &d, &fo, &so, tau_max, 3).unwrap();
        prop_assert!((t.g2_tau[2] - 1.0).abs() <= 1e-4, "{:?}", t.g2_tau);
    }

    #[test]
    fn moments_scale_with_drive(p in params()) {
        let mut q = p;
        q.alpha = 2.0 * p.alpha;
        let (Some((fo, so)), Some((fq, sq))) = (solve(&p), solve(&q)) else { return Ok(()) };
        prop_assert!(rel(fq.a1, 2.0 * fo.a1) <= 1e-12);
        prop_assert!(rel(sq.aa, 4.0 * so.aa) <= 1e-12);
        prop_assert!(rel(sq.cc, 4.0 * so.cc) <= 1e-12);
    }

    #[test]
    fn only_collective_coupling_matters(p in params()) {
        let mut q = p;
        q.n_atoms = 2 * p.n_atoms;
        let (Some((fo, so)), Some((fq, sq))) = (solve(&p), solve(&q)) else { return Ok(()) };
        prop_assert_eq!(fo, fq);
        prop_assert_eq!(so, sq);
    }

    #[test]
    fn lossless_single_port_reflects_everything(p in params(), delta_c in -50.0f64..50.0) {
        let mut q = p;
        q.delta_c = delta_c;
        q.c6 = 0.0;
        q.gamma_r = 1e-9;
        q.gamma_c_r = 0.0;
        q.gamma_e = 1e-9;
        let Some((fo, so)) = solve(&q) else { return Ok(()) };
        let r = correlation_report(&q, &fo, &so).unwrap();
        prop_assert!((r.i_refl - 1.0).abs() <= 1e-6, "{}", r.i_refl);
    }
}
