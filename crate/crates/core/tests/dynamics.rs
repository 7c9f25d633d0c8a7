mod common;

use std::f64::consts::TAU;

use common::{hd169830, mercury, pn_apsidal_rate, ARCSEC_PER_RAD};
use secres_core::elements::reduced_mass;
use secres_core::frequency::{apsidal_frequency, compare, dominant_frequency};
use secres_core::integrator::{integrate, osculating_series, IntegrationSettings};
use secres_core::secular::{evolve, SecularModel};
use secres_core::{Constants, Model, OrbitalElements, SystemConfig};

fn run(cfg: &SystemConfig, t_end: f64, dt: f64, tol: f64) -> (Vec<f64>, [Vec<OrbitalElements>; 2]) {
    let traj = integrate(cfg, &IntegrationSettings::new(t_end, dt, tol).unwrap()).unwrap();
    let els = osculating_series(&traj).unwrap();
    (traj.times, els)
}

fn mercury_rate(c: f64) -> f64 {
    let cfg = mercury(Model::Relativistic, Constants::with_c(c).unwrap());
    // 100 yr sampled off the 0.24 yr orbital period
    let (t, els) = run(&cfg, 100.0, 0.0731, 1e-12);
    apsidal_frequency(&els[0], &t).unwrap().rate
}

#[test]
fn mercury_perihelion_advance() {
    let c = Constants::default().c;
    let oracle = pn_apsidal_rate(1.0, 1.66e-7, 0.387, 0.2056, c);
    let oracle_arcsec = oracle * ARCSEC_PER_RAD * 100.0;
    assert!((oracle_arcsec - 42.98).abs() < 0.01 * 42.98, "{oracle_arcsec}");
    let rate = mercury_rate(c);
    assert!((rate - oracle).abs() < 0.01 * oracle, "{} vs {}", rate * ARCSEC_PER_RAD * 100.0, oracle_arcsec);

    let cfg = mercury(Model::Newtonian, Constants::default());
    let (t, els) = run(&cfg, 100.0, 0.0731, 1e-12);
    let newton = apsidal_frequency(&els[0], &t).unwrap().rate;
    assert!(newton.abs() < 1e-3 * oracle, "{newton:e}");
}

#[test]
fn tenfold_c_shrinks_shift_hundredfold() {
    let c = Constants::default().c;
    let ratio = mercury_rate(c) / mercury_rate(10.0 * c);
    assert!((ratio / 100.0 - 1.0).abs() < 0.02, "{ratio}");
}

/// Mean spacing of upward crossings of the mean, i.e. the oscillation period.
/// A crossing only counts after the signal has dipped below a hysteresis
/// band, so short-period wiggles near the mean are ignored.
fn oscillation_period(t: &[f64], x: &[f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let band = 0.25 * (hi - lo);
    let mut armed = false;
    let mut ups = vec![];
    for i in 1..x.len() {
        let (a, b) = (x[i - 1] - mean, x[i] - mean);
        if b < -band {
            armed = true;
        }
        if armed && a < 0.0 && b >= 0.0 {
            ups.push(t[i - 1] + (t[i] - t[i - 1]) * (-a) / (b - a));
            armed = false;
        }
    }
    assert!(ups.len() >= 2, "fewer than two crossings");
    (ups[ups.len() - 1] - ups[0]) / (ups.len() - 1) as f64
}

#[test]
fn eccentricity_oscillates_with_secular_period() {
    let cfg = hd169830(Model::Newtonian, 0.1);
    let model = SecularModel::new(&cfg).unwrap();
    let period = model.newtonian.secular_period();
    let (t, els) = run(&cfg, 3.5 * period, period / 400.0, 1e-11);
    let e1: Vec<f64> = els[0].iter().map(|el| el.e).collect();
    let measured = oscillation_period(&t, &e1);
    assert!((measured / period - 1.0).abs() < 0.05, "{measured} vs {period}");
}

#[test]
fn low_eccentricity_secular_solution_tracks_integration() {
    // e ≈ 0.09 and 0.10
    let cfg = hd169830(Model::Newtonian, 0.3);
    let model = SecularModel::new(&cfg).unwrap();
    let period = model.newtonian.secular_period();
    let (t, els) = run(&cfg, period, period / 1000.0, 1e-11);
    for (j, &tj) in t.iter().enumerate() {
        let z = evolve(&model.newtonian, tj);
        for i in 0..2 {
            let d = (els[i][j].e - z.e(i)).abs();
            assert!(d < 0.02, "planet {} at t = {tj}: {d}", i + 1);
        }
    }
}

#[test]
fn secular_action_is_nearly_conserved() {
    // e ≈ 0.14 and 0.15
    let cfg = hd169830(Model::Newtonian, 0.45);
    let period = SecularModel::new(&cfg).unwrap().newtonian.secular_period();
    let (_, els) = run(&cfg, period, period / 500.0, 1e-11);
    let action = |j: usize| -> f64 {
        (0..2)
            .map(|i| {
                let el = &els[i][j];
                let lambda = reduced_mass(cfg.m0, cfg.planets[i].mass) * (cfg.beta(i) * el.a).sqrt();
                lambda * (1.0 - (1.0 - el.e * el.e).sqrt())
            })
            .sum()
    };
    // osculating a and e carry short-period terms of a few percent of the
    // action; drift is measured on averages over 25 samples (~1/20 period)
    let block = 25;
    let means: Vec<f64> =
        (0..els[0].len() / block).map(|b| (b * block..(b + 1) * block).map(action).sum::<f64>() / block as f64).collect();
    for (b, m) in means.iter().enumerate() {
        assert!((m / means[0] - 1.0).abs() < 0.05, "block {b}: {}", m / means[0]);
    }
}

#[test]
fn spectral_rate_matches_dominant_eigenfrequency() {
    let cfg = hd169830(Model::Newtonian, 0.1);
    let model = SecularModel::new(&cfg).unwrap();
    let modes = &model.newtonian;
    let period = modes.secular_period();
    let (t, els) = run(&cfg, 4.0 * period, 4.0 * period / 1024.0, 1e-11);
    for i in 0..2 {
        let (h, k): (Vec<f64>, Vec<f64>) = els[i].iter().map(|el| el.hk()).unzip();
        let g = dominant_frequency(&h, &k, &t).unwrap();
        let expect = modes.g[modes.dominant_mode(i)];
        assert!((g / expect - 1.0).abs() < 0.05, "planet {}: {g:e} vs {expect:e}", i + 1);
    }
}

#[test]
fn infinite_c_comparison_is_newtonian() {
    let cfg = hd169830(Model::Relativistic, 1.0).with_constants(Constants::with_c(f64::INFINITY).unwrap());
    let c = compare(&cfg, &IntegrationSettings::new(2000.0, 10.0, 1e-10).unwrap()).unwrap();
    let r = &c.report;
    for i in 0..2 {
        assert_eq!(r.g_numeric_newton[i], r.g_numeric_rel[i]);
        assert_eq!(r.g_analytic_newton[i], r.g_analytic_rel[i]);
        assert_eq!(r.rel_shift[i], Some(0.0));
    }
    assert_eq!(c.secular.matrices.a, c.secular.matrices.b);
}

#[test]
fn relativity_speeds_up_precession() {
    // low-e HD 169830 with c reduced 20× so the increment is resolved in a short run
    let base = hd169830(Model::Relativistic, 0.3);
    let cfg = base.with_constants(Constants::with_c(base.constants.c / 20.0).unwrap());
    let model = SecularModel::new(&cfg).unwrap();
    let span = 0.25 * TAU / model.newtonian.g[1];
    let c = compare(&cfg, &IntegrationSettings::new(span, span / 500.0, 1e-11).unwrap()).unwrap();
    for i in 0..2 {
        let shift = c.report.rel_shift[i].unwrap();
        let predicted = c.report.predicted_shift[i].unwrap();
        assert!(shift > 0.0 && predicted > 0.0, "planet {}: {shift} {predicted}", i + 1);
    }
}
