//! Apsidal precession rates from time series, and the analytic-vs-numeric,
//! Newtonian-vs-relativistic comparison built on them.

use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::criterion::{pi_indicator, PiReport, DEFAULT_THRESHOLD};
use crate::elements::{Model, OrbitalElements, SystemConfig};
use crate::error::{Error, Result};
use crate::integrator::{integrate, osculating_series, CartesianTrajectory, IntegrationSettings};
use crate::secular::{evolve, EccentricityVector, SecularModel, SecularModes};

pub const MIN_FIT_SAMPLES: usize = 16;
pub const MIN_FFT_SAMPLES: usize = 64;
/// Below this eccentricity the longitude of perihelion is treated as undefined.
pub const MIN_ECCENTRICITY: f64 = 1e-4;
/// The spectral peak must exceed `NOISE_FLOOR · ln N` times the mean bin power;
/// the largest of N exponentially distributed noise powers is about `ln N`.
pub const NOISE_FLOOR: f64 = 3.0;
/// Samples required per fastest expected secular time scale.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 32.0;

/// Least-squares precession rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// rad/yr.
    pub rate: f64,
    pub std_error: f64,
}

fn check_times(times: &[f64], n: usize, min: usize) -> Result<()> {
    if times.len() != n {
        return Err(Error::Frequency(format!("{} samples but {} times", n, times.len())));
    }
    if n < min {
        return Err(Error::Frequency(format!("series too short: {n} samples, need at least {min}")));
    }
    Ok(())
}

/// Continuous branch of an angle series: consecutive jumps larger than π are
/// taken to be wraps.
pub fn unwrap_angles(angles: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(angles.len());
    let mut offset: f64 = 0.0;
    for (i, &x) in angles.iter().enumerate() {
        if i > 0 {
            let d = x + offset - out[i - 1];
            if d > PI {
                offset -= TAU * ((d - PI) / TAU).ceil();
            } else if d < -PI {
                offset += TAU * ((-d - PI) / TAU).ceil();
            }
        }
        out.push(x + offset);
    }
    out
}

/// OLS slope of the unwrapped `varpi` against `times`.
pub fn apsidal_frequency_polar(e: &[f64], varpi: &[f64], times: &[f64]) -> Result<RateFit> {
    check_times(times, varpi.len(), MIN_FIT_SAMPLES)?;
    if e.len() != varpi.len() {
        return Err(Error::Frequency("eccentricity and perihelion series differ in length".into()));
    }
    if let Some((i, &ei)) = e.iter().enumerate().find(|(_, &x)| !(x > MIN_ECCENTRICITY)) {
        return Err(Error::Frequency(format!(
            "eccentricity {ei:e} at sample {i} is too small for a well-defined perihelion; \
             use the complex-signal estimator (dominant_frequency) instead"
        )));
    }
    let y = unwrap_angles(varpi);
    let n = y.len() as f64;
    let tm = times.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (t, v) in times.iter().zip(&y) {
        sxx += (t - tm) * (t - tm);
        sxy += (t - tm) * (v - ym);
    }
    if !(sxx > 0.0) {
        return Err(Error::Frequency("times do not span an interval".into()));
    }
    let rate = sxy / sxx;
    let ssr: f64 = times.iter().zip(&y).map(|(t, v)| (v - ym - rate * (t - tm)).powi(2)).sum();
    let std_error = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(RateFit { rate, std_error })
}

/// Precession rate of one planet from its osculating elements.
pub fn apsidal_frequency(elements: &[OrbitalElements], times: &[f64]) -> Result<RateFit> {
    let e: Vec<f64> = elements.iter().map(|el| el.e).collect();
    let w: Vec<f64> = elements.iter().map(|el| el.varpi).collect();
    apsidal_frequency_polar(&e, &w, times)
}

/// Strongest frequency (rad/yr, signed) of `k + i h` on a uniform grid.
///
/// The peak bin is refined with Candan's bias-corrected three-bin estimator,
/// which is exact to a few 1e−7 of a bin for a pure tone.
pub fn dominant_frequency(h: &[f64], k: &[f64], times: &[f64]) -> Result<f64> {
    check_times(times, h.len(), MIN_FFT_SAMPLES)?;
    if k.len() != h.len() {
        return Err(Error::Frequency("h and k series differ in length".into()));
    }
    let n = h.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Frequency("times must increase".into()));
    }
    let uniform = times.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.max(times[n - 1].abs() * 1e-6));
    if !uniform {
        return Err(Error::Frequency("sampling is not uniform".into()));
    }

    let mut buf: Vec<Complex<f64>> = k.iter().zip(h).map(|(&re, &im)| Complex::new(re, im)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let power: Vec<f64> = buf.iter().map(|z| z.norm_sqr()).collect();
    let (peak, &peak_power) = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let mean = power.iter().sum::<f64>() / n as f64;
    if !(peak_power >= NOISE_FLOOR * (n as f64).ln() * mean) || peak_power == 0.0 {
        return Err(Error::Frequency(format!(
            "no spectral peak above the noise floor (peak/mean power {:.3})",
            peak_power / mean
        )));
    }

    let prev = buf[(peak + n - 1) % n];
    let next = buf[(peak + 1) % n];
    let denom = 2.0 * buf[peak] - prev - next;
    let x = PI / n as f64;
    let delta = if denom.norm() > 0.0 { x.tan() / x * ((prev - next) / denom).re } else { 0.0 };

    // forward DFT bins above n/2 are negative frequencies
    let mut bin = peak as f64 + delta;
    if bin > n as f64 / 2.0 {
        bin -= n as f64;
    }
    Ok(TAU * bin / (n as f64 * dt))
}

/// Which estimator produced a planet's rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Least-squares slope of the unwrapped perihelion longitude.
    Apsidal,
    /// Spectral peak of `k + i h`; used when `e` approaches zero.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecessionReport {
    pub g_numeric_newton: [f64; 2],
    pub g_numeric_rel: [f64; 2],
    /// Rates of the analytic series, measured on the same grid with the same estimator.
    pub g_analytic_newton: [f64; 2],
    pub g_analytic_rel: [f64; 2],
    /// Eigenfrequency of the mode dominating each planet.
    pub g_mode_newton: [f64; 2],
    pub g_mode_rel: [f64; 2],
    /// `(g_numeric_rel − g_numeric_newton)/g_numeric_newton`.
    pub rel_shift: [Option<f64>; 2],
    /// The same shift predicted from the dominant eigenfrequencies of `A` and `B`.
    pub predicted_shift: [Option<f64>; 2],
    pub method: [Method; 2],
    pub secular_period_newton: f64,
    pub secular_period_rel: f64,
    pub pi: PiReport,
}

/// Analytic eccentricity vectors on a time grid.
pub fn analytic_series(modes: &SecularModes, times: &[f64]) -> Vec<EccentricityVector> {
    times.iter().map(|&t| evolve(modes, t)).collect()
}

/// Largest output interval that still resolves every secular time scale of `model`.
pub fn max_sampling_interval(model: &SecularModel) -> f64 {
    let mut fastest: f64 = 0.0;
    for modes in [&model.newtonian, &model.relativistic] {
        fastest = fastest.max(modes.g[0].abs()).max(modes.g[1].abs()).max((modes.g[0] - modes.g[1]).abs());
    }
    TAU / fastest / MIN_SAMPLES_PER_PERIOD
}

pub struct NumericRun {
    pub trajectory: CartesianTrajectory,
    pub elements: [Vec<OrbitalElements>; 2],
}

pub struct Comparison {
    pub report: PrecessionReport,
    pub secular: SecularModel,
    pub newtonian: NumericRun,
    pub relativistic: NumericRun,
    pub analytic_newton: Vec<EccentricityVector>,
    pub analytic_rel: Vec<EccentricityVector>,
}

fn run(config: &SystemConfig, settings: &IntegrationSettings) -> Result<NumericRun> {
    let trajectory = integrate(config, settings).map_err(Error::from)?;
    let elements = osculating_series(&trajectory)?;
    Ok(NumericRun { trajectory, elements })
}

fn shift(newton: f64, rel: f64) -> Option<f64> {
    (newton != 0.0).then(|| (rel - newton) / newton)
}

struct PlanetRates {
    numeric: [f64; 2],
    analytic: [f64; 2],
    method: Method,
}

fn planet_rates(
    i: usize,
    times: &[f64],
    numeric: [&[OrbitalElements]; 2],
    analytic: [&[EccentricityVector]; 2],
) -> Result<PlanetRates> {
    let apsidal = || -> Result<PlanetRates> {
        let mut out = PlanetRates { numeric: [0.0; 2], analytic: [0.0; 2], method: Method::Apsidal };
        for m in 0..2 {
            out.numeric[m] = apsidal_frequency(numeric[m], times)?.rate;
            let e: Vec<f64> = analytic[m].iter().map(|z| z.e(i)).collect();
            let w: Vec<f64> = analytic[m].iter().map(|z| z.varpi(i)).collect();
            out.analytic[m] = apsidal_frequency_polar(&e, &w, times)?.rate;
        }
        Ok(out)
    };
    let spectral = || -> Result<PlanetRates> {
        let mut out = PlanetRates { numeric: [0.0; 2], analytic: [0.0; 2], method: Method::Spectral };
        for m in 0..2 {
            let (h, k): (Vec<f64>, Vec<f64>) = numeric[m].iter().map(|el| el.hk()).unzip();
            out.numeric[m] = dominant_frequency(&h, &k, times)?;
            let h: Vec<f64> = analytic[m].iter().map(|z| z.h[i]).collect();
            let k: Vec<f64> = analytic[m].iter().map(|z| z.k[i]).collect();
            out.analytic[m] = dominant_frequency(&h, &k, times)?;
        }
        Ok(out)
    };
    apsidal().or_else(|first| {
        spectral().map_err(|second| Error::Frequency(format!("planet {}: {first}; {second}", i + 1)))
    })
}

/// Integrate both models, evolve both analytic models on the same grid, and
/// extract every planet's precession rate from all four series.
pub fn compare(config: &SystemConfig, settings: &IntegrationSettings) -> Result<Comparison> {
    settings.validate()?;
    let secular = SecularModel::new(config)?;
    let newton_cfg = config.with_model(Model::Newtonian);
    let rel_cfg = config.with_model(Model::Relativistic);

    let (newtonian, relativistic) = std::thread::scope(|s| {
        let handle = s.spawn(|| run(&rel_cfg, settings));
        let newtonian = run(&newton_cfg, settings);
        let relativistic = handle.join().expect("integration thread panicked");
        (newtonian, relativistic)
    });
    let (newtonian, relativistic) = (newtonian?, relativistic?);

    let times = newtonian.trajectory.times.clone();
    let analytic_newton = analytic_series(&secular.newtonian, &times);
    let analytic_rel = analytic_series(&secular.relativistic, &times);

    let mut report = PrecessionReport {
        g_numeric_newton: [0.0; 2],
        g_numeric_rel: [0.0; 2],
        g_analytic_newton: [0.0; 2],
        g_analytic_rel: [0.0; 2],
        g_mode_newton: [0.0; 2],
        g_mode_rel: [0.0; 2],
        rel_shift: [None; 2],
        predicted_shift: [None; 2],
        method: [Method::Apsidal; 2],
        secular_period_newton: secular.newtonian.secular_period(),
        secular_period_rel: secular.relativistic.secular_period(),
        pi: pi_indicator(config, DEFAULT_THRESHOLD),
    };
    for i in 0..2 {
        let rates = planet_rates(
            i,
            &times,
            [&newtonian.elements[i], &relativistic.elements[i]],
            [&analytic_newton, &analytic_rel],
        )?;
        report.g_numeric_newton[i] = rates.numeric[0];
        report.g_numeric_rel[i] = rates.numeric[1];
        report.g_analytic_newton[i] = rates.analytic[0];
        report.g_analytic_rel[i] = rates.analytic[1];
        report.method[i] = rates.method;
        report.g_mode_newton[i] = secular.newtonian.g[secular.newtonian.dominant_mode(i)];
        report.g_mode_rel[i] = secular.relativistic.g[secular.relativistic.dominant_mode(i)];
        report.rel_shift[i] = shift(rates.numeric[0], rates.numeric[1]);
        report.predicted_shift[i] = shift(report.g_mode_newton[i], report.g_mode_rel[i]);
    }
    Ok(Comparison { report, secular, newtonian, relativistic, analytic_newton, analytic_rel })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, dt: f64, t0: f64) -> Vec<f64> {
        (0..n).map(|i| t0 + i as f64 * dt).collect()
    }

    fn wrap(x: f64) -> f64 {
        x.rem_euclid(TAU)
    }

    #[test]
    fn exact_linear_perihelion() {
        let t = grid(200, 10.0, 0.0);
        let w: Vec<f64> = t.iter().map(|&t| wrap(0.3 + 0.002 * t)).collect();
        let e = vec![0.1; t.len()];
        let fit = apsidal_frequency_polar(&e, &w, &t).unwrap();
        assert!((fit.rate - 0.002).abs() < 1e-12);
        assert!(fit.std_error < 1e-12);
    }

    #[test]
    fn retrograde_and_constant() {
        let t = grid(100, 1.0, 0.0);
        let e = vec![0.2; t.len()];
        let w: Vec<f64> = t.iter().map(|&t| wrap(1.0 - 0.3 * t)).collect();
        assert!((apsidal_frequency_polar(&e, &w, &t).unwrap().rate + 0.3).abs() < 1e-12);
        let w = vec![2.0; t.len()];
        assert_eq!(apsidal_frequency_polar(&e, &w, &t).unwrap().rate, 0.0);
    }

    #[test]
    fn apsidal_preconditions() {
        let t = grid(10, 1.0, 0.0);
        assert!(apsidal_frequency_polar(&[0.1; 10], &[0.0; 10], &t).is_err());
        let t = grid(20, 1.0, 0.0);
        let mut e = vec![0.1; 20];
        e[7] = 1e-6;
        let err = apsidal_frequency_polar(&e, &[0.0; 20], &t).unwrap_err().to_string();
        assert!(err.contains("dominant_frequency"), "{err}");
    }

    #[test]
    fn offset_and_origin_invariance() {
        let g = 3e-4;
        let rate = |t0: f64, w0: f64| {
            let t = grid(500, 37.0, t0);
            let e: Vec<f64> = t.iter().map(|&t| 0.2 + 0.05 * (1e-4 * t).cos()).collect();
            let w: Vec<f64> = t.iter().map(|&t| wrap(w0 + g * (t - t0) + 0.01 * (1e-4 * t).sin())).collect();
            apsidal_frequency_polar(&e, &w, &t).unwrap().rate
        };
        let base = rate(0.0, 0.0);
        assert!((rate(0.0, 2.5) - base).abs() < 1e-15);
        let t = grid(500, 37.0, 0.0);
        let h: Vec<f64> = t.iter().map(|&t| 0.1 * (g * t).sin()).collect();
        let k: Vec<f64> = t.iter().map(|&t| 0.1 * (g * t).cos()).collect();
        let shifted: Vec<f64> = t.iter().map(|&t| t + 1.0e5).collect();
        let a = dominant_frequency(&h, &k, &t).unwrap();
        let b = dominant_frequency(&h, &k, &shifted).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn pure_tone_within_thousandth_of_a_bin() {
        let n = 1024;
        let dt = 13.0;
        let t = grid(n, dt, 0.0);
        let bin = TAU / (n as f64 * dt);
        for frac in [0.0, 0.1, 0.37, 0.5, 0.83] {
            for sign in [1.0, -1.0] {
                let g = sign * (41.0 + frac) * bin;
                let h: Vec<f64> = t.iter().map(|&t| 0.05 * (g * t + 0.4).sin()).collect();
                let k: Vec<f64> = t.iter().map(|&t| 0.05 * (g * t + 0.4).cos()).collect();
                let est = dominant_frequency(&h, &k, &t).unwrap();
                assert!((est - g).abs() < 1e-3 * bin, "{frac} {sign}: {} bins", (est - g) / bin);
            }
        }
    }

    #[test]
    fn two_tones_pick_the_stronger() {
        let n = 2048;
        let t = grid(n, 5.0, 0.0);
        let (g1, g2) = (2.3e-3, -7.1e-3);
        let h: Vec<f64> = t.iter().map(|&t| 0.02 * (g1 * t).sin() + 0.05 * (g2 * t + 1.0).sin()).collect();
        let k: Vec<f64> = t.iter().map(|&t| 0.02 * (g1 * t).cos() + 0.05 * (g2 * t + 1.0).cos()).collect();
        let est = dominant_frequency(&h, &k, &t).unwrap();
        let bin = TAU / (n as f64 * 5.0);
        assert!((est - g2).abs() < 0.1 * bin);
    }

    #[test]
    fn spectral_preconditions() {
        let t = grid(32, 1.0, 0.0);
        assert!(dominant_frequency(&[0.0; 32], &[0.1; 32], &t).is_err());
        let t = grid(128, 1.0, 0.0);
        assert!(dominant_frequency(&[0.0; 128], &[0.0; 128], &t).is_err());
        let mut t2 = t.clone();
        t2[50] += 0.3;
        assert!(dominant_frequency(&[0.0; 128], &[0.1; 128], &t2).is_err());
    }

    #[test]
    fn white_noise_has_no_peak() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let n = 4096;
        let t = grid(n, 1.0, 0.0);
        let h: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let k: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        assert!(dominant_frequency(&h, &k, &t).is_err());
    }

    #[test]
    fn estimators_agree_on_single_mode() {
        for (e, g) in [(0.01, 1.7e-4_f64), (0.2, -4.0e-5), (0.5, 9.0e-6)] {
            // span several cycles between bins, off-grid on purpose
            let n = 4000;
            let dt = TAU / g.abs() * 7.3 / n as f64;
            let t = grid(n, dt, 0.0);
            let h: Vec<f64> = t.iter().map(|&t| e * (g * t + 0.2).sin()).collect();
            let k: Vec<f64> = t.iter().map(|&t| e * (g * t + 0.2).cos()).collect();
            let w: Vec<f64> = h.iter().zip(&k).map(|(h, k)| h.atan2(*k)).collect();
            let a = apsidal_frequency_polar(&vec![e; n], &w, &t).unwrap().rate;
            let b = dominant_frequency(&h, &k, &t).unwrap();
            assert!((a - b).abs() < 0.02 * a.abs(), "{a} {b}");
        }
    }

    #[test]
    fn unwrap_handles_multiple_turns() {
        let raw: Vec<f64> = (0..50).map(|i| wrap(i as f64 * 2.9)).collect();
        let u = unwrap_angles(&raw);
        for w in u.windows(2) {
            assert!((w[1] - w[0] - 2.9).abs() < 1e-12);
        }
    }
}
