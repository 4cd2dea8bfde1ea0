//! Synthetic data generation: an AR(1) forecast-error process standing in
//! for historical wind data, plus smooth daily load and forecast
//! profiles. Output schemas match the CSV ingestion paths, so measured
//! data drops in unchanged.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::wind::ErrorSeries;

/// Generates a seeded AR(1) forecast-error series around a constant
/// forecast of `base_power` MW. `rho` is the one-step autocorrelation and
/// `sigma` the stationary standard deviation of the error.
pub fn ar1_series(
    samples: usize,
    dt: f64,
    rho: f64,
    sigma: f64,
    base_power: f64,
    seed: u64,
) -> ErrorSeries {
    assert!(samples >= 2, "need at least two samples");
    assert!((-1.0..1.0).contains(&rho), "rho must be in (-1, 1)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let innovation = Normal::new(0.0, sigma * (1.0 - rho * rho).sqrt()).unwrap();
    let start = Normal::new(0.0, sigma).unwrap();

    let mut error = start.sample(&mut rng);
    let mut timestamps = Vec::with_capacity(samples);
    let mut forecast = Vec::with_capacity(samples);
    let mut actual = Vec::with_capacity(samples);
    for i in 0..samples {
        timestamps.push(i as f64 * dt);
        forecast.push(base_power);
        actual.push(base_power + error);
        error = rho * error + innovation.sample(&mut rng);
    }
    ErrorSeries::new(timestamps, forecast, actual).expect("generated series is well-formed")
}

/// Smooth daily per-node load profile: a base level plus a sinusoid with
/// a 24-hour period, phase-shifted per node.
pub fn daily_load_profile(
    n_t: usize,
    steps: usize,
    dt: f64,
    base: f64,
    amplitude: f64,
) -> Vec<Vec<f64>> {
    (0..steps)
        .map(|k| {
            let t = k as f64 * dt;
            (0..n_t)
                .map(|n| {
                    let phase = n as f64 * std::f64::consts::FRAC_PI_4;
                    base + amplitude * (2.0 * std::f64::consts::PI * t / 86_400.0 + phase).sin()
                })
                .collect()
        })
        .collect()
}

/// Constant per-farm wind forecast profile.
pub fn flat_forecast_profile(n_f: usize, steps: usize, level: f64) -> Vec<Vec<f64>> {
    vec![vec![level; n_f]; steps]
}
