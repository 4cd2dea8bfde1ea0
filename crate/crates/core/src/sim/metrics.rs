/// Trapezoidal integral of the absolute total frequency deviation over a
/// trajectory sampled every `dt_control` seconds, in Hz*h.
///
/// `sum_omega` holds the signed per-step sum of the node frequency
/// deviations.
pub fn integrate_abs_deviation(sum_omega: &[f64], dt_control: f64) -> f64 {
    if sum_omega.len() < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for w in sum_omega.windows(2) {
        acc += 0.5 * (w[0].abs() + w[1].abs()) * dt_control;
    }
    acc / 3600.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_trajectory_integrates_to_zero() {
        assert_eq!(integrate_abs_deviation(&[0.0; 289], 300.0), 0.0);
    }

    #[test]
    fn constant_deviation_over_24h_is_2_4() {
        let sum_omega = vec![0.1; 289];
        assert_relative_eq!(integrate_abs_deviation(&sum_omega, 300.0), 2.4, epsilon = 1e-12);
    }

    #[test]
    fn sawtooth_matches_triangle_area() {
        // Rises 0 -> 0.2 over 12 h, falls back over the next 12 h; the
        // analytic integral is the triangle area 0.5 * 24 h * 0.2 Hz.
        let n = 288;
        let sum_omega: Vec<f64> = (0..=n)
            .map(|k| {
                let frac = k as f64 / n as f64;
                if frac <= 0.5 {
                    0.4 * frac
                } else {
                    0.4 * (1.0 - frac)
                }
            })
            .collect();
        let j = integrate_abs_deviation(&sum_omega, 300.0);
        assert_relative_eq!(j, 0.5 * 24.0 * 0.2, epsilon = 1e-12);
    }

    #[test]
    fn additive_over_concatenation_sharing_boundary() {
        let a: Vec<f64> = (0..10).map(|k| (k as f64 * 0.7).sin() * 0.05).collect();
        let b: Vec<f64> = (9..25).map(|k| (k as f64 * 0.7).sin() * 0.05).collect();
        let whole: Vec<f64> = (0..25).map(|k| (k as f64 * 0.7).sin() * 0.05).collect();
        let j_split =
            integrate_abs_deviation(&a, 300.0) + integrate_abs_deviation(&b, 300.0);
        assert_relative_eq!(j_split, integrate_abs_deviation(&whole, 300.0), epsilon = 1e-14);
    }
}
