use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GridflexError, Result};

/// Time series of wind power forecast and actual production, with the
/// forecast error derived as actual minus forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSeries {
    /// Seconds since epoch, uniformly spaced.
    pub timestamps: Vec<f64>,
    /// Forecast power (MW).
    pub forecast: Vec<f64>,
    /// Actual power (MW).
    pub actual: Vec<f64>,
}

impl ErrorSeries {
    pub fn new(timestamps: Vec<f64>, forecast: Vec<f64>, actual: Vec<f64>) -> Result<Self> {
        let series = ErrorSeries {
            timestamps,
            forecast,
            actual,
        };
        series.validate()?;
        Ok(series)
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Forecast error (MW) at index i.
    pub fn error(&self, i: usize) -> f64 {
        self.actual[i] - self.forecast[i]
    }

    pub fn errors(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.error(i)).collect()
    }

    /// Uniform sample spacing in seconds.
    pub fn spacing(&self) -> f64 {
        self.timestamps[1] - self.timestamps[0]
    }

    pub fn validate(&self) -> Result<()> {
        if self.timestamps.len() != self.forecast.len() || self.timestamps.len() != self.actual.len()
        {
            return Err(GridflexError::Dimension(
                "timestamp, forecast, and actual columns must have equal length".into(),
            ));
        }
        if self.timestamps.len() < 2 {
            return Err(GridflexError::Argument(
                "series needs at least two samples".into(),
            ));
        }
        let dt = self.spacing();
        if !(dt > 0.0) {
            return Err(GridflexError::Argument(
                "timestamps must be strictly increasing".into(),
            ));
        }
        for w in self.timestamps.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt.max(1.0) {
                return Err(GridflexError::Argument(
                    "timestamps must be uniformly spaced".into(),
                ));
            }
        }
        Ok(())
    }

    /// Reads `timestamp,forecast_mw,actual_mw` CSV.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        {
            let headers = reader.headers()?;
            let expected = ["timestamp", "forecast_mw", "actual_mw"];
            let got: Vec<&str> = headers.iter().collect();
            if got != expected {
                return Err(GridflexError::CsvFormat {
                    line: 1,
                    message: format!("expected header {expected:?}, got {got:?}"),
                });
            }
        }
        let mut timestamps = Vec::new();
        let mut forecast = Vec::new();
        let mut actual = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record?;
            let line = idx + 2;
            let parse = |field: usize, name: &str| -> Result<f64> {
                record
                    .get(field)
                    .ok_or_else(|| GridflexError::CsvFormat {
                        line,
                        message: format!("missing {name} column"),
                    })?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| GridflexError::CsvFormat {
                        line,
                        message: format!("bad {name} value: {e}"),
                    })
            };
            timestamps.push(parse(0, "timestamp")?);
            forecast.push(parse(1, "forecast_mw")?);
            actual.push(parse(2, "actual_mw")?);
        }
        ErrorSeries::new(timestamps, forecast, actual)
    }

    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        writer.write_record(["timestamp", "forecast_mw", "actual_mw"])?;
        for i in 0..self.len() {
            writer.write_record([
                format!("{}", self.timestamps[i]),
                format!("{}", self.forecast[i]),
                format!("{}", self.actual[i]),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Linearly interpolates forecast and actual onto a finer uniform grid;
/// the error is recomputed from the interpolated columns. `target_dt`
/// must evenly divide the source spacing.
pub fn interpolate(series: &ErrorSeries, target_dt: f64) -> Result<ErrorSeries> {
    series.validate()?;
    if !(target_dt > 0.0) {
        return Err(GridflexError::Argument("target_dt must be positive".into()));
    }
    let src_dt = series.spacing();
    let ratio = src_dt / target_dt;
    let n_sub = ratio.round() as usize;
    if n_sub == 0 || (ratio - n_sub as f64).abs() > 1e-9 * ratio {
        return Err(GridflexError::Argument(format!(
            "target spacing {target_dt} s does not divide source spacing {src_dt} s"
        )));
    }
    if n_sub == 1 {
        return Ok(series.clone());
    }
    let n = series.len();
    let out_len = (n - 1) * n_sub + 1;
    let mut timestamps = Vec::with_capacity(out_len);
    let mut forecast = Vec::with_capacity(out_len);
    let mut actual = Vec::with_capacity(out_len);
    for i in 0..n - 1 {
        for j in 0..n_sub {
            let frac = j as f64 / n_sub as f64;
            timestamps.push(series.timestamps[i] + frac * src_dt);
            forecast.push(series.forecast[i] * (1.0 - frac) + series.forecast[i + 1] * frac);
            actual.push(series.actual[i] * (1.0 - frac) + series.actual[i + 1] * frac);
        }
    }
    timestamps.push(series.timestamps[n - 1]);
    forecast.push(series.forecast[n - 1]);
    actual.push(series.actual[n - 1]);
    ErrorSeries::new(timestamps, forecast, actual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn series(dt: f64, forecast: Vec<f64>, actual: Vec<f64>) -> ErrorSeries {
        let timestamps = (0..forecast.len()).map(|i| i as f64 * dt).collect();
        ErrorSeries::new(timestamps, forecast, actual).unwrap()
    }

    #[test]
    fn identity_when_target_equals_source_spacing() {
        let s = series(900.0, vec![1.0, 2.0, 3.0], vec![1.5, 1.0, 3.5]);
        let out = interpolate(&s, 900.0).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn refine_900s_to_300s_adds_third_points() {
        let s = series(900.0, vec![0.0, 3.0], vec![3.0, 0.0]);
        let out = interpolate(&s, 300.0).unwrap();
        assert_eq!(out.len(), 4);
        assert_relative_eq!(out.forecast[1], 1.0);
        assert_relative_eq!(out.forecast[2], 2.0);
        assert_relative_eq!(out.actual[1], 2.0);
        assert_relative_eq!(out.timestamps[1], 300.0);
        // Endpoints preserved.
        assert_eq!(out.forecast[3], 3.0);
        assert_eq!(out.actual[0], 3.0);
    }

    #[test]
    fn constant_series_stays_constant_with_triple_length() {
        let s = series(900.0, vec![2.0; 5], vec![2.5; 5]);
        let out = interpolate(&s, 300.0).unwrap();
        assert_eq!(out.len(), 3 * 5 - 2);
        assert!(out.forecast.iter().all(|&x| (x - 2.0).abs() < 1e-12));
        assert!(out.errors().iter().all(|&e| (e - 0.5).abs() < 1e-12));
    }

    #[test]
    fn non_divisible_target_rejected() {
        let s = series(900.0, vec![1.0, 2.0], vec![1.0, 2.0]);
        assert!(interpolate(&s, 400.0).is_err());
    }
}
