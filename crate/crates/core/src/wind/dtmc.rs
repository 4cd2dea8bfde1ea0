use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GridflexError, Result};
use crate::wind::ErrorSeries;

/// Finite-state Markov chain of the wind power forecast error.
///
/// States are uniform bins over the training error range; each bin is
/// represented by its midpoint. The transition matrix is row-stochastic;
/// raw transition counts are retained for diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindDtmc {
    /// n_bins + 1 monotonically increasing bin edges (MW).
    pub bins: Vec<f64>,
    /// Per-bin representative error (MW), the bin midpoint.
    pub rep_value: Vec<f64>,
    /// Row-stochastic transition matrix.
    pub trans: Vec<Vec<f64>>,
    /// Raw transition counts.
    pub counts: Vec<Vec<u64>>,
}

/// Default bin count for the forecast-error discretization.
pub const DEFAULT_BINS: usize = 41;

impl WindDtmc {
    pub fn n_states(&self) -> usize {
        self.rep_value.len()
    }

    /// An identity chain whose middle bin represents exactly zero error.
    /// Useful as the disturbance-free baseline.
    pub fn zero_noise() -> Self {
        let bins = vec![-1.5, -0.5, 0.5, 1.5];
        WindDtmc {
            rep_value: bins.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(),
            trans: (0..3)
                .map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            counts: vec![vec![0; 3]; 3],
            bins,
        }
    }

    /// Index of the zero-error bin (the bin containing 0.0).
    pub fn zero_state(&self) -> usize {
        map_error(self, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_states();
        if n == 0 || self.bins.len() != n + 1 || self.trans.len() != n || self.counts.len() != n {
            return Err(GridflexError::Dimension(
                "DTMC field lengths are inconsistent".into(),
            ));
        }
        let width = self.bins[1] - self.bins[0];
        for w in self.bins.windows(2) {
            if !(w[1] > w[0]) {
                return Err(GridflexError::Argument(
                    "bin edges must be strictly increasing".into(),
                ));
            }
            if ((w[1] - w[0]) - width).abs() > 1e-9 * width {
                return Err(GridflexError::Argument("bins must have uniform width".into()));
            }
        }
        for (i, &rep) in self.rep_value.iter().enumerate() {
            if !(rep > self.bins[i] && rep < self.bins[i + 1]) {
                return Err(GridflexError::Argument(format!(
                    "representative value of bin {i} is not strictly inside the bin"
                )));
            }
        }
        for (i, row) in self.trans.iter().enumerate() {
            if row.len() != n {
                return Err(GridflexError::Dimension(format!("row {i} has wrong length")));
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(GridflexError::Argument(format!(
                    "row {i} has entries outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(GridflexError::Argument(format!(
                    "row {i} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json_file(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let dtmc: WindDtmc = serde_json::from_str(&text)?;
        dtmc.validate()?;
        Ok(dtmc)
    }

    /// Fraction of populated rows (rows with observed transitions) whose
    /// diagonal entry is the row maximum.
    pub fn diagonal_dominance(&self) -> f64 {
        let mut populated = 0usize;
        let mut dominant = 0usize;
        for (i, row) in self.trans.iter().enumerate() {
            if self.counts[i].iter().sum::<u64>() == 0 {
                continue;
            }
            populated += 1;
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if row[i] >= max {
                dominant += 1;
            }
        }
        if populated == 0 {
            0.0
        } else {
            dominant as f64 / populated as f64
        }
    }
}

fn bin_of(bins: &[f64], value: f64) -> usize {
    let n = bins.len() - 1;
    if value < bins[0] {
        return 0;
    }
    if value >= bins[n] {
        return n - 1;
    }
    // Half-open [lo, hi) bins; the last bin also takes its upper edge via
    // the clamp above.
    let width = (bins[n] - bins[0]) / n as f64;
    let idx = ((value - bins[0]) / width) as usize;
    // Guard against rounding at edges.
    let idx = idx.min(n - 1);
    if value < bins[idx] {
        idx - 1
    } else if value >= bins[idx + 1] {
        idx + 1
    } else {
        idx
    }
}

/// Maps a continuous forecast error to its wind-state index; values
/// outside the bin range clamp to the first/last bin.
pub fn map_error(dtmc: &WindDtmc, error: f64) -> usize {
    bin_of(&dtmc.bins, error)
}

/// Maximum-likelihood estimation of the wind-error chain: uniform bins
/// over the observed error range, transition probabilities from
/// transition counts. Rows without observations get a self-loop.
pub fn estimate_dtmc(series: &ErrorSeries, n_bins: usize) -> Result<WindDtmc> {
    series.validate()?;
    if n_bins < 2 {
        return Err(GridflexError::Argument("n_bins must be at least 2".into()));
    }
    let errors = series.errors();
    let min = errors.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = errors.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return Err(GridflexError::DegenerateData(format!(
            "error series is constant at {min} MW; cannot discretize"
        )));
    }
    let width = (max - min) / n_bins as f64;
    let bins: Vec<f64> = (0..=n_bins).map(|i| min + i as f64 * width).collect();
    let rep_value: Vec<f64> = (0..n_bins).map(|i| min + (i as f64 + 0.5) * width).collect();

    let mut counts = vec![vec![0u64; n_bins]; n_bins];
    let states: Vec<usize> = errors.iter().map(|&e| bin_of(&bins, e)).collect();
    for w in states.windows(2) {
        counts[w[0]][w[1]] += 1;
    }
    let trans: Vec<Vec<f64>> = counts
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let total: u64 = row.iter().sum();
            if total == 0 {
                (0..n_bins).map(|j| if i == j { 1.0 } else { 0.0 }).collect()
            } else {
                row.iter().map(|&c| c as f64 / total as f64).collect()
            }
        })
        .collect();

    let dtmc = WindDtmc {
        bins,
        rep_value,
        trans,
        counts,
    };
    dtmc.validate()?;
    Ok(dtmc)
}

/// Positive-probability successors of a wind state, in ascending index
/// order.
pub fn successors(dtmc: &WindDtmc, s_w: usize) -> Vec<(usize, f64)> {
    dtmc.trans[s_w]
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(j, &p)| (j, p))
        .collect()
}

/// Samples a state trajectory of length `steps + 1` starting at `s0`,
/// using a ChaCha8 stream seeded from `seed`. Identical seeds yield
/// identical trajectories.
pub fn sample_trajectory(dtmc: &WindDtmc, s0: usize, steps: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traj = Vec::with_capacity(steps + 1);
    let mut state = s0;
    traj.push(state);
    for _ in 0..steps {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let row = &dtmc.trans[state];
        let mut next = row.len() - 1;
        for (j, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                next = j;
                break;
            }
        }
        state = next;
        traj.push(state);
    }
    traj
}
