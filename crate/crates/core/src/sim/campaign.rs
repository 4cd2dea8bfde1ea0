use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{GridflexError, Result};
use crate::sim::run::{run_once, RunRecord, Scenario};

/// Aggregate statistics of the non-failed runs of a campaign.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregate {
    /// Mean deviation integral over the non-failed runs (Hz*h).
    pub mean_j_hz_h: f64,
    /// Sample standard deviation of the per-run integrals.
    pub std_j_hz_h: f64,
    /// Two-sided 95% confidence half-width (Student-t); zero for a
    /// single run.
    pub ci95_half_width: f64,
    pub n_runs_used: usize,
}

/// Outcome of a batch of independent seeded runs of one scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Campaign {
    pub base_seed: u64,
    pub n_runs: usize,
    pub n_failed: usize,
    pub failure_rate: f64,
    /// None when every run failed.
    pub aggregate: Option<Aggregate>,
    /// Mean per-iteration solve time across all recorded iterations (s).
    pub mean_solve_time_s: f64,
    /// Mean MDP size per iteration.
    pub mean_states: f64,
    pub mean_actions: f64,
    pub runs: Vec<RunRecord>,
}

fn aggregate_j(values: &[f64]) -> Option<Aggregate> {
    if values.is_empty() {
        return None;
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Some(Aggregate {
            mean_j_hz_h: mean,
            std_j_hz_h: 0.0,
            ci95_half_width: 0.0,
            n_runs_used: 1,
        });
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let std = var.sqrt();
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("degrees of freedom are positive")
        .inverse_cdf(0.975);
    Some(Aggregate {
        mean_j_hz_h: mean,
        std_j_hz_h: std,
        ci95_half_width: t * std / (n as f64).sqrt(),
        n_runs_used: n,
    })
}

/// Runs `n_runs` independent trajectories with seeds
/// `base_seed .. base_seed + n_runs` and aggregates them. Failed runs are
/// counted but excluded from the deviation statistics.
pub fn run_campaign(scenario: &Scenario, base_seed: u64, n_runs: usize) -> Result<Campaign> {
    if n_runs == 0 {
        return Err(GridflexError::Argument("campaign needs at least one run".into()));
    }
    scenario.validate()?;
    let runs: Vec<RunRecord> = (0..n_runs as u64)
        .into_par_iter()
        .map(|offset| run_once(scenario, base_seed + offset))
        .collect::<Result<Vec<_>>>()?;

    let n_failed = runs.iter().filter(|r| r.failed()).count();
    let js: Vec<f64> = runs
        .iter()
        .filter(|r| !r.failed())
        .map(|r| r.j_hz_h)
        .collect();

    let mut n_iters = 0usize;
    let mut time_acc = 0.0;
    let mut state_acc = 0.0;
    let mut action_acc = 0.0;
    for run in &runs {
        for step in &run.steps {
            n_iters += 1;
            time_acc += step.solve_time_s;
            state_acc += step.n_states as f64;
            action_acc += step.n_actions as f64;
        }
    }
    let denom = n_iters.max(1) as f64;

    Ok(Campaign {
        base_seed,
        n_runs,
        n_failed,
        failure_rate: n_failed as f64 / n_runs as f64,
        aggregate: aggregate_j(&js),
        mean_solve_time_s: time_acc / denom,
        mean_states: state_acc / denom,
        mean_actions: action_acc / denom,
        runs,
    })
}

impl Campaign {
    /// One-row-per-run CSV summary.
    pub fn to_summary_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "seed",
            "failed",
            "failure_step",
            "failure_kind",
            "j_hz_h",
            "steps_completed",
            "mean_solve_time_s",
        ])?;
        for run in &self.runs {
            let (failed, step, kind) = match &run.failure {
                Some(f) => (true, f.step.to_string(), format!("{:?}", f.kind)),
                None => (false, String::new(), String::new()),
            };
            w.write_record([
                run.seed.to_string(),
                failed.to_string(),
                step,
                kind,
                format!("{:.9}", run.j_hz_h),
                run.steps.len().to_string(),
                format!("{:.6}", run.mean_solve_time_s()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json_file(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn aggregate_single_value_has_zero_ci() {
        let agg = aggregate_j(&[1.5]).unwrap();
        assert_eq!(agg.mean_j_hz_h, 1.5);
        assert_eq!(agg.ci95_half_width, 0.0);
    }

    #[test]
    fn aggregate_empty_is_none() {
        assert!(aggregate_j(&[]).is_none());
    }

    #[test]
    fn aggregate_matches_hand_computed_t_interval() {
        // n = 5, mean 3, sample std 1; t_{0.975, 4} = 2.7764451...
        let values = [2.0, 2.5, 3.0, 3.5, 4.0];
        let agg = aggregate_j(&values).unwrap();
        assert_relative_eq!(agg.mean_j_hz_h, 3.0, epsilon = 1e-12);
        let expected_std = (values.iter().map(|v| (v - 3.0f64).powi(2)).sum::<f64>() / 4.0).sqrt();
        assert_relative_eq!(agg.std_j_hz_h, expected_std, epsilon = 1e-12);
        assert_relative_eq!(
            agg.ci95_half_width,
            2.7764451051977987 * expected_std / 5.0f64.sqrt(),
            epsilon = 1e-9
        );
    }
}
