//! JSON scenario configuration: everything a closed-loop experiment
//! needs, resolved into a runnable [`Scenario`].

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GridflexError, Result};
use crate::grid::{day_ahead_schedule, presets, GridSpec};
use crate::sim::Scenario;
use crate::wind::{synth, WindDtmc};
use crate::mdp::DEFAULT_VIOLATION_PENALTY;

/// Where the grid definition comes from: a built-in preset or a JSON
/// file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSource {
    Preset { preset: String },
    Path { path: PathBuf },
}

/// Where the wind-error chain comes from: an estimated model on disk or
/// the built-in noiseless chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DtmcSource {
    Path { path: PathBuf },
    ZeroNoise { zero_noise: bool },
}

/// Daily sinusoidal load profile parameters (per-node phase shifts are
/// built in).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoadConfig {
    /// Base per-node demand (MW).
    pub base: f64,
    /// Sinusoid amplitude (MW); zero gives a flat profile.
    #[serde(default)]
    pub amplitude: f64,
}

fn default_penalty() -> f64 {
    DEFAULT_VIOLATION_PENALTY
}

/// Scenario description as stored on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub grid: GridSource,
    pub dtmc: DtmcSource,
    /// Discretization level per free control dimension.
    pub lambda: usize,
    /// Exploration horizon in control steps.
    pub horizon_steps: usize,
    /// Receding-horizon iterations per run.
    pub control_steps: usize,
    #[serde(default = "default_penalty")]
    pub violation_penalty: f64,
    /// Initial state of charge per battery; defaults to 0.5 each.
    #[serde(default)]
    pub soc0: Option<Vec<f64>>,
    pub load: LoadConfig,
    /// Constant per-farm wind forecast level (MW).
    pub wind_forecast: f64,
}

fn resolve(base_dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base_dir.join(path)
    }
}

/// Looks up a built-in grid by name.
pub fn preset_grid(name: &str) -> Result<GridSpec> {
    match name {
        "one_node" => Ok(presets::one_node()),
        "three_node" => Ok(presets::three_node()),
        "three_node_two_batteries" => Ok(presets::three_node_two_batteries()),
        other => Err(GridflexError::Config(format!(
            "unknown grid preset '{other}' (expected one_node, three_node, or three_node_two_batteries)"
        ))),
    }
}

/// Wraps file-level errors with the offending path so a bad reference in
/// a config reports as a config problem, not a bare I/O failure.
fn with_path_context<T>(what: &str, path: &Path, result: Result<T>) -> Result<T> {
    result.map_err(|e| match e {
        GridflexError::Io(inner) => GridflexError::Config(format!(
            "cannot read {what} '{}': {inner}",
            path.display()
        )),
        other => other,
    })
}

impl ScenarioConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let open = || -> Result<ScenarioConfig> {
            let file = std::fs::File::open(path)?;
            Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
        };
        with_path_context("scenario config", path, open())
    }

    pub fn to_json_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    /// Resolves sources (relative paths against `base_dir`) and builds
    /// the day-ahead plan over the full run window.
    pub fn build(&self, base_dir: &Path) -> Result<Scenario> {
        let spec = match &self.grid {
            GridSource::Preset { preset } => preset_grid(preset)?,
            GridSource::Path { path } => {
                let full = resolve(base_dir, path);
                with_path_context("grid file", &full, GridSpec::from_json_file(&full))?
            }
        };
        spec.validate()?;
        let dtmc = match &self.dtmc {
            DtmcSource::Path { path } => {
                let full = resolve(base_dir, path);
                with_path_context("wind chain file", &full, WindDtmc::from_json_file(&full))?
            }
            DtmcSource::ZeroNoise { zero_noise } => {
                if !zero_noise {
                    return Err(GridflexError::Config(
                        "zero_noise must be true when present".into(),
                    ));
                }
                WindDtmc::zero_noise()
            }
        };
        dtmc.validate()?;

        let steps = self.control_steps + self.horizon_steps + 1;
        let load = synth::daily_load_profile(
            spec.n_t(),
            steps,
            spec.dt,
            self.load.base,
            self.load.amplitude,
        );
        let forecast = synth::flat_forecast_profile(spec.n_f(), steps, self.wind_forecast);
        let schedule = day_ahead_schedule(&spec, &load, &forecast)?;

        let soc0 = match &self.soc0 {
            Some(soc) => {
                if soc.len() != spec.n_s() {
                    return Err(GridflexError::Config(format!(
                        "soc0 has {} entries but the grid has {} batteries",
                        soc.len(),
                        spec.n_s()
                    )));
                }
                soc.clone()
            }
            None => vec![0.5; spec.n_s()],
        };

        let scenario = Scenario {
            spec: Arc::new(spec),
            schedule,
            dtmc: Arc::new(dtmc),
            lambda: self.lambda,
            horizon: self.horizon_steps,
            control_steps: self.control_steps,
            violation_penalty: self.violation_penalty,
            soc0,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}
