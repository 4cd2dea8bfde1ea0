use serde::{Deserialize, Serialize};

use crate::error::{GridflexError, Result};
use crate::grid::GridSpec;

/// Continuous state vector of the grid at one discrete time index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridState {
    /// Per-node voltage angle (rad).
    pub delta: Vec<f64>,
    /// Per-node frequency deviation (Hz).
    pub omega: Vec<f64>,
    /// Per-generator output (MW).
    pub p_gen: Vec<f64>,
    /// Per-battery state of charge, fraction of capacity.
    pub soc: Vec<f64>,
    /// Discrete time index.
    pub k: usize,
}

impl GridState {
    /// Flat-start state: zero angles and frequencies at time 0.
    pub fn flat(spec: &GridSpec, p_gen: Vec<f64>, soc: Vec<f64>) -> Self {
        GridState {
            delta: vec![0.0; spec.n_t()],
            omega: vec![0.0; spec.n_t()],
            p_gen,
            soc,
            k: 0,
        }
    }

    pub fn check_dims(&self, spec: &GridSpec) -> Result<()> {
        if self.delta.len() != spec.n_t()
            || self.omega.len() != spec.n_t()
            || self.p_gen.len() != spec.n_g()
            || self.soc.len() != spec.n_s()
        {
            return Err(GridflexError::Dimension(format!(
                "state ({}, {}, {}, {}) does not match grid ({}, {}, {}, {})",
                self.delta.len(),
                self.omega.len(),
                self.p_gen.len(),
                self.soc.len(),
                spec.n_t(),
                spec.n_t(),
                spec.n_g(),
                spec.n_s()
            )));
        }
        Ok(())
    }
}

/// Control variables applied over one step: dispatch change, reserve
/// deployment, and storage flexibility deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlInput {
    /// Per-generator dispatch change (MW/s).
    pub dp_gen: Vec<f64>,
    /// Per-generator reserve deployment (MW).
    pub r_gen: Vec<f64>,
    /// Per-battery flexibility deployment (MW).
    pub r_stor: Vec<f64>,
}

impl ControlInput {
    pub fn zero(spec: &GridSpec) -> Self {
        ControlInput {
            dp_gen: vec![0.0; spec.n_g()],
            r_gen: vec![0.0; spec.n_g()],
            r_stor: vec![0.0; spec.n_s()],
        }
    }

    pub fn check_dims(&self, spec: &GridSpec) -> Result<()> {
        if self.dp_gen.len() != spec.n_g()
            || self.r_gen.len() != spec.n_g()
            || self.r_stor.len() != spec.n_s()
        {
            return Err(GridflexError::Dimension(
                "control input lengths do not match grid asset counts".into(),
            ));
        }
        Ok(())
    }
}

/// Uncontrollable known inputs at one time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownInput {
    /// Per-node demand (MW).
    pub p_load: Vec<f64>,
    /// Per-farm wind power forecast (MW).
    pub p_wind_fc: Vec<f64>,
    /// Per-battery day-ahead storage power (MW).
    pub p_stor: Vec<f64>,
}

impl KnownInput {
    pub fn zero(spec: &GridSpec) -> Self {
        KnownInput {
            p_load: vec![0.0; spec.n_t()],
            p_wind_fc: vec![0.0; spec.n_f()],
            p_stor: vec![0.0; spec.n_s()],
        }
    }

    pub fn check_dims(&self, spec: &GridSpec) -> Result<()> {
        if self.p_load.len() != spec.n_t()
            || self.p_wind_fc.len() != spec.n_f()
            || self.p_stor.len() != spec.n_s()
        {
            return Err(GridflexError::Dimension(
                "known input lengths do not match grid counts".into(),
            ));
        }
        Ok(())
    }
}

/// Uncontrollable random input: per-farm wind forecast error (MW).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disturbance {
    pub dp_wind: Vec<f64>,
}

impl Disturbance {
    pub fn zero(spec: &GridSpec) -> Self {
        Disturbance {
            dp_wind: vec![0.0; spec.n_f()],
        }
    }

    /// Splits a total forecast error evenly over the farms.
    pub fn from_total(spec: &GridSpec, total: f64) -> Self {
        let n_f = spec.n_f();
        Disturbance {
            dp_wind: vec![total / n_f.max(1) as f64; n_f],
        }
    }

    pub fn check_dims(&self, spec: &GridSpec) -> Result<()> {
        if self.dp_wind.len() != spec.n_f() {
            return Err(GridflexError::Dimension(
                "disturbance length does not match wind farm count".into(),
            ));
        }
        Ok(())
    }
}
