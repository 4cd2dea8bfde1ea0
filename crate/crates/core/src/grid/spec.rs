use serde::{Deserialize, Serialize};

use crate::error::{GridflexError, Result};

/// A transmission line between two nodes.
///
/// The angle-difference coupling coefficient `susceptance` (MW) and the
/// maximum absolute flow `capacity` (MW) apply symmetrically in both
/// directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    /// Coupling coefficient b_{n,p} (MW).
    pub susceptance: f64,
    /// Maximum |flow| (MW).
    pub capacity: f64,
}

fn default_freq_limit() -> f64 {
    0.1
}

fn default_efficiency() -> f64 {
    1.0
}

/// Static topology and asset parameters of the grid.
///
/// Node counts are implied by the vector lengths: `inertia.len()` nodes,
/// `gen_node.len()` generators, `farm_node.len()` wind farms and
/// `battery_node.len()` batteries. Loads are per-node quantities supplied
/// at run time, so they carry no placement here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Per-node inertia m_n (MW*s^2/rad).
    pub inertia: Vec<f64>,
    /// Per-node damping d_n (MW*s/rad).
    pub damping: Vec<f64>,
    pub lines: Vec<Line>,

    /// Node index of each generator.
    pub gen_node: Vec<usize>,
    /// Per-generator [min, max] output (MW).
    pub gen_capacity: Vec<[f64; 2]>,
    /// Per-generator max |dP/dt| (MW/s).
    pub gen_ramp: Vec<f64>,
    /// Per-generator scheduled (down-spinning, up-spinning) reserves (MW), both >= 0.
    pub reserve_sched: Vec<[f64; 2]>,

    /// Node index of each wind farm.
    pub farm_node: Vec<usize>,

    /// Node index of each battery.
    pub battery_node: Vec<usize>,
    /// Per-battery energy capacity (MWh).
    pub battery_capacity: Vec<f64>,
    /// Per-battery max |charge/discharge power| (MW).
    pub battery_rate: Vec<f64>,
    /// Per-battery scheduled (decreased-demand, increased-demand) flexibility (MW), both >= 0.
    pub flex_sched: Vec<[f64; 2]>,

    /// Maximum |frequency deviation| (Hz).
    #[serde(default = "default_freq_limit")]
    pub freq_limit: f64,
    /// Discretization step (s).
    pub dt: f64,
    /// Battery charge/discharge efficiency factor.
    #[serde(default = "default_efficiency")]
    pub battery_efficiency: f64,
}

impl GridSpec {
    pub fn n_t(&self) -> usize {
        self.inertia.len()
    }

    pub fn n_g(&self) -> usize {
        self.gen_node.len()
    }

    pub fn n_f(&self) -> usize {
        self.farm_node.len()
    }

    pub fn n_s(&self) -> usize {
        self.battery_node.len()
    }

    /// Lines incident to node `n`, as (other endpoint, susceptance).
    pub fn neighbors(&self, n: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.lines.iter().filter_map(move |l| {
            if l.from == n {
                Some((l.to, l.susceptance))
            } else if l.to == n {
                Some((l.from, l.susceptance))
            } else {
                None
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        let n_t = self.n_t();
        let err = |m: String| Err(GridflexError::InvalidSpec(m));

        if n_t == 0 {
            return err("grid must have at least one node".into());
        }
        if self.damping.len() != n_t {
            return err(format!(
                "damping has {} entries for {} nodes",
                self.damping.len(),
                n_t
            ));
        }
        for (name, v) in [("inertia", &self.inertia), ("damping", &self.damping)] {
            if v.iter().any(|&x| !(x > 0.0)) {
                return err(format!("{name} entries must be strictly positive"));
            }
        }
        for l in &self.lines {
            if l.from >= n_t || l.to >= n_t || l.from == l.to {
                return err(format!("line {}-{} has invalid endpoints", l.from, l.to));
            }
            if !(l.susceptance > 0.0) || !(l.capacity > 0.0) {
                return err(format!(
                    "line {}-{} needs positive susceptance and capacity",
                    l.from, l.to
                ));
            }
        }
        // Duplicate lines would double-count the coupling.
        for (i, a) in self.lines.iter().enumerate() {
            for b in &self.lines[i + 1..] {
                let same = (a.from == b.from && a.to == b.to) || (a.from == b.to && a.to == b.from);
                if same {
                    return err(format!("duplicate line between {} and {}", a.from, a.to));
                }
            }
        }
        if n_t > 1 && !self.is_connected() {
            return err("grid graph is not connected".into());
        }

        let n_g = self.n_g();
        if self.gen_capacity.len() != n_g
            || self.gen_ramp.len() != n_g
            || self.reserve_sched.len() != n_g
        {
            return err("generator parameter vectors have inconsistent lengths".into());
        }
        for (i, &node) in self.gen_node.iter().enumerate() {
            if node >= n_t {
                return err(format!("generator {i} placed at unknown node {node}"));
            }
            let [lo, hi] = self.gen_capacity[i];
            if !(hi > lo) {
                return err(format!("generator {i} capacity range is empty"));
            }
            if !(self.gen_ramp[i] > 0.0) {
                return err(format!("generator {i} ramp must be strictly positive"));
            }
            let [ds, us] = self.reserve_sched[i];
            if ds < 0.0 || us < 0.0 {
                return err(format!("generator {i} scheduled reserves must be >= 0"));
            }
        }

        for (i, &node) in self.farm_node.iter().enumerate() {
            if node >= n_t {
                return err(format!("wind farm {i} placed at unknown node {node}"));
            }
        }

        let n_s = self.n_s();
        if self.battery_capacity.len() != n_s
            || self.battery_rate.len() != n_s
            || self.flex_sched.len() != n_s
        {
            return err("battery parameter vectors have inconsistent lengths".into());
        }
        for (i, &node) in self.battery_node.iter().enumerate() {
            if node >= n_t {
                return err(format!("battery {i} placed at unknown node {node}"));
            }
            if !(self.battery_capacity[i] > 0.0) || !(self.battery_rate[i] > 0.0) {
                return err(format!("battery {i} capacity and rate must be strictly positive"));
            }
            let [dd, id] = self.flex_sched[i];
            if dd < 0.0 || id < 0.0 {
                return err(format!("battery {i} scheduled flexibility must be >= 0"));
            }
        }

        if !(self.freq_limit > 0.0) {
            return err("freq_limit must be strictly positive".into());
        }
        if !(self.dt > 0.0) {
            return err("dt must be strictly positive".into());
        }
        if !(self.battery_efficiency > 0.0 && self.battery_efficiency <= 1.0) {
            return err("battery_efficiency must be in (0, 1]".into());
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let n_t = self.n_t();
        let mut seen = vec![false; n_t];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(n) = stack.pop() {
            for (p, _) in self.neighbors(n) {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let spec: GridSpec = serde_json::from_str(&text)?;
        spec.validate()?;
        Ok(spec)
    }
}
