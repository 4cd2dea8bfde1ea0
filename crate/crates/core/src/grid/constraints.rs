use serde::{Deserialize, Serialize};

use crate::grid::{GridSpec, GridState};

/// One violated operational constraint, with the offending value and limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    Frequency { node: usize, value: f64, limit: f64 },
    LineFlow { line: usize, flow: f64, capacity: f64 },
    GenCapacity { gen: usize, value: f64, min: f64, max: f64 },
    StateOfCharge { battery: usize, value: f64 },
}

impl Violation {
    /// How far past the limit the value is (always >= 0 for a violation).
    pub fn margin(&self) -> f64 {
        match *self {
            Violation::Frequency { value, limit, .. } => value.abs() - limit,
            Violation::LineFlow { flow, capacity, .. } => flow.abs() - capacity,
            Violation::GenCapacity { value, min, max, .. } => (min - value).max(value - max),
            Violation::StateOfCharge { value, .. } => (-value).max(value - 1.0),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Frequency { node, value, limit } => {
                write!(f, "frequency at node {node}: |{value:.4}| > {limit}")
            }
            Violation::LineFlow { line, flow, capacity } => {
                write!(f, "flow on line {line}: |{flow:.4}| > {capacity}")
            }
            Violation::GenCapacity { gen, value, min, max } => {
                write!(f, "generator {gen} output {value:.4} outside [{min}, {max}]")
            }
            Violation::StateOfCharge { battery, value } => {
                write!(f, "battery {battery} SoC {value:.4} outside [0, 1]")
            }
        }
    }
}

/// Evaluates every hard operational constraint on a state. An empty list
/// means the state is feasible.
pub fn check_constraints(spec: &GridSpec, state: &GridState) -> Vec<Violation> {
    let mut violations = Vec::new();
    for (node, &w) in state.omega.iter().enumerate() {
        if w.abs() > spec.freq_limit {
            violations.push(Violation::Frequency {
                node,
                value: w,
                limit: spec.freq_limit,
            });
        }
    }
    for (line, l) in spec.lines.iter().enumerate() {
        let flow = l.susceptance * (state.delta[l.from] - state.delta[l.to]).sin();
        if flow.abs() > l.capacity {
            violations.push(Violation::LineFlow {
                line,
                flow,
                capacity: l.capacity,
            });
        }
    }
    for (gen, &p) in state.p_gen.iter().enumerate() {
        let [min, max] = spec.gen_capacity[gen];
        if p < min || p > max {
            violations.push(Violation::GenCapacity {
                gen,
                value: p,
                min,
                max,
            });
        }
    }
    for (battery, &q) in state.soc.iter().enumerate() {
        if !(0.0..=1.0).contains(&q) {
            violations.push(Violation::StateOfCharge { battery, value: q });
        }
    }
    violations
}

pub fn is_feasible(spec: &GridSpec, state: &GridState) -> bool {
    check_constraints(spec, state).is_empty()
}
