use serde::{Deserialize, Serialize};

use crate::error::{GridflexError, Result};
use crate::grid::{
    check_constraints, step_dynamics, ControlInput, Disturbance, GridSpec, GridState, KnownInput,
};
use crate::wind::{successors, WindDtmc};

/// Continuous grid state paired with the wind DTMC state and the depth
/// within the exploration horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedState {
    pub state: GridState,
    pub s_w: usize,
    pub layer: usize,
}

/// One grid point of the discretized control space.
///
/// The two balance equalities leave `2 n_g + n_s - 2` independent
/// dimensions; `coords` holds the free values and `input` the
/// reconstructed full control vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteAction {
    /// Grid-point index per free dimension.
    pub grid_index: Vec<usize>,
    /// Free-dimension control values.
    pub coords: Vec<f64>,
    pub input: ControlInput,
}

/// Identity of one free control dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeDim {
    /// Dispatch change of generator i (all but the last generator).
    DpGen(usize),
    /// Reserve deployment of generator i.
    RGen(usize),
    /// Flexibility deployment of battery s (all but the last battery).
    RStor(usize),
}

/// The free control dimensions after eliminating the dependent variables:
/// the last generator's dispatch change (total-dispatch balance) and the
/// last battery's flexibility (reserve balance), or the last generator's
/// reserve when there is no battery.
pub fn free_dims(spec: &GridSpec) -> Vec<FreeDim> {
    let n_g = spec.n_g();
    let n_s = spec.n_s();
    let mut dims = Vec::new();
    for i in 0..n_g.saturating_sub(1) {
        dims.push(FreeDim::DpGen(i));
    }
    let free_gens = if n_s == 0 { n_g.saturating_sub(1) } else { n_g };
    for i in 0..free_gens {
        dims.push(FreeDim::RGen(i));
    }
    for s in 0..n_s.saturating_sub(1) {
        dims.push(FreeDim::RStor(s));
    }
    dims
}

fn dp_gen_box(spec: &GridSpec, state: &GridState, i: usize) -> (f64, f64) {
    let ramp = spec.gen_ramp[i];
    let [cap_lo, cap_hi] = spec.gen_capacity[i];
    let lo = (-ramp).max((cap_lo - state.p_gen[i]) / spec.dt);
    let hi = ramp.min((cap_hi - state.p_gen[i]) / spec.dt);
    (lo, hi)
}

fn r_gen_box(spec: &GridSpec, i: usize) -> (f64, f64) {
    let [ds, us] = spec.reserve_sched[i];
    (-ds, us)
}

fn r_stor_box(spec: &GridSpec, v: &KnownInput, s: usize) -> (f64, f64) {
    let [dd, id] = spec.flex_sched[s];
    let rate = spec.battery_rate[s];
    let lo = (-dd).max(-rate - v.p_stor[s]);
    let hi = id.min(rate - v.p_stor[s]);
    (lo, hi)
}

fn contains(lo: f64, hi: f64, x: f64) -> bool {
    // Grid points sit exactly on box endpoints; tolerate rounding there.
    let eps = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    x >= lo - eps && x <= hi + eps
}

/// Total demand minus total wind forecast.
fn residual_demand(v: &KnownInput) -> f64 {
    v.p_load.iter().sum::<f64>() - v.p_wind_fc.iter().sum::<f64>()
}

/// Lays the uniform grid over the free-dimension boxes and reconstructs
/// the dependent variables; candidates whose dependent variable falls
/// outside its own box are dropped. No successor simulation happens here.
pub fn candidate_actions(
    spec: &GridSpec,
    aug: &AugmentedState,
    v_now: &KnownInput,
    v_next: &KnownInput,
    dtmc: &WindDtmc,
    lambda: usize,
) -> Result<Vec<DiscreteAction>> {
    if lambda < 2 {
        return Err(GridflexError::Argument("lambda must be at least 2".into()));
    }
    let n_g = spec.n_g();
    let n_s = spec.n_s();
    if n_g == 0 {
        return Err(GridflexError::InvalidSpec(
            "control discretization requires at least one generator".into(),
        ));
    }
    let dims = free_dims(spec);
    let rep_err = dtmc.rep_value[aug.s_w];
    // Dispatch must track the change in residual demand (total-dispatch
    // balance in derivative form).
    let total_dp = (residual_demand(v_next) - residual_demand(v_now)) / spec.dt;

    let boxes: Vec<(f64, f64)> = dims
        .iter()
        .map(|d| match *d {
            FreeDim::DpGen(i) => dp_gen_box(spec, &aug.state, i),
            FreeDim::RGen(i) => r_gen_box(spec, i),
            FreeDim::RStor(s) => r_stor_box(spec, v_next, s),
        })
        .collect();
    if boxes.iter().any(|&(lo, hi)| lo > hi) {
        return Ok(Vec::new());
    }

    let mut actions = Vec::new();
    let mut index = vec![0usize; dims.len()];
    loop {
        let coords: Vec<f64> = index
            .iter()
            .zip(&boxes)
            .map(|(&idx, &(lo, hi))| lo + idx as f64 * (hi - lo) / (lambda - 1) as f64)
            .collect();

        let mut u = ControlInput::zero(spec);
        for (dim, &value) in dims.iter().zip(&coords) {
            match *dim {
                FreeDim::DpGen(i) => u.dp_gen[i] = value,
                FreeDim::RGen(i) => u.r_gen[i] = value,
                FreeDim::RStor(s) => u.r_stor[s] = value,
            }
        }
        // Dependent dispatch change of the last generator.
        u.dp_gen[n_g - 1] = total_dp - u.dp_gen[..n_g - 1].iter().sum::<f64>();
        let mut ok = {
            let (lo, hi) = dp_gen_box(spec, &aug.state, n_g - 1);
            contains(lo, hi, u.dp_gen[n_g - 1])
        };
        // Dependent reserve-balance variable.
        if ok {
            if n_s > 0 {
                let r = u.r_gen.iter().sum::<f64>() + rep_err
                    - u.r_stor[..n_s - 1].iter().sum::<f64>();
                u.r_stor[n_s - 1] = r;
                let (lo, hi) = r_stor_box(spec, v_next, n_s - 1);
                ok = contains(lo, hi, r);
            } else {
                let r = -rep_err - u.r_gen[..n_g - 1].iter().sum::<f64>();
                u.r_gen[n_g - 1] = r;
                let (lo, hi) = r_gen_box(spec, n_g - 1);
                ok = contains(lo, hi, r);
            }
        }
        if ok {
            actions.push(DiscreteAction {
                grid_index: index.clone(),
                coords,
                input: u,
            });
        }

        // Advance the multi-index; empty-dimension grids yield a single
        // fully-dependent candidate.
        if dims.is_empty() {
            break;
        }
        let mut pos = dims.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < lambda {
                break;
            }
            index[pos] = 0;
        }
        if index.iter().all(|&i| i == 0) {
            break;
        }
    }
    Ok(actions)
}

/// One wind-successor outcome of applying an action.
#[derive(Debug, Clone)]
pub struct SuccessorOutcome {
    pub s_w: usize,
    pub probability: f64,
    pub state: GridState,
    pub feasible: bool,
}

/// An action that survived a-priori elimination, with its successor
/// states.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub action: DiscreteAction,
    pub successors: Vec<SuccessorOutcome>,
}

/// Discretizes the feasible control box and eliminates a priori every
/// action whose successors all violate the hard constraints. Actions with
/// mixed outcomes are kept; their violating successors become absorbing
/// leaves in the tree.
pub fn expand_actions(
    spec: &GridSpec,
    aug: &AugmentedState,
    v_now: &KnownInput,
    v_next: &KnownInput,
    dtmc: &WindDtmc,
    lambda: usize,
) -> Result<Vec<Expansion>> {
    let candidates = candidate_actions(spec, aug, v_now, v_next, dtmc, lambda)?;
    let wind_next = successors(dtmc, aug.s_w);
    let mut expansions = Vec::with_capacity(candidates.len());
    for action in candidates {
        let mut outcomes = Vec::with_capacity(wind_next.len());
        let mut any_feasible = false;
        for &(s_w, probability) in &wind_next {
            let w = Disturbance::from_total(spec, dtmc.rep_value[s_w]);
            let outcome = match step_dynamics(spec, &aug.state, &action.input, v_next, &w) {
                Ok(state) => {
                    let feasible = check_constraints(spec, &state).is_empty();
                    SuccessorOutcome {
                        s_w,
                        probability,
                        state,
                        feasible,
                    }
                }
                Err(GridflexError::NewtonDiverged { .. }) => {
                    // A non-convergent implicit step marks the successor
                    // as unusable rather than aborting the expansion.
                    let mut state = aug.state.clone();
                    state.k += 1;
                    SuccessorOutcome {
                        s_w,
                        probability,
                        state,
                        feasible: false,
                    }
                }
                Err(e) => return Err(e),
            };
            any_feasible |= outcome.feasible;
            outcomes.push(outcome);
        }
        if any_feasible {
            expansions.push(Expansion {
                action,
                successors: outcomes,
            });
        }
    }
    Ok(expansions)
}

/// The set of feasible discrete actions at an augmented state. Empty
/// feasible sets are reported as exhaustion so the caller can record a
/// failed run.
pub fn feasible_actions(
    spec: &GridSpec,
    aug: &AugmentedState,
    v_now: &KnownInput,
    v_next: &KnownInput,
    dtmc: &WindDtmc,
    lambda: usize,
) -> Result<Vec<DiscreteAction>> {
    let expansions = expand_actions(spec, aug, v_now, v_next, dtmc, lambda)?;
    if expansions.is_empty() {
        return Err(GridflexError::ActionExhausted);
    }
    Ok(expansions.into_iter().map(|e| e.action).collect())
}
