use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{GridflexError, Result};
use crate::grid::{
    check_constraints, node_power_balance, solve_equilibrium_angles, ControlInput,
    DayAheadSchedule, Disturbance, GridSpec, GridState,
};
use crate::mdp::{build_tree, shift_horizon, solve, AugmentedState, DiscreteAction, NodeKind};
use crate::sim::metrics::integrate_abs_deviation;
use crate::wind::{sample_trajectory, WindDtmc};

/// Everything one receding-horizon experiment needs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: Arc<GridSpec>,
    /// Day-ahead plan; must cover `control_steps + horizon + 1` steps.
    pub schedule: DayAheadSchedule,
    pub dtmc: Arc<WindDtmc>,
    /// Discretization level per free control dimension.
    pub lambda: usize,
    /// Exploration horizon in control steps.
    pub horizon: usize,
    /// Number of receding-horizon iterations (288 for a 24-hour run at
    /// 5-minute resolution).
    pub control_steps: usize,
    /// Cost assigned to absorbing infeasible leaves.
    pub violation_penalty: f64,
    /// Initial battery state of charge.
    pub soc0: Vec<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.dtmc.validate()?;
        if self.horizon == 0 {
            return Err(GridflexError::Config("horizon must be at least one step".into()));
        }
        if self.lambda < 2 {
            return Err(GridflexError::Config("lambda must be at least 2".into()));
        }
        if self.schedule.len() < self.control_steps + self.horizon + 1 {
            return Err(GridflexError::Config(format!(
                "schedule covers {} steps but {} are needed (control steps + horizon + 1)",
                self.schedule.len(),
                self.control_steps + self.horizon + 1
            )));
        }
        if self.soc0.len() != self.spec.n_s() {
            return Err(GridflexError::Config("soc0 length mismatch".into()));
        }
        Ok(())
    }

    /// Initial continuous state: scheduled dispatch, configured SoC, and
    /// power-flow equilibrium angles with the initial wind error steadily
    /// compensated through the reserve balance.
    pub fn initial_state(&self, s_w0: usize) -> Result<GridState> {
        let spec = &self.spec;
        let mut state = GridState::flat(spec, self.schedule.p_gen[0].clone(), self.soc0.clone());
        let rep = self.dtmc.rep_value[s_w0];
        let mut u = ControlInput::zero(spec);
        if spec.n_s() > 0 {
            u.r_stor[spec.n_s() - 1] = rep;
        } else if spec.n_g() > 0 {
            u.r_gen[spec.n_g() - 1] = -rep;
        }
        let w = Disturbance::from_total(spec, rep);
        let pbar = node_power_balance(spec, &state, &u, &self.schedule.known[0], &w)?;
        state.delta = solve_equilibrium_angles(spec, &pbar)?;
        Ok(state)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRecord {
    /// Augmented state at decision time.
    pub aug: AugmentedState,
    pub action: DiscreteAction,
    pub realized_sw: usize,
    /// Immediate cost of the state at decision time.
    pub cost: f64,
    /// Wall time of the iteration's model update and solve (s).
    pub solve_time_s: f64,
    /// MDP size at this iteration.
    pub n_states: usize,
    pub n_actions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FailureKind {
    ConstraintViolation,
    ActionExhausted,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Failure {
    pub step: usize,
    pub kind: FailureKind,
    pub detail: String,
}

/// One receding-horizon trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    /// Signed sum of node frequency deviations at every visited state.
    pub sum_omega: Vec<f64>,
    /// Integral of the absolute total deviation (Hz*h).
    pub j_hz_h: f64,
    pub failure: Option<Failure>,
}

impl RunRecord {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn mean_solve_time_s(&self) -> f64 {
        if self.steps.is_empty() {
            return 0.0;
        }
        self.steps.iter().map(|s| s.solve_time_s).sum::<f64>() / self.steps.len() as f64
    }
}

/// Time integral of |sum of node deviations| over the recorded
/// trajectory, in Hz*h.
pub fn evaluate_j(record: &RunRecord, dt_control: f64) -> f64 {
    integrate_abs_deviation(&record.sum_omega, dt_control)
}

/// Runs one full receding-horizon trajectory: sample the wind chain,
/// build the initial tree, then iteratively solve, execute the root's
/// optimal action, realize the sampled wind successor, and shift the
/// horizon. Stops early on a constraint violation or action exhaustion,
/// marking the run failed.
pub fn run_once(scenario: &Scenario, seed: u64) -> Result<RunRecord> {
    scenario.validate()?;
    let spec = &scenario.spec;
    let dtmc = &scenario.dtmc;
    let dt = spec.dt;

    let s_w0 = dtmc.zero_state();
    let wind_path = sample_trajectory(dtmc, s_w0, scenario.control_steps, seed);
    let x0 = scenario.initial_state(s_w0)?;

    let mut record = RunRecord {
        seed,
        steps: Vec::with_capacity(scenario.control_steps),
        sum_omega: vec![x0.omega.iter().sum()],
        j_hz_h: 0.0,
        failure: None,
    };

    let build_start = Instant::now();
    let mut tree = match build_tree(
        Arc::clone(spec),
        x0,
        s_w0,
        &scenario.schedule.known[..=scenario.horizon],
        Arc::clone(dtmc),
        scenario.horizon,
        scenario.lambda,
    ) {
        Ok(tree) => tree,
        Err(GridflexError::ActionExhausted) => {
            record.failure = Some(Failure {
                step: 0,
                kind: FailureKind::ActionExhausted,
                detail: "no feasible action at the initial state".into(),
            });
            record.j_hz_h = evaluate_j(&record, dt);
            return Ok(record);
        }
        Err(e) => return Err(e),
    };
    let mut carry_time = build_start.elapsed().as_secs_f64();

    for i in 0..scenario.control_steps {
        let solve_start = Instant::now();
        let strategy = solve(&tree, scenario.violation_penalty);
        let solve_time_s = carry_time + solve_start.elapsed().as_secs_f64();

        let root = tree.root;
        let edge_idx = strategy
            .chosen_edge(root)
            .expect("root of a nonzero-horizon tree has actions");
        let executed = tree.nodes[root].edges[edge_idx].action.clone();
        let realized_sw = wind_path[i + 1];
        let &(child_id, _) = tree.nodes[root].edges[edge_idx]
            .children
            .iter()
            .find(|&&(c, _)| tree.nodes[c].aug.s_w == realized_sw)
            .expect("sampled wind successor has positive probability");

        record.steps.push(StepRecord {
            aug: tree.nodes[root].aug.clone(),
            action: executed.clone(),
            realized_sw,
            cost: tree.nodes[root].cost,
            solve_time_s,
            n_states: tree.n_states(),
            n_actions: tree.n_actions(),
        });

        let child = &tree.nodes[child_id];
        if child.kind != NodeKind::Feasible {
            // A node turns absorbing either by violating a constraint or
            // by having no feasible action left; tell the two apart from
            // the stored state.
            let violations = check_constraints(spec, &child.aug.state);
            record.failure = Some(if violations.is_empty() {
                Failure {
                    step: i + 1,
                    kind: FailureKind::ActionExhausted,
                    detail: "no feasible action from the realized successor".into(),
                }
            } else {
                Failure {
                    step: i + 1,
                    kind: FailureKind::ConstraintViolation,
                    detail: violations
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("; "),
                }
            });
            break;
        }
        record.sum_omega.push(child.aug.state.omega.iter().sum());

        if i + 1 == scenario.control_steps {
            break;
        }
        let shift_start = Instant::now();
        match shift_horizon(
            &tree,
            &executed,
            realized_sw,
            scenario.schedule.known[i + 1 + scenario.horizon].clone(),
        ) {
            Ok(next) => tree = next,
            Err(GridflexError::ActionExhausted) => {
                record.failure = Some(Failure {
                    step: i + 1,
                    kind: FailureKind::ActionExhausted,
                    detail: "no feasible action after executing the optimal action".into(),
                });
                break;
            }
            Err(e) => return Err(e),
        }
        carry_time = shift_start.elapsed().as_secs_f64();
    }

    record.j_hz_h = evaluate_j(&record, dt);
    Ok(record)
}
