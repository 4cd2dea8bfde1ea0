//! Shared oracle machinery for the integration tests: random abstract
//! trees with exhaustive strategy enumeration, an independent explicit
//! reference integrator, structural tree comparison, and scenario
//! loading.

#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::Path;
use std::sync::Arc;

use gridflex::config::ScenarioConfig;
use gridflex::grid::{
    node_power_balance, presets, step_dynamics, ControlInput, Disturbance, GridSpec, GridState,
    KnownInput,
};
use gridflex::mdp::{
    build_tree, shift_horizon, solve, ActionEdge, AugmentedState, DiscreteAction, MdpNode,
    MdpTree, NodeKind, Strategy,
};
use gridflex::sim::Scenario;
use gridflex::wind::WindDtmc;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn configs_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn load_scenario(name: &str) -> Scenario {
    let dir = configs_dir();
    ScenarioConfig::from_json_file(&dir.join(name))
        .unwrap()
        .build(&dir)
        .unwrap()
}

pub fn dummy_aug(layer: usize) -> AugmentedState {
    let spec = presets::one_node();
    AugmentedState {
        state: GridState::flat(&spec, vec![0.0], vec![0.5]),
        s_w: 0,
        layer,
    }
}

pub fn dummy_action(index: usize) -> DiscreteAction {
    let spec = presets::one_node();
    DiscreteAction {
        grid_index: vec![index],
        coords: vec![index as f64],
        input: ControlInput::zero(&spec),
    }
}

pub fn empty_tree(horizon: usize) -> MdpTree {
    let spec = Arc::new(presets::one_node());
    let inputs: VecDeque<KnownInput> = (0..=horizon).map(|_| KnownInput::zero(&spec)).collect();
    MdpTree {
        nodes: Vec::new(),
        root: 0,
        horizon,
        lambda: 2,
        goal_set: Vec::new(),
        start_step: 0,
        spec,
        dtmc: Arc::new(WindDtmc::zero_noise()),
        inputs,
    }
}

/// Random layered tree: every non-leaf feasible node carries 1..=3
/// actions with 1..=2 probabilistic successors each; a fraction of the
/// children become absorbing. Regenerates until the full strategy
/// product is small enough to enumerate.
pub fn random_tree(rng: &mut ChaCha8Rng) -> MdpTree {
    loop {
        let horizon = rng.gen_range(1..=3);
        let mut tree = empty_tree(horizon);
        tree.nodes.push(MdpNode {
            aug: dummy_aug(0),
            cost: rng.gen_range(0.0..10.0),
            kind: NodeKind::Feasible,
            edges: Vec::new(),
        });
        let mut frontier = vec![0usize];
        for layer in 1..=horizon {
            let mut next = Vec::new();
            for &id in &frontier {
                if tree.nodes[id].kind != NodeKind::Feasible {
                    continue;
                }
                let n_actions = rng.gen_range(1..=3);
                for a in 0..n_actions {
                    let n_succ = rng.gen_range(1..=2);
                    let mut probs: Vec<f64> =
                        (0..n_succ).map(|_| rng.gen_range(0.1..1.0)).collect();
                    let total: f64 = probs.iter().sum();
                    for p in &mut probs {
                        *p /= total;
                    }
                    let mut children = Vec::new();
                    for &p in &probs {
                        let child = tree.nodes.len();
                        let absorbing = rng.gen_bool(0.15);
                        tree.nodes.push(MdpNode {
                            aug: dummy_aug(layer),
                            cost: rng.gen_range(0.0..10.0),
                            kind: if absorbing {
                                NodeKind::AbsorbingInfeasible
                            } else {
                                NodeKind::Feasible
                            },
                            edges: Vec::new(),
                        });
                        children.push((child, p));
                        next.push(child);
                    }
                    tree.nodes[id].edges.push(ActionEdge {
                        action: dummy_action(a),
                        children,
                    });
                }
            }
            frontier = next;
        }
        let product: f64 = tree
            .nodes
            .iter()
            .filter(|n| !n.edges.is_empty())
            .map(|n| n.edges.len() as f64)
            .product();
        if tree.nodes.len() <= 200 && product <= 100_000.0 {
            tree.goal_set = tree
                .nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| n.aug.layer == horizon && n.kind == NodeKind::Feasible)
                .map(|(id, _)| id)
                .collect();
            return tree;
        }
    }
}

/// Expected cost of the root under a fixed full strategy assignment.
pub fn evaluate(tree: &MdpTree, choice: &[usize], node: usize, penalty: f64) -> f64 {
    let n = &tree.nodes[node];
    if n.kind == NodeKind::AbsorbingInfeasible {
        return penalty;
    }
    if n.edges.is_empty() {
        return n.cost;
    }
    let edge = &n.edges[choice[node]];
    n.cost
        + edge
            .children
            .iter()
            .map(|&(c, p)| p * evaluate(tree, choice, c, penalty))
            .sum::<f64>()
}

/// Exhaustive minimum over all memoryless strategies, returning the
/// optimal value and the lexicographically first optimal assignment
/// (first strict improvement wins, matching the solver's tie-break).
pub fn brute_force(tree: &MdpTree, penalty: f64) -> (f64, Vec<usize>) {
    let decision_nodes: Vec<usize> = (0..tree.nodes.len())
        .filter(|&id| !tree.nodes[id].edges.is_empty())
        .collect();
    let mut choice = vec![0usize; tree.nodes.len()];
    let mut best_value = f64::INFINITY;
    let mut best_choice = choice.clone();
    loop {
        let value = evaluate(tree, &choice, tree.root, penalty);
        if value < best_value {
            best_value = value;
            best_choice = choice.clone();
        }
        // Odometer over decision nodes, last node fastest, so earlier
        // assignments are lexicographically smaller.
        let mut pos = decision_nodes.len();
        loop {
            if pos == 0 {
                return (best_value, best_choice);
            }
            pos -= 1;
            let id = decision_nodes[pos];
            choice[id] += 1;
            if choice[id] < tree.nodes[id].edges.len() {
                break;
            }
            choice[id] = 0;
        }
    }
}

/// Nodes reachable from the root under a strategy.
pub fn reachable(tree: &MdpTree, choice: &dyn Fn(usize) -> Option<usize>) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![tree.root];
    while let Some(id) = stack.pop() {
        out.push(id);
        if tree.nodes[id].kind != NodeKind::Feasible {
            continue;
        }
        if let Some(e) = choice(id) {
            for &(c, _) in &tree.nodes[id].edges[e].children {
                stack.push(c);
            }
        }
    }
    out
}

/// Runs the solver against the enumeration oracle on one random tree.
/// Returns an error description on the first mismatch.
pub fn check_solver_against_enumeration(
    tree: &MdpTree,
    strategy: &Strategy,
    penalty: f64,
) -> Result<(), String> {
    let (oracle_value, oracle_choice) = brute_force(tree, penalty);
    let solver_value = strategy.root_value(tree);
    let scale = oracle_value.abs().max(1.0);
    if (solver_value - oracle_value).abs() > 1e-12 * scale {
        return Err(format!("solver value {solver_value} vs oracle {oracle_value}"));
    }
    for id in reachable(tree, &|id| strategy.chosen_edge(id)) {
        if !tree.nodes[id].edges.is_empty()
            && tree.nodes[id].kind == NodeKind::Feasible
            && strategy.chosen_edge(id) != Some(oracle_choice[id])
        {
            return Err(format!("argmin differs at node {id}"));
        }
    }
    Ok(())
}

/// Fourth-order Runge-Kutta on the continuous swing equations with
/// constant injections, written without reference to the production
/// stepping code.
pub fn rk4_reference(
    spec: &GridSpec,
    delta0: &[f64],
    omega0: &[f64],
    pbar: &[f64],
    t_end: f64,
    substeps: usize,
) -> (Vec<f64>, Vec<f64>) {
    let n_t = spec.n_t();
    let h = t_end / substeps as f64;
    let deriv = |delta: &[f64], omega: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut ddelta = vec![0.0; n_t];
        let mut domega = vec![0.0; n_t];
        for n in 0..n_t {
            ddelta[n] = omega[n];
            let flows: f64 = spec
                .neighbors(n)
                .map(|(p, b)| b * (delta[n] - delta[p]).sin())
                .sum();
            domega[n] = (pbar[n] - spec.damping[n] * omega[n] - flows) / spec.inertia[n];
        }
        (ddelta, domega)
    };
    let mut delta = delta0.to_vec();
    let mut omega = omega0.to_vec();
    for _ in 0..substeps {
        let (kd1, ko1) = deriv(&delta, &omega);
        let mid1_d: Vec<f64> = (0..n_t).map(|n| delta[n] + 0.5 * h * kd1[n]).collect();
        let mid1_o: Vec<f64> = (0..n_t).map(|n| omega[n] + 0.5 * h * ko1[n]).collect();
        let (kd2, ko2) = deriv(&mid1_d, &mid1_o);
        let mid2_d: Vec<f64> = (0..n_t).map(|n| delta[n] + 0.5 * h * kd2[n]).collect();
        let mid2_o: Vec<f64> = (0..n_t).map(|n| omega[n] + 0.5 * h * ko2[n]).collect();
        let (kd3, ko3) = deriv(&mid2_d, &mid2_o);
        let end_d: Vec<f64> = (0..n_t).map(|n| delta[n] + h * kd3[n]).collect();
        let end_o: Vec<f64> = (0..n_t).map(|n| omega[n] + h * ko3[n]).collect();
        let (kd4, ko4) = deriv(&end_d, &end_o);
        for n in 0..n_t {
            delta[n] += h / 6.0 * (kd1[n] + 2.0 * kd2[n] + 2.0 * kd3[n] + kd4[n]);
            omega[n] += h / 6.0 * (ko1[n] + 2.0 * ko2[n] + 2.0 * ko3[n] + ko4[n]);
        }
    }
    (delta, omega)
}

/// Integrates the production stepper over `steps` steps of `spec.dt`
/// with a constant injection and returns the largest frequency error
/// against the reference across the whole trajectory.
pub fn step_injection_error(spec: &GridSpec, wind_step_mw: f64, steps: usize) -> f64 {
    let u = ControlInput::zero(spec);
    let mut v = KnownInput::zero(spec);
    // Balanced baseline: generation covers load exactly at every node,
    // so the wind step is the only injection.
    v.p_load = vec![0.0; spec.n_t()];
    let w = Disturbance {
        dp_wind: vec![wind_step_mw; spec.n_f()],
    };

    let mut state = GridState::flat(spec, vec![0.0; spec.n_g()], vec![0.5; spec.n_s()]);
    let pbar = node_power_balance(spec, &state, &u, &v, &w).unwrap();

    let mut ref_delta = vec![0.0; spec.n_t()];
    let mut ref_omega = vec![0.0; spec.n_t()];
    let mut max_err: f64 = 0.0;
    for _ in 0..steps {
        state = step_dynamics(spec, &state, &u, &v, &w).unwrap();
        let (d, o) = rk4_reference(spec, &ref_delta, &ref_omega, &pbar, spec.dt, 200);
        ref_delta = d;
        ref_omega = o;
        for n in 0..spec.n_t() {
            max_err = max_err.max((state.omega[n] - ref_omega[n]).abs());
        }
    }
    max_err
}

fn states_eq(a: &GridState, b: &GridState) -> bool {
    a.k == b.k && a.delta == b.delta && a.omega == b.omega && a.p_gen == b.p_gen && a.soc == b.soc
}

/// Recursive structural comparison from the two roots; node numbering is
/// allowed to differ, payloads and child ordering are not.
pub fn trees_eq(a_tree: &MdpTree, b_tree: &MdpTree, a: usize, b: usize) -> Result<(), String> {
    let na = &a_tree.nodes[a];
    let nb = &b_tree.nodes[b];
    if !states_eq(&na.aug.state, &nb.aug.state)
        || na.aug.s_w != nb.aug.s_w
        || na.aug.layer != nb.aug.layer
        || na.cost != nb.cost
        || na.kind != nb.kind
        || na.edges.len() != nb.edges.len()
    {
        return Err(format!("payload mismatch at layer {}", na.aug.layer));
    }
    for (ea, eb) in na.edges.iter().zip(&nb.edges) {
        if ea.action.grid_index != eb.action.grid_index
            || ea.action.coords != eb.action.coords
            || ea.action.input.dp_gen != eb.action.input.dp_gen
            || ea.action.input.r_gen != eb.action.input.r_gen
            || ea.action.input.r_stor != eb.action.input.r_stor
            || ea.children.len() != eb.children.len()
        {
            return Err(format!("edge mismatch at layer {}", na.aug.layer));
        }
        for (&(ca, pa), &(cb, pb)) in ea.children.iter().zip(&eb.children) {
            if pa != pb {
                return Err(format!("probability mismatch at layer {}", na.aug.layer));
            }
            trees_eq(a_tree, b_tree, ca, cb)?;
        }
    }
    Ok(())
}

/// Walks one scenario forward `steps` control steps. At every step the
/// executed action is sampled uniformly from the root's feasible edges
/// (not just the optimal one) and the realized wind successor uniformly
/// from that edge's feasible children, then the shifted tree is checked
/// against a from-scratch rebuild. Returns how many comparisons ran.
pub fn check_shift_against_rebuild(
    scenario: &Scenario,
    seed: u64,
    steps: usize,
) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s_w0 = scenario.dtmc.zero_state();
    let x0 = scenario.initial_state(s_w0).unwrap();
    let mut tree = build_tree(
        Arc::clone(&scenario.spec),
        x0,
        s_w0,
        &scenario.schedule.known[..=scenario.horizon],
        Arc::clone(&scenario.dtmc),
        scenario.horizon,
        scenario.lambda,
    )
    .unwrap();

    let mut compared = 0;
    for i in 0..steps {
        // Keep the solver in the loop so the walk exercises realistic
        // (near-policy) regions half of the time.
        let root = tree.root;
        let edge_idx = if rng.gen_bool(0.5) {
            solve(&tree, scenario.violation_penalty)
                .chosen_edge(root)
                .unwrap()
        } else {
            rng.gen_range(0..tree.nodes[root].edges.len())
        };
        let edge = &tree.nodes[root].edges[edge_idx];
        let feasible: Vec<usize> = edge
            .children
            .iter()
            .filter(|&&(c, _)| tree.nodes[c].kind == NodeKind::Feasible)
            .map(|&(c, _)| c)
            .collect();
        if feasible.is_empty() {
            break;
        }
        let child = feasible[rng.gen_range(0..feasible.len())];
        let executed = edge.action.clone();
        let realized_sw = tree.nodes[child].aug.s_w;

        let shifted = shift_horizon(
            &tree,
            &executed,
            realized_sw,
            scenario.schedule.known[i + 1 + scenario.horizon].clone(),
        )
        .map_err(|e| e.to_string())?;
        let fresh = build_tree(
            Arc::clone(&scenario.spec),
            tree.nodes[child].aug.state.clone(),
            realized_sw,
            &scenario.schedule.known[i + 1..=i + 1 + scenario.horizon],
            Arc::clone(&scenario.dtmc),
            scenario.horizon,
            scenario.lambda,
        )
        .map_err(|e| e.to_string())?;

        if shifted.nodes.len() != fresh.nodes.len() {
            return Err(format!(
                "step {i}: {} nodes shifted vs {} rebuilt",
                shifted.nodes.len(),
                fresh.nodes.len()
            ));
        }
        if shifted.start_step != fresh.start_step {
            return Err(format!("step {i}: start step mismatch"));
        }
        if shifted.goal_set.len() != fresh.goal_set.len() {
            return Err(format!("step {i}: goal set size mismatch"));
        }
        trees_eq(&shifted, &fresh, shifted.root, fresh.root)
            .map_err(|e| format!("step {i}: {e}"))?;
        compared += 1;
        tree = shifted;
    }
    Ok(compared)
}
