use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{GridflexError, Result};
use crate::grid::{is_feasible, step_dynamics, Disturbance, GridSpec, GridState, KnownInput};
use crate::mdp::action::{expand_actions, AugmentedState, DiscreteAction, Expansion};
use crate::wind::WindDtmc;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Feasible,
    /// Constraint-violating or action-exhausted: absorbing, excluded from
    /// the goal set.
    AbsorbingInfeasible,
}

#[derive(Debug, Clone)]
pub struct ActionEdge {
    pub action: DiscreteAction,
    /// Children with the wind-transition probability; probabilities sum
    /// to 1 over the edge.
    pub children: Vec<(NodeId, f64)>,
}

#[derive(Debug, Clone)]
pub struct MdpNode {
    pub aug: AugmentedState,
    /// Immediate cost: sum of |frequency deviation| over the nodes.
    pub cost: f64,
    pub kind: NodeKind,
    pub edges: Vec<ActionEdge>,
}

/// Layered tree-structured MDP over augmented states.
///
/// The tree owns the context needed to extend itself when the horizon
/// shifts: the grid, the wind chain, and the known-input window covering
/// `start_step .. start_step + horizon` inclusive.
#[derive(Debug, Clone)]
pub struct MdpTree {
    pub nodes: Vec<MdpNode>,
    pub root: NodeId,
    /// Exploration horizon K_h in control steps.
    pub horizon: usize,
    /// Discretization level per free control dimension.
    pub lambda: usize,
    pub goal_set: Vec<NodeId>,
    /// Absolute control step of the root.
    pub start_step: usize,
    pub spec: Arc<GridSpec>,
    pub dtmc: Arc<WindDtmc>,
    /// Known inputs for steps start_step ..= start_step + horizon.
    pub inputs: VecDeque<KnownInput>,
}

pub fn state_cost(state: &GridState) -> f64 {
    state.omega.iter().map(|w| w.abs()).sum()
}

impl MdpTree {
    pub fn n_states(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_actions(&self) -> usize {
        self.nodes.iter().map(|n| n.edges.len()).sum()
    }

    fn input_at(&self, layer: usize) -> &KnownInput {
        &self.inputs[layer]
    }

    /// Expands one feasible node in place, appending child nodes; returns
    /// the ids of the freshly created children.
    fn expand_node(&mut self, id: NodeId) -> Result<Vec<NodeId>> {
        let layer = self.nodes[id].aug.layer;
        let expansions: Vec<Expansion> = expand_actions(
            &self.spec,
            &self.nodes[id].aug,
            self.input_at(layer),
            self.input_at(layer + 1),
            &self.dtmc,
            self.lambda,
        )?;
        if expansions.is_empty() {
            self.nodes[id].kind = NodeKind::AbsorbingInfeasible;
            return Ok(Vec::new());
        }
        let mut created = Vec::new();
        for expansion in expansions {
            let mut children = Vec::with_capacity(expansion.successors.len());
            for outcome in expansion.successors {
                let child_id = self.nodes.len();
                self.nodes.push(MdpNode {
                    aug: AugmentedState {
                        state: outcome.state,
                        s_w: outcome.s_w,
                        layer: layer + 1,
                    },
                    cost: 0.0,
                    kind: if outcome.feasible {
                        NodeKind::Feasible
                    } else {
                        NodeKind::AbsorbingInfeasible
                    },
                    edges: Vec::new(),
                });
                self.nodes[child_id].cost = state_cost(&self.nodes[child_id].aug.state);
                children.push((child_id, outcome.probability));
                created.push(child_id);
            }
            self.nodes[id].edges.push(ActionEdge {
                action: expansion.action,
                children,
            });
        }
        Ok(created)
    }

    fn rebuild_goal_set(&mut self) {
        self.goal_set = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.aug.layer == self.horizon && n.kind == NodeKind::Feasible)
            .map(|(id, _)| id)
            .collect();
    }
}

/// Recursively explores the reachable state space from the measured
/// initial state up to the exploration horizon.
pub fn build_tree(
    spec: Arc<GridSpec>,
    x0: GridState,
    s_w0: usize,
    inputs: &[KnownInput],
    dtmc: Arc<WindDtmc>,
    horizon: usize,
    lambda: usize,
) -> Result<MdpTree> {
    if inputs.len() < horizon + 1 {
        return Err(GridflexError::Argument(format!(
            "need {} known inputs to cover the horizon, got {}",
            horizon + 1,
            inputs.len()
        )));
    }
    if !is_feasible(&spec, &x0) {
        return Err(GridflexError::Argument(
            "initial state violates the hard constraints".into(),
        ));
    }
    if s_w0 >= dtmc.n_states() {
        return Err(GridflexError::Argument("wind state out of range".into()));
    }
    let start_step = x0.k;
    let root_cost = state_cost(&x0);
    let mut tree = MdpTree {
        nodes: vec![MdpNode {
            aug: AugmentedState {
                state: x0,
                s_w: s_w0,
                layer: 0,
            },
            cost: root_cost,
            kind: NodeKind::Feasible,
            edges: Vec::new(),
        }],
        root: 0,
        horizon,
        lambda,
        goal_set: Vec::new(),
        start_step,
        spec,
        dtmc,
        inputs: inputs[..horizon + 1].iter().cloned().collect(),
    };

    let mut frontier = vec![tree.root];
    for _ in 0..horizon {
        let mut next_frontier = Vec::new();
        for id in frontier {
            if tree.nodes[id].kind != NodeKind::Feasible {
                continue;
            }
            let children = tree.expand_node(id)?;
            next_frontier.extend(children);
        }
        frontier = next_frontier;
    }
    if horizon > 0 && tree.nodes[tree.root].edges.is_empty() {
        return Err(GridflexError::ActionExhausted);
    }
    tree.rebuild_goal_set();
    Ok(tree)
}

/// Shifts the exploration horizon one step forward: the subtree under the
/// executed action's realized wind successor becomes the new tree, the
/// pruned remainder is discarded, and one fresh layer is appended at the
/// far end. Node payloads inside the retained subtree are untouched.
pub fn shift_horizon(
    tree: &MdpTree,
    executed: &DiscreteAction,
    realized_sw: usize,
    v_new_layer: KnownInput,
) -> Result<MdpTree> {
    if tree.horizon == 0 {
        // Degenerate horizon: no stored actions; step the single state
        // directly.
        let w = Disturbance::from_total(&tree.spec, tree.dtmc.rep_value[realized_sw]);
        let state = step_dynamics(
            &tree.spec,
            &tree.nodes[tree.root].aug.state,
            &executed.input,
            &v_new_layer,
            &w,
        )?;
        let mut inputs = tree.inputs.clone();
        inputs.pop_front();
        inputs.push_back(v_new_layer);
        return build_tree(
            Arc::clone(&tree.spec),
            state,
            realized_sw,
            inputs.make_contiguous(),
            Arc::clone(&tree.dtmc),
            0,
            tree.lambda,
        );
    }

    let root = &tree.nodes[tree.root];
    let edge = root
        .edges
        .iter()
        .find(|e| e.action.grid_index == executed.grid_index)
        .ok_or_else(|| {
            GridflexError::Protocol("executed action is not an action of the root".into())
        })?;
    let &(new_root_old_id, _) = edge
        .children
        .iter()
        .find(|&&(child, _)| tree.nodes[child].aug.s_w == realized_sw)
        .ok_or_else(|| {
            GridflexError::Protocol(format!(
                "wind state {realized_sw} is not a successor of the executed action"
            ))
        })?;
    if tree.nodes[new_root_old_id].kind != NodeKind::Feasible {
        return Err(GridflexError::Protocol(
            "realized successor is an absorbing infeasible state".into(),
        ));
    }

    // Copy the retained subtree in depth-first order, dropping one layer.
    let mut inputs = tree.inputs.clone();
    inputs.pop_front();
    inputs.push_back(v_new_layer);
    let mut new_tree = MdpTree {
        nodes: Vec::new(),
        root: 0,
        horizon: tree.horizon,
        lambda: tree.lambda,
        goal_set: Vec::new(),
        start_step: tree.start_step + 1,
        spec: Arc::clone(&tree.spec),
        dtmc: Arc::clone(&tree.dtmc),
        inputs,
    };
    let mut stack = vec![(new_root_old_id, usize::MAX, usize::MAX, 0.0)];
    while let Some((old_id, parent, edge_idx, probability)) = stack.pop() {
        let old = &tree.nodes[old_id];
        let new_id = new_tree.nodes.len();
        let mut aug = old.aug.clone();
        aug.layer -= 1;
        new_tree.nodes.push(MdpNode {
            aug,
            cost: old.cost,
            kind: old.kind,
            edges: Vec::new(),
        });
        if parent != usize::MAX {
            new_tree.nodes[parent].edges[edge_idx]
                .children
                .push((new_id, probability));
        }
        for (e_idx, edge) in old.edges.iter().enumerate() {
            new_tree.nodes[new_id].edges.push(ActionEdge {
                action: edge.action.clone(),
                children: Vec::new(),
            });
            // Reverse so the depth-first pop restores the original child
            // order.
            for &(child, p) in edge.children.iter().rev() {
                stack.push((child, new_id, e_idx, p));
            }
        }
    }

    // Append the new final layer under every feasible old-goal leaf.
    let leaf_ids: Vec<NodeId> = new_tree
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.aug.layer == new_tree.horizon - 1 && n.kind == NodeKind::Feasible)
        .map(|(id, _)| id)
        .collect();
    for id in leaf_ids {
        new_tree.expand_node(id)?;
    }
    if new_tree.nodes[new_tree.root].edges.is_empty() {
        return Err(GridflexError::ActionExhausted);
    }
    new_tree.rebuild_goal_set();
    Ok(new_tree)
}
