//! Tree-structured finite-horizon MDP: state-space exploration under
//! discretized feasible actions, backward-induction solving, and the
//! receding-horizon shift with subtree reuse.

mod action;
mod solve;
mod tree;

pub use action::{
    candidate_actions, expand_actions, feasible_actions, free_dims, AugmentedState,
    DiscreteAction, Expansion, FreeDim, SuccessorOutcome,
};
pub use solve::{solve, Strategy, DEFAULT_VIOLATION_PENALTY};
pub use tree::{
    build_tree, shift_horizon, state_cost, ActionEdge, MdpNode, MdpTree, NodeId, NodeKind,
};
