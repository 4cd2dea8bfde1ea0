use crate::mdp::tree::{MdpTree, NodeId, NodeKind};

/// Finite penalty assigned to absorbing infeasible leaves. Large against
/// any accumulated frequency cost, yet finite so that among all-risky
/// actions the least risky one is still preferred.
pub const DEFAULT_VIOLATION_PENALTY: f64 = 1e6;

/// A memoryless deterministic strategy with the expected cost-to-go of
/// every node.
#[derive(Debug, Clone)]
pub struct Strategy {
    /// Chosen edge index per node; `None` on leaves.
    pub choice: Vec<Option<usize>>,
    /// Expected cost-to-go per node.
    pub value: Vec<f64>,
}

impl Strategy {
    pub fn root_value(&self, tree: &MdpTree) -> f64 {
        self.value[tree.root]
    }

    pub fn chosen_edge(&self, node: NodeId) -> Option<usize> {
        self.choice[node]
    }
}

/// Backward induction from the final layer to the root.
///
/// Every visited state contributes its immediate cost: a goal leaf's
/// value is its own cost (boundary value 0 beyond the horizon), an
/// absorbing infeasible leaf's the violation penalty, and an internal
/// node's `c(s) + min` over its actions of the probability-weighted
/// child values. Ties pick the lowest action grid index, i.e. the first
/// action in generation order.
pub fn solve(tree: &MdpTree, penalty: f64) -> Strategy {
    let n = tree.nodes.len();
    let mut value = vec![0.0; n];
    let mut choice = vec![None; n];

    let mut order: Vec<NodeId> = (0..n).collect();
    order.sort_by_key(|&id| std::cmp::Reverse(tree.nodes[id].aug.layer));

    for id in order {
        let node = &tree.nodes[id];
        if node.kind == NodeKind::AbsorbingInfeasible {
            value[id] = penalty;
            continue;
        }
        if node.edges.is_empty() {
            // Feasible leaf at the horizon: own cost plus the zero
            // boundary beyond it.
            value[id] = node.cost;
            continue;
        }
        let mut best = f64::INFINITY;
        let mut best_edge = 0;
        for (e_idx, edge) in node.edges.iter().enumerate() {
            let expected: f64 = edge
                .children
                .iter()
                .map(|&(child, p)| p * value[child])
                .sum();
            if expected < best {
                best = expected;
                best_edge = e_idx;
            }
        }
        value[id] = node.cost + best;
        choice[id] = Some(best_edge);
    }
    Strategy { choice, value }
}
