//! The three grid variants used throughout the experiments: a 1-node
//! aggregate, a 3-node grid (wind farm at node 0, generator at node 1,
//! battery at node 2), and the 3-node grid with a second battery at
//! node 0.
//!
//! Inertia, damping, and susceptance values are chosen for stable
//! behaviour at the 5-minute control resolution, with inertia large
//! enough that frequency transients span several control steps (so the
//! controller has something to regulate) and heterogeneous damping so
//! that redistributing power across nodes changes the aggregate
//! deviation. The JSON files under `configs/` mirror these presets.

use crate::grid::{GridSpec, Line};

pub const DT_CONTROL: f64 = 300.0;

/// All assets aggregated at a single node.
pub fn one_node() -> GridSpec {
    GridSpec {
        inertia: vec![90_000.0],
        damping: vec![160.0],
        lines: vec![],
        gen_node: vec![0],
        gen_capacity: vec![[0.0, 10.0]],
        gen_ramp: vec![0.01],
        reserve_sched: vec![[0.25, 0.25]],
        farm_node: vec![0],
        battery_node: vec![0],
        battery_capacity: vec![8.0],
        battery_rate: vec![4.0],
        flex_sched: vec![[2.0, 2.0]],
        freq_limit: 0.1,
        dt: DT_CONTROL,
        battery_efficiency: 1.0,
    }
}

/// The 3-node grid: wind farm at node 0, generator at node 1, battery at
/// node 2, loads at all nodes.
pub fn three_node() -> GridSpec {
    GridSpec {
        inertia: vec![30_000.0, 30_000.0, 30_000.0],
        damping: vec![100.0, 30.0, 30.0],
        lines: vec![
            Line {
                from: 0,
                to: 1,
                susceptance: 6.0,
                capacity: 5.0,
            },
            Line {
                from: 1,
                to: 2,
                susceptance: 6.0,
                capacity: 5.0,
            },
            Line {
                from: 0,
                to: 2,
                susceptance: 3.0,
                capacity: 5.0,
            },
        ],
        gen_node: vec![1],
        gen_capacity: vec![[0.0, 10.0]],
        gen_ramp: vec![0.01],
        reserve_sched: vec![[0.25, 0.25]],
        farm_node: vec![0],
        battery_node: vec![2],
        battery_capacity: vec![8.0],
        battery_rate: vec![4.0],
        flex_sched: vec![[2.0, 2.0]],
        freq_limit: 0.1,
        dt: DT_CONTROL,
        battery_efficiency: 1.0,
    }
}

/// The 3-node grid extended with a second battery at node 0.
pub fn three_node_two_batteries() -> GridSpec {
    let mut spec = three_node();
    spec.battery_node.push(0);
    spec.battery_capacity.push(8.0);
    spec.battery_rate.push(4.0);
    spec.flex_sched.push([2.0, 2.0]);
    spec
}
