//! Continuous-state power-system model: topology, asset dynamics, time
//! discretization, and operational constraints.

mod constraints;
mod dynamics;
mod schedule;
mod spec;
mod state;

pub mod presets;

pub use constraints::{check_constraints, is_feasible, Violation};
pub use dynamics::{
    node_power_balance, solve_equilibrium_angles, step_dynamics, swing_residual, NEWTON_MAX_ITER,
    NEWTON_TOL,
};
pub use schedule::{day_ahead_schedule, DayAheadSchedule};
pub use spec::{GridSpec, Line};
pub use state::{ControlInput, Disturbance, GridState, KnownInput};
