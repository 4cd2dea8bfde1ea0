//! Predictive frequency control for power grids with wind generation and
//! battery storage.
//!
//! The crate models a transmission grid with conventional generators,
//! wind farms, and batteries; learns a Markov-chain model of the wind
//! forecast error from historical data; builds a tree-structured MDP over
//! the discretized feasible controls; and runs receding-horizon
//! closed-loop simulations that report the integral of the absolute
//! frequency deviation.

pub mod config;
pub mod error;
pub mod grid;
pub mod mdp;
pub mod sim;
pub mod wind;

pub use error::{GridflexError, Result};
