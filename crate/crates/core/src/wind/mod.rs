//! Wind forecast-error modelling: series ingestion, DTMC estimation by
//! maximum likelihood, and trajectory sampling.

mod dtmc;
mod series;
pub mod synth;

pub use dtmc::{
    estimate_dtmc, map_error, sample_trajectory, successors, WindDtmc, DEFAULT_BINS,
};
pub use series::{interpolate, ErrorSeries};
