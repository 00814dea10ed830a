//! Seeded Monte Carlo harness.

pub mod experiments;
pub mod rng;
pub mod stats;

pub use experiments::*;
pub use rng::{inverse_normal_cdf, normal_cdf, trial_rng};
pub use stats::{gumbel_inverse_cdf, ks_distance, qq_data, EmpiricalDistribution, Proportion};
