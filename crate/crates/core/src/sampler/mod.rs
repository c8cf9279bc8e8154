//! Detection probabilities, exact subspace distributions and samplers.

mod chain;
mod detect;
mod hafnian;
mod scaling;
mod subspace;

pub use chain::{sample_chain, ChainSampler};
pub use detect::{
    click_count_distribution, pnr_probability, threshold_distribution, threshold_probability,
    vacuum_probability, ClickPattern, MAX_FULL_DISTRIBUTION_MODES,
};
pub use hafnian::{hafnian, hafnian_by_matchings, MAX_MATCHING_DIM, MAX_POWER_TRACE_DIM};
pub use scaling::{expected_clicks, optimize_scaling, ScalingChoice, EXACT_OBJECTIVE_MAX_MODES};
pub use subspace::{enumerate_subspace, sample_subspace, SubspaceDistribution, MAX_ENUMERATION_MODES};
