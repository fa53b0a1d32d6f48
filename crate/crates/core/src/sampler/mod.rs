//! Markov chain sampler for the conditional configuration target.

pub mod chain;
pub mod distribution;
pub mod enumerate;
pub mod state;

pub use chain::{
    acceptance_probability, mh_step, replicate_rng, run_chain, run_chain_stepwise, sample_dynamic_network,
    sample_initial_network, sample_network, sample_replicates, sample_transition, SamplerConfig,
    StepTarget, Target,
};
pub use distribution::{log_density, PropertyDistribution, DEFAULT_VARIANCE_FLOOR};
pub use enumerate::{enumerate_target, ClassInfo, ClassKey, MAX_ENUMERATION_DYADS};
pub use state::{forward_reverse_counts, SamplerState};
