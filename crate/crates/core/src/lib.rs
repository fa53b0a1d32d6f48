//! Congruence-class models for dynamic networks.
//!
//! A network's distribution is specified through a small set of essential
//! properties (per group pair: how many edges exist, and how many persist
//! from the previous step). Networks are drawn uniformly within each
//! property class, with class probabilities given by a Gaussian target,
//! using a Metropolis–Hastings edge-toggle chain. Targets come from
//! seasonal ARMA forecasts of observed property series.

pub mod component;
pub mod epidemic;
pub mod error;
pub mod forecast;
pub mod ingest;
pub mod io;
pub mod netcore;
pub mod quantile;
pub mod sampler;

pub use component::{Component, ComponentKind};
pub use error::{Error, Result};
pub use netcore::{
    CovariateSummary, DynamicNetwork, GroupPair, GroupTally, LabelSet, MixingCounts, Network, PropertyVector, Roster,
};
pub use sampler::{PropertyDistribution, SamplerConfig, SamplerState};
