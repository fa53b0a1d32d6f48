//! Graph data model and network statistics.

pub mod covariates;
pub mod dynamic;
pub mod gof;
pub mod mixing;
pub mod network;

pub use covariates::{covariate_summary, CovariateSummary};
pub use dynamic::DynamicNetwork;
pub use gof::{alternating_k_stars, k_stars, triangles};
pub use mixing::{
    apply_toggle_delta, dynamic_properties, mixing_counts, persistence_counts, properties,
    static_properties, DyadCase, MixingCounts, PropertyVector,
};
pub use network::{build_network, GroupPair, GroupTally, LabelSet, Network, Roster};
