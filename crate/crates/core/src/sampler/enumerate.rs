//! Exact target distribution on tiny rosters by exhaustive enumeration.
//!
//! Every graph is built and measured from scratch, independently of the
//! sampler's incremental bookkeeping, so this is usable as a test oracle.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::netcore::{mixing_counts, persistence_counts, Network, PropertyVector, Roster};
use crate::sampler::distribution::PropertyDistribution;
use crate::sampler::state::SamplerState;

/// Largest number of dyads [`enumerate_target`] accepts.
pub const MAX_ENUMERATION_DYADS: usize = 20;

/// Equivalence class of a graph: its mixing counts and, in conditional
/// mode, its persisting counts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassKey {
    pub counts: Vec<u64>,
    pub persist: Option<Vec<u64>>,
}

impl ClassKey {
    pub fn of(net: &Network, prev: Option<&Network>) -> Self {
        ClassKey {
            counts: mixing_counts(net).as_slice().to_vec(),
            persist: prev.map(|p| persistence_counts(net, p).as_slice().to_vec()),
        }
    }

    /// Class of the sampler's current graph, from its cached counts.
    pub fn of_state(state: &SamplerState) -> Self {
        ClassKey {
            counts: state.counts().as_slice().to_vec(),
            persist: state.is_conditional().then(|| state.persist().as_slice().to_vec()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassInfo {
    /// Number of graphs in the class.
    pub size: u64,
    /// Target probability of the whole class.
    pub probability: f64,
}

/// Enumerates every graph on `roster`, groups them into classes and returns
/// each class's exact target probability.
pub fn enumerate_target(
    roster: &Arc<Roster>,
    prev: Option<&Network>,
    dist: &PropertyDistribution,
) -> Result<BTreeMap<ClassKey, ClassInfo>> {
    let n = roster.len();
    let dyads: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    if dyads.len() > MAX_ENUMERATION_DYADS {
        return Err(Error::TooLarge {
            dyads: dyads.len(),
            limit: MAX_ENUMERATION_DYADS,
        });
    }
    if dist.has_dynamic() != prev.is_some() {
        return Err(Error::invalid("dynamic target needs a previous network and vice versa"));
    }
    let prev = prev.map(|p| p.project_onto(roster));
    let tally = roster.tally();
    let mut classes: BTreeMap<ClassKey, (u64, f64)> = BTreeMap::new();
    for mask in 0u64..(1u64 << dyads.len()) {
        let edges: Vec<(usize, usize)> = dyads
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &d)| d)
            .collect();
        let net = Network::from_index_edges(roster.clone(), &edges)?;
        let key = ClassKey::of(&net, prev.as_ref());
        if let Some(entry) = classes.get_mut(&key) {
            entry.0 += 1;
            continue;
        }
        let counts = mixing_counts(&net);
        let persist = prev.as_ref().map(|p| persistence_counts(&net, p));
        let props = PropertyVector::from_counts(&counts, persist.as_ref(), &tally)?;
        classes.insert(key, (1, dist.log_density(&props)?));
    }
    // Class mass is density(eta) / |class| summed over its members.
    let max = classes.values().map(|&(_, l)| l).fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = classes.values().map(|&(_, l)| (l - max).exp()).sum();
    Ok(classes
        .into_iter()
        .map(|(k, (size, l))| {
            (
                k,
                ClassInfo {
                    size,
                    probability: (l - max).exp() / z,
                },
            )
        })
        .collect())
}
