//! Time-indexed sequences of networks.

use crate::netcore::network::Network;

/// One network per time step, in chronological order. Rosters may differ
/// between steps.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DynamicNetwork {
    steps: Vec<(String, Network)>,
}

impl DynamicNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: impl Into<String>, net: Network) {
        self.steps.push((time.into(), net));
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn time(&self, t: usize) -> &str {
        &self.steps[t].0
    }

    pub fn network(&self, t: usize) -> &Network {
        &self.steps[t].1
    }

    pub fn times(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().map(|(t, _)| t.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Network)> {
        self.steps.iter().map(|(t, n)| (t.as_str(), n))
    }

    /// The network preceding step `t`, if any.
    pub fn previous(&self, t: usize) -> Option<&Network> {
        t.checked_sub(1).map(|p| &self.steps[p].1)
    }
}

impl FromIterator<(String, Network)> for DynamicNetwork {
    fn from_iter<I: IntoIterator<Item = (String, Network)>>(iter: I) -> Self {
        DynamicNetwork {
            steps: iter.into_iter().collect(),
        }
    }
}
