//! Mixing and persistence counts, and the normalized essential properties
//! derived from them.
//!
//! Integer counts are the source of truth. Normalized values (count divided
//! by the size of the canonically first group of the pair) are computed on
//! read, so incremental updates never accumulate floating-point drift.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::netcore::network::{GroupPair, GroupTally, LabelSet, Network};

/// Edge counts per unordered group pair, in canonical pair order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MixingCounts {
    labels: LabelSet,
    counts: Vec<u64>,
}

impl MixingCounts {
    pub fn zeros(labels: LabelSet) -> Self {
        let counts = vec![0; labels.pair_count()];
        MixingCounts { labels, counts }
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn get(&self, pair: usize) -> u64 {
        self.counts[pair]
    }

    pub fn get_pair(&self, a: usize, b: usize) -> u64 {
        self.counts[self.labels.pair_index(a, b)]
    }

    pub fn get_by_label(&self, a: &str, b: &str) -> Option<u64> {
        let (a, b) = (self.labels.index_of(a)?, self.labels.index_of(b)?);
        Some(self.get_pair(a, b))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub(crate) fn add(&mut self, pair: usize, delta: i64) {
        let c = &mut self.counts[pair];
        *c = c
            .checked_add_signed(delta)
            .expect("mixing count went negative");
    }
}

/// Edge counts of `net` partitioned by the group labels of the endpoints.
pub fn mixing_counts(net: &Network) -> MixingCounts {
    let roster = net.roster();
    let mut out = MixingCounts::zeros(roster.labels().clone());
    for (i, j) in net.edges() {
        out.counts[roster.pair_of(i, j)] += 1;
    }
    out
}

/// Counts of edges present in both `net_t` and `net_prev`, by group pair.
///
/// Only dyads whose endpoints appear in both rosters can persist. Groups are
/// taken from `net_t`.
pub fn persistence_counts(net_t: &Network, net_prev: &Network) -> MixingCounts {
    let roster = net_t.roster();
    let mut out = MixingCounts::zeros(roster.labels().clone());
    if Arc::ptr_eq(roster, net_prev.roster()) || roster.ids() == net_prev.roster().ids() {
        for (i, j) in net_t.edges() {
            if net_prev.has_edge(i, j) {
                out.counts[roster.pair_of(i, j)] += 1;
            }
        }
        return out;
    }
    let prev_roster = net_prev.roster();
    let map: Vec<Option<usize>> = roster.ids().iter().map(|id| prev_roster.index_of(id)).collect();
    for (i, j) in net_t.edges() {
        if let (Some(a), Some(b)) = (map[i], map[j]) {
            if net_prev.has_edge(a, b) {
                out.counts[roster.pair_of(i, j)] += 1;
            }
        }
    }
    out
}

/// Divides each pair count by the size of the pair's first group.
///
/// An empty normalizing group with a zero count yields 0; with a nonzero
/// count it is an error.
pub fn normalize(counts: &MixingCounts, tally: &GroupTally) -> Result<Vec<f64>> {
    let labels = counts.labels();
    if labels != tally.labels() {
        return Err(Error::invalid("counts and tally use different label sets"));
    }
    labels
        .pairs()
        .zip(counts.as_slice())
        .map(|(pair, &count)| normalize_one(count, pair, tally))
        .collect()
}

fn normalize_one(count: u64, pair: GroupPair, tally: &GroupTally) -> Result<f64> {
    let m = tally.count(pair.first);
    match (m, count) {
        (0, 0) => Ok(0.0),
        (0, c) => Err(Error::EmptyNormalizer {
            label: tally.labels().label(pair.first).to_string(),
            count: c,
        }),
        (m, c) => Ok(c as f64 / m as f64),
    }
}

/// Static essential properties and, when a previous network exists, the
/// dynamic ones.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyVector {
    pub static_part: Vec<f64>,
    pub dynamic_part: Option<Vec<f64>>,
    pub normalizer: GroupTally,
}

impl PropertyVector {
    pub fn from_counts(
        counts: &MixingCounts,
        persist: Option<&MixingCounts>,
        tally: &GroupTally,
    ) -> Result<Self> {
        Ok(PropertyVector {
            static_part: normalize(counts, tally)?,
            dynamic_part: persist.map(|p| normalize(p, tally)).transpose()?,
            normalizer: tally.clone(),
        })
    }

    pub fn labels(&self) -> &LabelSet {
        self.normalizer.labels()
    }

    /// Static components followed by dynamic ones.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.static_part.clone();
        if let Some(d) = &self.dynamic_part {
            v.extend_from_slice(d);
        }
        v
    }
}

pub fn static_properties(net: &Network) -> Result<Vec<f64>> {
    normalize(&mixing_counts(net), &net.roster().tally())
}

pub fn dynamic_properties(net_t: &Network, net_prev: &Network) -> Result<Vec<f64>> {
    normalize(&persistence_counts(net_t, net_prev), &net_t.roster().tally())
}

/// The combined property vector of `net_t`, conditional on `net_prev` when given.
pub fn properties(net_t: &Network, net_prev: Option<&Network>) -> Result<PropertyVector> {
    let counts = mixing_counts(net_t);
    let persist = net_prev.map(|p| persistence_counts(net_t, p));
    PropertyVector::from_counts(&counts, persist.as_ref(), &net_t.roster().tally())
}

/// Where the toggled dyad sits relative to the current and previous networks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DyadCase {
    /// Edge in both: toggling removes a persisting edge.
    InBoth,
    /// Edge only in the current network: toggling removes a new edge.
    CurrentOnly,
    /// Edge only in the previous network: toggling restores a persisting edge.
    PreviousOnly,
    /// Edge in neither: toggling adds a new edge.
    Neither,
}

impl DyadCase {
    pub fn classify(in_current: bool, in_previous: bool) -> Self {
        match (in_current, in_previous) {
            (true, true) => DyadCase::InBoth,
            (true, false) => DyadCase::CurrentOnly,
            (false, true) => DyadCase::PreviousOnly,
            (false, false) => DyadCase::Neither,
        }
    }

    /// The case of the same dyad after it is toggled.
    pub fn toggled(self) -> Self {
        match self {
            DyadCase::InBoth => DyadCase::PreviousOnly,
            DyadCase::PreviousOnly => DyadCase::InBoth,
            DyadCase::CurrentOnly => DyadCase::Neither,
            DyadCase::Neither => DyadCase::CurrentOnly,
        }
    }

    /// Changes to (edge count, persisting count) of the dyad's pair.
    pub fn delta(self) -> (i64, i64) {
        match self {
            DyadCase::InBoth => (-1, -1),
            DyadCase::CurrentOnly => (-1, 0),
            DyadCase::PreviousOnly => (1, 1),
            DyadCase::Neither => (1, 0),
        }
    }
}

/// Applies a single-dyad toggle to `net_t` and updates its mixing and
/// persistence counts in O(1).
///
/// `net_prev` must be expressed on the same roster as `net_t` (see
/// [`Network::project_onto`]). Returns the pair index and the case the dyad
/// was in before the toggle.
pub fn apply_toggle_delta(
    counts: &mut MixingCounts,
    persist: &mut MixingCounts,
    net_t: &mut Network,
    net_prev: &Network,
    dyad: (usize, usize),
) -> (usize, DyadCase) {
    let (i, j) = dyad;
    debug_assert_eq!(net_t.node_count(), net_prev.node_count());
    let pair = net_t.roster().pair_of(i, j);
    let case = DyadCase::classify(net_t.has_edge(i, j), net_prev.has_edge(i, j));
    let (de, dp) = case.delta();
    counts.add(pair, de);
    persist.add(pair, dp);
    net_t.toggle(i, j);
    (pair, case)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::network::Roster;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn roster(labels: &[&str]) -> Arc<Roster> {
        Arc::new(
            Roster::from_pairs(labels.iter().enumerate().map(|(i, l)| (i.to_string(), *l))).unwrap(),
        )
    }

    fn random_net(roster: &Arc<Roster>, p: f64, rng: &mut impl Rng) -> Network {
        let mut net = Network::empty(roster.clone());
        let n = roster.len();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(p) {
                    net.toggle(i, j);
                }
            }
        }
        net
    }

    /// O(n²) reference over the raw adjacency.
    fn brute_mixing(net: &Network) -> Vec<u64> {
        let r = net.roster();
        let mut out = vec![0; r.labels().pair_count()];
        for i in 0..net.node_count() {
            for j in 0..net.node_count() {
                if i < j && net.has_edge(i, j) {
                    out[r.labels().pair_index(r.group(i), r.group(j))] += 1;
                }
            }
        }
        out
    }

    #[test]
    fn triangle_ddr() {
        let r = roster(&["D", "D", "R"]);
        let net = Network::from_index_edges(r, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let c = mixing_counts(&net);
        assert_eq!(c.get_by_label("D", "D"), Some(1));
        assert_eq!(c.get_by_label("D", "R"), Some(2));
        assert_eq!(c.get_by_label("R", "D"), Some(2));
        assert_eq!(c.get_by_label("R", "R"), Some(0));
    }

    #[test]
    fn empty_graph_all_zero() {
        let net = Network::empty(roster(&["D", "R", "R"]));
        assert_eq!(mixing_counts(&net).as_slice(), &[0, 0, 0]);
        assert_eq!(static_properties(&net).unwrap(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn random_graph_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let labels: Vec<&str> = (0..20).map(|i| ["D", "R", "I"][i % 3]).collect();
        let r = roster(&labels);
        for _ in 0..20 {
            let net = random_net(&r, 0.3, &mut rng);
            let c = mixing_counts(&net);
            assert_eq!(c.as_slice(), brute_mixing(&net).as_slice());
            assert_eq!(c.total(), net.edge_count() as u64);
        }
    }

    #[test]
    fn dd_normalized_by_d_count() {
        let labels: Vec<&str> = (0..100).map(|i| if i < 50 { "D" } else { "R" }).collect();
        let r = roster(&labels);
        let mut net = Network::empty(r);
        let mut added = 0;
        'outer: for i in 0..50 {
            for j in i + 1..50 {
                net.toggle(i, j);
                added += 1;
                if added == 100 {
                    break 'outer;
                }
            }
        }
        let s = static_properties(&net).unwrap();
        assert_eq!(s, vec![2.0, 0.0, 0.0]);
    }

    #[test]
    fn cross_pair_divides_by_first_label() {
        // 2 D, 4 R, 4 D-R edges: D:R / M_D = 2.
        let r = roster(&["D", "D", "R", "R", "R", "R"]);
        let net = Network::from_index_edges(r, &[(0, 2), (0, 3), (1, 4), (1, 5)]).unwrap();
        assert_eq!(static_properties(&net).unwrap(), vec![0.0, 2.0, 0.0]);
    }

    #[test]
    fn empty_group_conventions() {
        let labels = LabelSet::new(["D", "R"]).unwrap();
        let r = Arc::new(Roster::with_labels([("a", "R"), ("b", "R")], labels.clone()).unwrap());
        let net = Network::from_index_edges(r.clone(), &[(0, 1)]).unwrap();
        assert_eq!(static_properties(&net).unwrap(), vec![0.0, 0.0, 0.5]);

        let mut bogus = MixingCounts::zeros(labels);
        bogus.add(0, 1);
        assert!(matches!(
            normalize(&bogus, &r.tally()),
            Err(Error::EmptyNormalizer { .. })
        ));
    }

    #[test]
    fn persistence_identity_and_disjoint() {
        let r = roster(&["D", "D", "R", "R"]);
        let a = Network::from_index_edges(r.clone(), &[(0, 1), (1, 2)]).unwrap();
        let b = Network::from_index_edges(r, &[(0, 2), (2, 3)]).unwrap();
        assert_eq!(persistence_counts(&a, &a), mixing_counts(&a));
        assert_eq!(dynamic_properties(&a, &a).unwrap(), static_properties(&a).unwrap());
        assert_eq!(persistence_counts(&a, &b).total(), 0);
    }

    #[test]
    fn departed_node_edges_do_not_persist() {
        let labels = LabelSet::new(["D", "R"]).unwrap();
        let prev_r = Arc::new(
            Roster::with_labels(
                [("a", "D"), ("b", "D"), ("c", "R"), ("gone", "R")],
                labels.clone(),
            )
            .unwrap(),
        );
        let cur_r = Arc::new(
            Roster::with_labels([("a", "D"), ("b", "D"), ("c", "R"), ("new", "R")], labels).unwrap(),
        );
        let prev = Network::from_edges(
            prev_r,
            [("a", "b"), ("gone", "a"), ("gone", "b"), ("gone", "c")],
        )
        .unwrap();
        let cur = Network::from_edges(cur_r, [("a", "b"), ("new", "a"), ("new", "c")]).unwrap();
        // Explicit intersection of the id edge lists.
        let prev_edges: Vec<(String, String)> = prev
            .edge_ids()
            .map(|(x, y)| (x.min(y).to_string(), x.max(y).to_string()))
            .collect();
        let shared = cur
            .edge_ids()
            .filter(|(x, y)| prev_edges.contains(&(x.min(y).to_string(), x.max(y).to_string())))
            .count();
        let p = persistence_counts(&cur, &prev);
        assert_eq!(p.total(), shared as u64);
        assert_eq!(p.get_by_label("D", "D"), Some(1));
    }

    #[test]
    fn toggle_delta_matches_recompute() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let labels: Vec<&str> = (0..50).map(|i| if i % 3 == 0 { "R" } else { "D" }).collect();
        let r = roster(&labels);
        let prev = random_net(&r, 0.1, &mut rng);
        let mut cur = random_net(&r, 0.1, &mut rng);
        let mut counts = mixing_counts(&cur);
        let mut persist = persistence_counts(&cur, &prev);
        for _ in 0..1000 {
            let i = rng.random_range(0..50);
            let mut j = rng.random_range(0..49);
            if j >= i {
                j += 1;
            }
            apply_toggle_delta(&mut counts, &mut persist, &mut cur, &prev, (i, j));
            assert_eq!(counts, mixing_counts(&cur));
            assert_eq!(persist, persistence_counts(&cur, &prev));
        }
    }

    #[test]
    fn toggle_is_an_involution() {
        let r = roster(&["D", "D", "R"]);
        let prev = Network::from_index_edges(r.clone(), &[(0, 2)]).unwrap();
        let mut cur = prev.clone();
        let mut counts = mixing_counts(&cur);
        let mut persist = persistence_counts(&cur, &prev);
        let before = (counts.clone(), persist.clone(), cur.clone());
        apply_toggle_delta(&mut counts, &mut persist, &mut cur, &prev, (1, 2));
        apply_toggle_delta(&mut counts, &mut persist, &mut cur, &prev, (2, 1));
        assert_eq!((counts, persist, cur), before);
    }

    #[test]
    fn case_one_removes_static_and_persisting() {
        let r = roster(&["D", "R", "R"]);
        let prev = Network::from_index_edges(r.clone(), &[(0, 1)]).unwrap();
        let mut cur = prev.clone();
        let mut counts = mixing_counts(&cur);
        let mut persist = persistence_counts(&cur, &prev);
        let (pair, case) = apply_toggle_delta(&mut counts, &mut persist, &mut cur, &prev, (0, 1));
        assert_eq!(case, DyadCase::InBoth);
        assert_eq!(pair, r.labels().pair_index(0, 1));
        assert_eq!(counts.get_by_label("D", "R"), Some(0));
        assert_eq!(persist.get_by_label("D", "R"), Some(0));
    }
}
