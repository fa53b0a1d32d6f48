//! Rosters with discrete group labels and undirected simple networks.
//!
//! Adjacency is stored as a dense symmetric bit matrix, one row of `u64`
//! words per node. Edge queries and toggles are O(1) and row intersections
//! (triangles, infected-neighbor counts) reduce to popcounts.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Sorted, deduplicated group labels. The sort order is the canonical
/// order used for group pairs and for choosing normalizers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LabelSet(Arc<[String]>);

impl LabelSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v: Vec<String> = labels.into_iter().map(Into::into).collect();
        v.sort();
        v.dedup();
        for label in &v {
            validate_label(label)?;
        }
        Ok(LabelSet(v.into()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.0[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    /// Number of unordered group pairs, `L(L+1)/2`.
    pub fn pair_count(&self) -> usize {
        let l = self.len();
        l * (l + 1) / 2
    }

    /// Index of the unordered pair `{a, b}` in canonical pair order
    /// `(0,0), (0,1), .., (0,L-1), (1,1), ..`.
    pub fn pair_index(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let l = self.len();
        a * (2 * l - a + 1) / 2 + (b - a)
    }

    pub fn pairs(&self) -> impl Iterator<Item = GroupPair> + '_ {
        let l = self.len();
        (0..l).flat_map(move |a| (a..l).map(move |b| GroupPair { first: a, second: b }))
    }

    pub fn pair(&self, index: usize) -> GroupPair {
        self.pairs()
            .nth(index)
            .unwrap_or_else(|| panic!("pair index {index} out of range"))
    }

    /// Human-readable pair name such as `D:R`.
    pub fn pair_name(&self, pair: GroupPair) -> String {
        format!("{}:{}", self.label(pair.first), self.label(pair.second))
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() || label.contains([':', ',', '\n', '\r']) || label.trim() != label {
        return Err(Error::InvalidLabel(label.to_string()));
    }
    Ok(())
}

/// Unordered group pair with `first <= second` in canonical label order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupPair {
    pub first: usize,
    pub second: usize,
}

/// Node count per group label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTally {
    labels: LabelSet,
    counts: Vec<usize>,
}

impl GroupTally {
    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn count(&self, group: usize) -> usize {
        self.counts[group]
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        self.labels.index_of(label).map(|i| self.counts[i])
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Number of dyads whose endpoints fall in the given pair of groups.
    pub fn possible_dyads(&self, pair: GroupPair) -> u64 {
        let a = self.counts[pair.first] as u64;
        if pair.first == pair.second {
            a * a.saturating_sub(1) / 2
        } else {
            a * self.counts[pair.second] as u64
        }
    }
}

/// Ordered node identifiers with one group label each.
#[derive(Clone, Debug)]
pub struct Roster {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    groups: Vec<usize>,
    members: Vec<Vec<usize>>,
    labels: LabelSet,
}

impl PartialEq for Roster {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.groups == other.groups && self.labels == other.labels
    }
}

impl Roster {
    /// Builds a roster whose label set is exactly the labels in use.
    pub fn from_pairs<I, A, B>(nodes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let nodes: Vec<(String, String)> = nodes
            .into_iter()
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        let labels = LabelSet::new(nodes.iter().map(|(_, g)| g.clone()))?;
        Self::with_labels(nodes, labels)
    }

    /// Builds a roster against a fixed label universe, so rosters of
    /// different time steps share the same group-pair layout.
    pub fn with_labels<I, A, B>(nodes: I, labels: LabelSet) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut ids = Vec::new();
        let mut index = HashMap::new();
        let mut groups = Vec::new();
        for (id, group) in nodes {
            let id: String = id.into();
            let group: String = group.into();
            let g = labels
                .index_of(&group)
                .ok_or_else(|| Error::InvalidLabel(group.clone()))?;
            if index.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::DuplicateNode(id));
            }
            ids.push(id);
            groups.push(g);
        }
        let mut members = vec![Vec::new(); labels.len()];
        for (node, &g) in groups.iter().enumerate() {
            members[g].push(node);
        }
        Ok(Roster {
            ids,
            index,
            groups,
            members,
            labels,
        })
    }

    /// Roster of `ids` where each node's label is looked up in `groups`.
    pub fn from_map<S: AsRef<str>>(ids: &[S], groups: &HashMap<String, String>) -> Result<Self> {
        let mut nodes = Vec::with_capacity(ids.len());
        for id in ids {
            let id = id.as_ref();
            let g = groups
                .get(id)
                .ok_or_else(|| Error::MissingGroup(id.to_string()))?;
            nodes.push((id.to_string(), g.clone()));
        }
        Self::from_pairs(nodes)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, node: usize) -> &str {
        &self.ids[node]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn group(&self, node: usize) -> usize {
        self.groups[node]
    }

    pub fn groups(&self) -> &[usize] {
        &self.groups
    }

    /// Nodes carrying group `group`, in roster order.
    pub fn members(&self, group: usize) -> &[usize] {
        &self.members[group]
    }

    pub fn group_label(&self, node: usize) -> &str {
        self.labels.label(self.groups[node])
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn pair_of(&self, i: usize, j: usize) -> usize {
        self.labels.pair_index(self.groups[i], self.groups[j])
    }

    pub fn tally(&self) -> GroupTally {
        let mut counts = vec![0; self.labels.len()];
        for &g in &self.groups {
            counts[g] += 1;
        }
        GroupTally {
            labels: self.labels.clone(),
            counts,
        }
    }

    pub fn dyad_count(&self) -> usize {
        let n = self.len();
        n * n.saturating_sub(1) / 2
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    fn flip(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] ^= 1 << (j % 64);
        self.bits[j * self.words + i / 64] ^= 1 << (i % 64);
    }

    #[inline]
    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }
}

/// One time slice: a roster plus an undirected simple edge set.
#[derive(Clone)]
pub struct Network {
    roster: Arc<Roster>,
    adj: BitMatrix,
    edges: usize,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.roster, &other.roster) || self.roster == other.roster)
            && self.adj == other.adj
    }
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Network")
            .field("nodes", &self.node_count())
            .field("edges", &self.edges)
            .finish()
    }
}

impl Network {
    pub fn empty(roster: Arc<Roster>) -> Self {
        let adj = BitMatrix::new(roster.len());
        Network {
            roster,
            adj,
            edges: 0,
        }
    }

    /// Builds a network from id pairs. Duplicate pairs (in either
    /// orientation) collapse to one edge.
    pub fn from_edges<I, A, B>(roster: Arc<Roster>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut net = Network::empty(roster);
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let (i, j) = match (net.roster.index_of(a), net.roster.index_of(b)) {
                (Some(i), Some(j)) => (i, j),
                _ => return Err(Error::UnknownEndpoint(a.to_string(), b.to_string())),
            };
            if i == j {
                return Err(Error::SelfLoop(a.to_string()));
            }
            net.set_edge(i, j, true);
        }
        Ok(net)
    }

    pub fn from_index_edges(roster: Arc<Roster>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut net = Network::empty(roster);
        for &(i, j) in edges {
            if i >= net.node_count() || j >= net.node_count() {
                return Err(Error::UnknownEndpoint(i.to_string(), j.to_string()));
            }
            if i == j {
                return Err(Error::SelfLoop(net.roster.id(i).to_string()));
            }
            net.set_edge(i, j, true);
        }
        Ok(net)
    }

    pub fn roster(&self) -> &Arc<Roster> {
        &self.roster
    }

    pub fn node_count(&self) -> usize {
        self.adj.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj.get(i, j)
    }

    /// Flips dyad `(i, j)` and returns whether the edge is present afterwards.
    #[inline]
    pub fn toggle(&mut self, i: usize, j: usize) -> bool {
        assert_ne!(i, j, "self-loops are not allowed");
        self.adj.flip(i, j);
        let present = self.adj.get(i, j);
        if present {
            self.edges += 1;
        } else {
            self.edges -= 1;
        }
        present
    }

    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        if self.has_edge(i, j) != present {
            self.toggle(i, j);
        }
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|i| self.degree(i)).collect()
    }

    /// Adjacency row of `i` as bit words (bit `j` set iff `i ~ j`).
    pub fn row(&self, i: usize) -> &[u64] {
        self.adj.row(i)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.adj.row(i))
    }

    /// Edges as index pairs `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |i| self.neighbors(i).filter(move |&j| j > i).map(move |j| (i, j)))
    }

    /// Edges as node-id pairs.
    pub fn edge_ids(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges()
            .map(move |(i, j)| (self.roster.id(i), self.roster.id(j)))
    }

    /// Re-expresses this network on another roster: edges between nodes
    /// present in both rosters are kept, everything else is dropped, and
    /// nodes new to `roster` start isolated.
    pub fn project_onto(&self, roster: &Arc<Roster>) -> Network {
        if Arc::ptr_eq(&self.roster, roster) || self.roster.ids == roster.ids {
            return Network {
                roster: roster.clone(),
                adj: self.adj.clone(),
                edges: self.edges,
            };
        }
        let mut out = Network::empty(roster.clone());
        let map: Vec<Option<usize>> = self
            .roster
            .ids
            .iter()
            .map(|id| roster.index_of(id))
            .collect();
        for (i, j) in self.edges() {
            if let (Some(a), Some(b)) = (map[i], map[j]) {
                out.set_edge(a, b, true);
            }
        }
        out
    }
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + bit)
            }
        })
    })
}

/// Builds a canonical network from a roster, a node → group map and an id
/// edge list.
pub fn build_network<S, A, B>(
    roster: &[S],
    groups: &HashMap<String, String>,
    edges: &[(A, B)],
) -> Result<Network>
where
    S: AsRef<str>,
    A: AsRef<str>,
    B: AsRef<str>,
{
    let roster = Arc::new(Roster::from_map(roster, groups)?);
    Network::from_edges(roster, edges.iter().map(|(a, b)| (a.as_ref(), b.as_ref())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn groups(pairs: &[(&str, &str)]) -> HashMap<String, String> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn duplicate_pairs_collapse() {
        let g = groups(&[("1", "D"), ("2", "D"), ("3", "R")]);
        let net = build_network(&["1", "2", "3"], &g, &[("1", "2"), ("2", "1")]).unwrap();
        assert_eq!(net.edge_count(), 1);
        assert!(net.has_edge(0, 1) && net.has_edge(1, 0));
    }

    #[test]
    fn self_loop_rejected() {
        let g = groups(&[("1", "D"), ("2", "D")]);
        let err = build_network(&["1", "2"], &g, &[("1", "1")]).unwrap_err();
        assert!(matches!(err, Error::SelfLoop(ref id) if id == "1"));
    }

    #[test]
    fn unknown_endpoint_reports_pair() {
        let g = groups(&[("1", "D"), ("2", "D")]);
        let err = build_network(&["1", "2"], &g, &[("1", "9")]).unwrap_err();
        assert!(matches!(err, Error::UnknownEndpoint(ref a, ref b) if a == "1" && b == "9"));
    }

    #[test]
    fn missing_group_rejected() {
        let g = groups(&[("1", "D")]);
        let err = build_network(&["1", "2"], &g, &[] as &[(&str, &str)]).unwrap_err();
        assert!(matches!(err, Error::MissingGroup(ref id) if id == "2"));
    }

    #[test]
    fn empty_senate() {
        let ids: Vec<String> = (0..100).map(|i| format!("s{i}")).collect();
        let g: HashMap<String, String> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), if i % 2 == 0 { "D" } else { "R" }.to_string()))
            .collect();
        let net = build_network(&ids, &g, &[] as &[(&str, &str)]).unwrap();
        assert_eq!(net.node_count(), 100);
        assert_eq!(net.edge_count(), 0);
    }

    #[test]
    fn pair_index_is_dense_and_canonical() {
        let labels = LabelSet::new(["R", "D", "I"]).unwrap();
        assert_eq!(labels.iter().collect::<Vec<_>>(), ["D", "I", "R"]);
        let idx: Vec<usize> = labels
            .pairs()
            .map(|p| labels.pair_index(p.first, p.second))
            .collect();
        assert_eq!(idx, (0..labels.pair_count()).collect::<Vec<_>>());
        assert_eq!(labels.pair_index(2, 0), labels.pair_index(0, 2));
    }

    #[test]
    fn projection_drops_departed_nodes() {
        let a = Arc::new(Roster::from_pairs([("x", "D"), ("y", "D"), ("z", "R")]).unwrap());
        let b = Arc::new(
            Roster::with_labels([("y", "D"), ("z", "R"), ("w", "R")], a.labels().clone()).unwrap(),
        );
        let net = Network::from_edges(a, [("x", "y"), ("y", "z"), ("x", "z")]).unwrap();
        let p = net.project_onto(&b);
        assert_eq!(p.edge_count(), 1);
        assert!(p.has_edge(0, 1));
        assert_eq!(p.degree(2), 0);
    }

    #[test]
    fn wide_rows_cross_word_boundaries() {
        let roster = Arc::new(Roster::from_pairs((0..130).map(|i| (i.to_string(), "A"))).unwrap());
        let mut net = Network::empty(roster);
        net.toggle(0, 129);
        net.toggle(63, 64);
        assert_eq!(net.edges().collect::<Vec<_>>(), vec![(0, 129), (63, 64)]);
        assert_eq!(net.neighbors(129).collect::<Vec<_>>(), vec![0]);
        net.toggle(129, 0);
        assert_eq!(net.edge_count(), 1);
    }
}
