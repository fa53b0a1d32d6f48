//! Sampler state and the exact proposal-count (f) formulas.
//!
//! `f(c_x, c_y)` is the number of single-dyad toggles that move a graph of
//! class `c_x` into class `c_y`. A class is fixed by the per-pair edge
//! counts `E` of the current graph and the per-pair persisting counts `P`
//! against the previous graph, so toggling a dyad of pair `(l,k)` only
//! changes `E^{lk}` and possibly `P^{lk}`. Every other dyad of the same pair
//! and the same [`DyadCase`] produces the identical class change, giving:
//!
//! | case            | count                                     |
//! |-----------------|-------------------------------------------|
//! | in both         | `P`                                       |
//! | current only    | `E - P`                                   |
//! | previous only   | `E_prev - P`                              |
//! | neither         | `possible - E - E_prev + P`               |
//!
//! All inputs are cached integers, so both directions cost O(1).

use rand::Rng;

use crate::netcore::{
    apply_toggle_delta, mixing_counts, persistence_counts, DyadCase, GroupTally, MixingCounts,
    Network, PropertyVector,
};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct SamplerState {
    current: Network,
    previous: Network,
    conditional: bool,
    counts: MixingCounts,
    persist: MixingCounts,
    prev_counts: MixingCounts,
    tally: GroupTally,
    possible: Vec<u64>,
    /// Per group, a bit row marking its members.
    group_masks: Vec<Vec<u64>>,
    current_edges: EdgePool,
    previous_edges: Vec<(usize, usize)>,
}

/// Edge list with O(1) insertion, removal and uniform choice.
#[derive(Clone, Debug)]
struct EdgePool {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// Position in `edges` of dyad `i * n + j` (`i < j`), or `u32::MAX`.
    pos: Vec<u32>,
}

impl EdgePool {
    fn new(net: &Network) -> Self {
        let n = net.node_count();
        let mut pool = EdgePool {
            n,
            edges: Vec::with_capacity(net.edge_count()),
            pos: vec![u32::MAX; n * n],
        };
        for e in net.edges() {
            pool.insert(e.0, e.1);
        }
        pool
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * self.n + b
    }

    fn insert(&mut self, i: usize, j: usize) {
        let s = self.slot(i, j);
        self.pos[s] = self.edges.len() as u32;
        self.edges.push((i.min(j), i.max(j)));
    }

    fn remove(&mut self, i: usize, j: usize) {
        let s = self.slot(i, j);
        let at = self.pos[s] as usize;
        self.pos[s] = u32::MAX;
        self.edges.swap_remove(at);
        if let Some(&(a, b)) = self.edges.get(at) {
            let moved = self.slot(a, b);
            self.pos[moved] = at as u32;
        }
    }
}

impl SamplerState {
    /// Chain state at `current`, conditioned on `previous` when given.
    ///
    /// `previous` is projected onto the current roster: departed nodes'
    /// edges are dropped and labels are taken from the current roster.
    /// Without a previous network the state is static-only and behaves as if
    /// the previous graph were empty.
    pub fn new(current: Network, previous: Option<&Network>) -> Self {
        let roster = current.roster().clone();
        let (previous, conditional) = match previous {
            Some(p) => (p.project_onto(&roster), true),
            None => (Network::empty(roster.clone()), false),
        };
        let tally = roster.tally();
        let possible = roster.labels().pairs().map(|p| tally.possible_dyads(p)).collect();
        let words = roster.len().div_ceil(64);
        let group_masks = (0..roster.labels().len())
            .map(|g| {
                let mut mask = vec![0u64; words];
                for &v in roster.members(g) {
                    mask[v / 64] |= 1 << (v % 64);
                }
                mask
            })
            .collect();
        SamplerState {
            current_edges: EdgePool::new(&current),
            previous_edges: previous.edges().collect(),
            counts: mixing_counts(&current),
            persist: persistence_counts(&current, &previous),
            prev_counts: mixing_counts(&previous),
            current,
            previous,
            conditional,
            tally,
            possible,
            group_masks,
        }
    }

    /// The `k`-th dyad (0-based, ordered by first then second endpoint) of
    /// `pair` in `case`; `k` must be below the class size.
    pub fn nth_dyad(&self, pair: usize, case: DyadCase, k: u64) -> (usize, usize) {
        let roster = self.current.roster();
        let gp = roster.labels().pair(pair);
        let mask = &self.group_masks[gp.second];
        let mut remaining = k;
        for &i in roster.members(gp.first) {
            let cur = self.current.row(i);
            let prev = self.previous.row(i);
            for w in 0..mask.len() {
                let (c, p) = (cur[w], prev[w]);
                let mut bits = mask[w]
                    & match case {
                        DyadCase::InBoth => c & p,
                        DyadCase::CurrentOnly => c & !p,
                        DyadCase::PreviousOnly => !c & p,
                        DyadCase::Neither => !c & !p,
                    };
                if gp.first == gp.second {
                    // Within a group each dyad is listed once, from its lower endpoint.
                    let lo = i + 1;
                    if (w + 1) * 64 <= lo {
                        bits = 0;
                    } else if w * 64 < lo {
                        bits &= !0u64 << (lo - w * 64);
                    }
                }
                let count = u64::from(bits.count_ones());
                if remaining < count {
                    for _ in 0..remaining {
                        bits &= bits - 1;
                    }
                    return (i, w * 64 + bits.trailing_zeros() as usize);
                }
                remaining -= count;
            }
        }
        panic!("class ({pair}, {case:?}) has fewer than {} dyads", k + 1);
    }

    pub fn current(&self) -> &Network {
        &self.current
    }

    pub fn previous(&self) -> &Network {
        &self.previous
    }

    pub fn into_current(self) -> Network {
        self.current
    }

    /// Whether dynamic properties are part of the target.
    pub fn is_conditional(&self) -> bool {
        self.conditional
    }

    pub fn counts(&self) -> &MixingCounts {
        &self.counts
    }

    pub fn persist(&self) -> &MixingCounts {
        &self.persist
    }

    pub fn prev_counts(&self) -> &MixingCounts {
        &self.prev_counts
    }

    pub fn tally(&self) -> &GroupTally {
        &self.tally
    }

    pub fn node_count(&self) -> usize {
        self.current.node_count()
    }

    pub fn properties(&self) -> Result<PropertyVector> {
        let persist = self.conditional.then_some(&self.persist);
        PropertyVector::from_counts(&self.counts, persist, &self.tally)
    }

    #[inline]
    pub fn case_of(&self, i: usize, j: usize) -> DyadCase {
        DyadCase::classify(self.current.has_edge(i, j), self.previous.has_edge(i, j))
    }

    /// Toggles dyad `(i, j)` in the current network, updating cached counts.
    pub fn toggle(&mut self, i: usize, j: usize) -> DyadCase {
        let case = apply_toggle_delta(
            &mut self.counts,
            &mut self.persist,
            &mut self.current,
            &self.previous,
            (i, j),
        )
        .1;
        match case {
            DyadCase::InBoth | DyadCase::CurrentOnly => self.current_edges.remove(i, j),
            DyadCase::PreviousOnly | DyadCase::Neither => self.current_edges.insert(i, j),
        }
        case
    }

    /// A uniformly chosen dyad of `pair` in `case`; the class must be
    /// nonempty.
    ///
    /// Candidates are drawn uniformly from a pool containing the class
    /// (current edges, previous edges, or all dyads of the pair) and kept
    /// when they fall in the class. Classes holding under an eighth of their
    /// pool are indexed directly with [`Self::nth_dyad`] instead.
    pub fn draw_dyad<R: Rng + ?Sized>(&self, pair: usize, case: DyadCase, rng: &mut R) -> (usize, usize) {
        let size = class_size(self, pair, case);
        debug_assert!(size > 0, "drawing from an empty class");
        let roster = self.current.roster();
        let pool = match case {
            DyadCase::InBoth | DyadCase::CurrentOnly => self.current_edges.edges.len() as u64,
            DyadCase::PreviousOnly => self.previous_edges.len() as u64,
            DyadCase::Neither => self.possible[pair],
        };
        if size.saturating_mul(8) < pool {
            return self.nth_dyad(pair, case, rng.random_range(0..size));
        }
        let gp = roster.labels().pair(pair);
        loop {
            let (i, j) = match case {
                DyadCase::InBoth | DyadCase::CurrentOnly => {
                    self.current_edges.edges[rng.random_range(0..self.current_edges.edges.len())]
                }
                DyadCase::PreviousOnly => self.previous_edges[rng.random_range(0..self.previous_edges.len())],
                DyadCase::Neither => {
                    let first = roster.members(gp.first);
                    if gp.first == gp.second {
                        let x = rng.random_range(0..first.len());
                        let mut y = rng.random_range(0..first.len() - 1);
                        if y >= x {
                            y += 1;
                        }
                        (first[x], first[y])
                    } else {
                        let second = roster.members(gp.second);
                        (first[rng.random_range(0..first.len())], second[rng.random_range(0..second.len())])
                    }
                }
            };
            if roster.pair_of(i, j) == pair && self.case_of(i, j) == case {
                return (i, j);
            }
        }
    }

    /// Cached counts equal a from-scratch recomputation.
    pub fn is_consistent(&self) -> bool {
        let mut pooled = self.current_edges.edges.clone();
        pooled.sort_unstable();
        pooled == self.current.edges().collect::<Vec<_>>()
            && self.counts == mixing_counts(&self.current)
            && self.persist == persistence_counts(&self.current, &self.previous)
            && self.prev_counts == mixing_counts(&self.previous)
    }
}

/// Number of toggles taking a graph with counts `(edges, persisting)` to
/// the class reached by toggling a dyad in `case`.
#[inline]
pub(crate) fn class_moves(case: DyadCase, edges: u64, persisting: u64, prev_edges: u64, possible: u64) -> u64 {
    match case {
        DyadCase::InBoth => persisting,
        DyadCase::CurrentOnly => edges - persisting,
        DyadCase::PreviousOnly => prev_edges - persisting,
        DyadCase::Neither => possible + persisting - edges - prev_edges,
    }
}

/// Number of dyads of `pair` currently in `case`, which is also `f_fwd` for
/// any of them.
#[inline]
pub(crate) fn class_size(state: &SamplerState, pair: usize, case: DyadCase) -> u64 {
    class_moves(
        case,
        state.counts.get(pair),
        state.persist.get(pair),
        state.prev_counts.get(pair),
        state.possible[pair],
    )
}

/// `(f_fwd, f_rev)` for toggling dyad `(i, j)`: the number of toggles from
/// the current class into the proposal's class, and back.
pub fn forward_reverse_counts(state: &SamplerState, dyad: (usize, usize)) -> (u64, u64) {
    let (i, j) = dyad;
    let pair = state.current.roster().pair_of(i, j);
    let case = state.case_of(i, j);
    forward_reverse_for(state, pair, case)
}

#[inline]
pub(crate) fn forward_reverse_for(state: &SamplerState, pair: usize, case: DyadCase) -> (u64, u64) {
    let e = state.counts.get(pair);
    let p = state.persist.get(pair);
    let e_prev = state.prev_counts.get(pair);
    let possible = state.possible[pair];
    let fwd = class_moves(case, e, p, e_prev, possible);
    let (de, dp) = case.delta();
    let e2 = e.wrapping_add_signed(de);
    let p2 = p.wrapping_add_signed(dp);
    let rev = class_moves(case.toggled(), e2, p2, e_prev, possible);
    (fwd, rev)
}
