//! Metropolis–Hastings over graphs with uniform single-dyad proposals.
//!
//! The target puts mass `density(eta(g)) / |class(g)|` on each graph, so a
//! proposal `g -> g'` is accepted with probability
//! `min(1, density(eta')/density(eta) * |c|/|c'|)`. The class sizes are never
//! computed: the flow identity `|c| f(c, c') = |c'| f(c', c)` turns the
//! ratio into `f(c', c) / f(c, c')`, both of which are O(1) from the cached
//! counts (see [`super::state`]).

use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::netcore::{DyadCase, DynamicNetwork, GroupTally, Network, Roster};
use crate::sampler::distribution::PropertyDistribution;
use crate::sampler::state::{class_size, forward_reverse_for, SamplerState};

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    /// Proposals per forecast step, in units of `C(n, 2)`.
    pub sweeps: f64,
    /// Proposals for the initial network, in units of `C(n, 2)`.
    pub burn_in_sweeps: f64,
    pub seed: u64,
}

impl SamplerConfig {
    pub const DEFAULT_SWEEPS: f64 = 100.0;

    pub fn new(seed: u64) -> Self {
        SamplerConfig {
            sweeps: Self::DEFAULT_SWEEPS,
            burn_in_sweeps: Self::DEFAULT_SWEEPS,
            seed,
        }
    }

    pub fn with_sweeps(mut self, sweeps: f64) -> Self {
        self.sweeps = sweeps;
        self.burn_in_sweeps = sweeps;
        self
    }

    pub fn proposals_per_step(&self, nodes: usize) -> u64 {
        proposals(self.sweeps, nodes)
    }

    pub fn burn_in(&self, nodes: usize) -> u64 {
        proposals(self.burn_in_sweeps, nodes)
    }

    fn validate(&self) -> Result<()> {
        if !(self.sweeps >= 0.0 && self.burn_in_sweeps >= 0.0)
            || !self.sweeps.is_finite()
            || !self.burn_in_sweeps.is_finite()
        {
            return Err(Error::invalid("sweep counts must be finite and non-negative"));
        }
        Ok(())
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig::new(0)
    }
}

fn proposals(sweeps: f64, nodes: usize) -> u64 {
    let dyads = (nodes * nodes.saturating_sub(1) / 2) as f64;
    (sweeps * dyads).ceil() as u64
}

/// A distribution prepared for fast incremental evaluation on one roster.
#[derive(Clone, Debug)]
pub struct Target {
    /// `1 / M_first` per pair; 0 where the pair has no dyads.
    inv_norm: Vec<f64>,
    /// `(mean, 1 / (2 var))` per pair.
    static_part: Vec<(f64, f64)>,
    dynamic_part: Option<Vec<(f64, f64)>>,
}

impl Target {
    pub fn new(dist: &PropertyDistribution, tally: &GroupTally) -> Result<Self> {
        if dist.labels() != tally.labels() {
            return Err(Error::invalid(format!(
                "distribution labels {:?} differ from roster labels {:?}",
                dist.labels(),
                tally.labels()
            )));
        }
        let labels = dist.labels();
        let pairs = labels.pair_count();
        let inv_norm = labels
            .pairs()
            .map(|p| match tally.count(p.first) {
                0 => 0.0,
                m => 1.0 / m as f64,
            })
            .collect();
        let mv = |offset: usize| -> Vec<(f64, f64)> {
            (0..pairs)
                .map(|k| {
                    let i = offset + k;
                    (dist.mean()[i], 0.5 / dist.variance()[i])
                })
                .collect()
        };
        Ok(Target {
            inv_norm,
            static_part: mv(0),
            dynamic_part: dist.has_dynamic().then(|| mv(pairs)),
        })
    }

    pub fn has_dynamic(&self) -> bool {
        self.dynamic_part.is_some()
    }

    #[inline]
    fn delta(&self, state: &SamplerState, pair: usize, case: DyadCase) -> f64 {
        let inv = self.inv_norm[pair];
        let (de, dp) = case.delta();
        let shift = |count: u64, d: i64, (mean, half_prec): (f64, f64)| {
            let x0 = count as f64 * inv - mean;
            let x1 = (count as i64 + d) as f64 * inv - mean;
            -(x1 * x1 - x0 * x0) * half_prec
        };
        let mut delta = shift(state.counts().get(pair), de, self.static_part[pair]);
        if let Some(dynamic) = &self.dynamic_part {
            if dp != 0 {
                delta += shift(state.persist().get(pair), dp, dynamic[pair]);
            }
        }
        delta
    }

    /// Probability of accepting the toggle of dyad `(i, j)`.
    #[inline]
    pub fn acceptance(&self, state: &SamplerState, i: usize, j: usize) -> f64 {
        let pair = state.current().roster().pair_of(i, j);
        self.acceptance_for(state, pair, state.case_of(i, j))
    }

    /// Acceptance probability shared by every dyad of `pair` in `case`.
    #[inline]
    pub fn acceptance_for(&self, state: &SamplerState, pair: usize, case: DyadCase) -> f64 {
        let (fwd, rev) = forward_reverse_for(state, pair, case);
        debug_assert!(fwd > 0, "the current graph is always in its own class");
        let log_ratio = (rev as f64 / fwd as f64).ln() + self.delta(state, pair, case);
        if log_ratio >= 0.0 {
            1.0
        } else {
            log_ratio.exp()
        }
    }
}

/// Acceptance probability for toggling `dyad` under `dist`.
pub fn acceptance_probability(
    state: &SamplerState,
    dyad: (usize, usize),
    dist: &PropertyDistribution,
) -> Result<f64> {
    let target = checked_target(state, dist)?;
    let (i, j) = dyad;
    if i == j || i >= state.node_count() || j >= state.node_count() {
        return Err(Error::invalid(format!("({i}, {j}) is not a dyad of this roster")));
    }
    Ok(target.acceptance(state, i, j))
}

fn checked_target(state: &SamplerState, dist: &PropertyDistribution) -> Result<Target> {
    if dist.has_dynamic() != state.is_conditional() {
        return Err(Error::invalid(if dist.has_dynamic() {
            "dynamic target needs a previous network"
        } else {
            "static-only target used on a conditional state"
        }));
    }
    Target::new(dist, state.tally())
}

/// One proposal: draws a uniform dyad, accepts or rejects, returns whether
/// the state changed.
#[inline]
pub fn mh_step<R: Rng + ?Sized>(state: &mut SamplerState, target: &Target, rng: &mut R) -> bool {
    let n = state.node_count();
    if n < 2 {
        return false;
    }
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let a = target.acceptance(state, i, j);
    if a >= 1.0 || rng.random::<f64>() < a {
        state.toggle(i, j);
        true
    } else {
        false
    }
}

const CASES: [DyadCase; 4] = [
    DyadCase::InBoth,
    DyadCase::CurrentOnly,
    DyadCase::PreviousOnly,
    DyadCase::Neither,
];

/// Runs `proposals` steps of [`mh_step`] one at a time; returns the number accepted.
pub fn run_chain_stepwise<R: Rng + ?Sized>(
    state: &mut SamplerState,
    target: &Target,
    proposals: u64,
    rng: &mut R,
) -> u64 {
    (0..proposals).filter(|_| mh_step(state, target, rng)).count() as u64
}

/// Runs the same chain as [`run_chain_stepwise`] for `proposals` proposals,
/// simulating rejections in bulk; returns the number accepted.
///
/// A proposal's acceptance probability depends only on the dyad's group pair
/// and [`DyadCase`], and every such class holds exactly `f_fwd` dyads. So
/// between state changes the proposals form Bernoulli trials with success
/// probability `A = sum(f_fwd * accept) / C(n, 2)`. The run length before the
/// next acceptance is drawn from a geometric distribution, the accepted class
/// with probability proportional to `f_fwd * accept`, and the dyad uniformly
/// within the class. Work scales with accepted moves rather than proposals.
pub fn run_chain<R: Rng + ?Sized>(
    state: &mut SamplerState,
    target: &Target,
    proposals: u64,
    rng: &mut R,
) -> u64 {
    let n = state.node_count();
    if n < 2 {
        return 0;
    }
    let dyads = (n * (n - 1) / 2) as f64;
    let pairs = state.counts().as_slice().len();
    let mut weights = vec![0.0; pairs * CASES.len()];
    let mut remaining = proposals;
    let mut accepted = 0;
    while remaining > 0 {
        let mut total = 0.0;
        for pair in 0..pairs {
            for (c, &case) in CASES.iter().enumerate() {
                let size = class_size(state, pair, case);
                let w = if size == 0 {
                    0.0
                } else {
                    size as f64 * target.acceptance_for(state, pair, case)
                };
                weights[pair * CASES.len() + c] = w;
                total += w;
            }
        }
        if !(total > 0.0) {
            break;
        }
        let a = total / dyads;
        let rejections = if a >= 1.0 {
            0
        } else {
            let u: f64 = rng.random();
            // Float-to-int casts saturate, so vanishing `a` skips everything.
            ((1.0 - u).ln() / (-a).ln_1p()).floor() as u64
        };
        if rejections >= remaining {
            break;
        }
        remaining -= rejections + 1;
        let mut x = rng.random::<f64>() * total;
        let mut chosen = weights.len() - 1;
        for (k, &w) in weights.iter().enumerate() {
            if x < w {
                chosen = k;
                break;
            }
            x -= w;
        }
        while weights[chosen] == 0.0 {
            chosen -= 1;
        }
        let (pair, case) = (chosen / CASES.len(), CASES[chosen % CASES.len()]);
        let (i, j) = state.draw_dyad(pair, case, rng);
        state.toggle(i, j);
        accepted += 1;
    }
    accepted
}

/// Moves `start` to the target's mean counts, pair by pair, before a chain
/// runs. With `prev`, persisting edges are thinned (or restored) to the
/// dynamic mean first, then new edges are removed or added at random to
/// reach the static mean. Only the chain's starting point changes.
///
/// Without this, a transition starts with every edge persisting, far out in
/// the tail of any persistence target, and spends most of its budget
/// unwinding that.
pub fn warm_start<R: Rng + ?Sized>(
    start: &mut Network,
    prev: Option<&Network>,
    dist: &PropertyDistribution,
    rng: &mut R,
) {
    let roster = start.roster().clone();
    let tally = roster.tally();
    let labels = roster.labels();
    let pairs = labels.pair_count();
    if dist.labels() != labels {
        return;
    }
    // Per pair, dyads by case: in both, current only, previous only, neither.
    let mut by_case = vec![[Vec::new(), Vec::new(), Vec::new(), Vec::new()]; pairs];
    let n = roster.len();
    for i in 0..n {
        for j in i + 1..n {
            let in_prev = prev.is_some_and(|p| p.has_edge(i, j));
            let slot = match (start.has_edge(i, j), in_prev) {
                (true, true) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (false, false) => 3,
            };
            by_case[roster.pair_of(i, j)][slot].push((i, j));
        }
    }
    let mut adjust = |have: Vec<(usize, usize)>, spare: Vec<(usize, usize)>, want: usize, rng: &mut R| -> usize {
        if have.len() > want {
            for k in sample(rng, have.len(), have.len() - want) {
                let (i, j) = have[k];
                start.set_edge(i, j, false);
            }
            want
        } else {
            let add = (want - have.len()).min(spare.len());
            for k in sample(rng, spare.len(), add) {
                let (i, j) = spare[k];
                start.set_edge(i, j, true);
            }
            have.len() + add
        }
    };
    for (k, pair) in labels.pairs().enumerate() {
        let m = tally.count(pair.first) as f64;
        if m == 0.0 {
            continue;
        }
        let count = |mean: f64| (mean * m).round().max(0.0) as usize;
        let edges = count(dist.mean()[k]).min(tally.possible_dyads(pair) as usize);
        let [both, current, previous, neither] = std::mem::take(&mut by_case[k]);
        if dist.has_dynamic() && prev.is_some() {
            let kept = adjust(both, previous, count(dist.mean()[pairs + k]).min(edges), rng);
            adjust(current, neither, edges - kept, rng);
        } else {
            adjust([both, current].concat(), [previous, neither].concat(), edges, rng);
        }
    }
}

/// Draws the next network on `prev`'s roster, conditioned on `prev`.
pub fn sample_network<R: Rng + ?Sized>(
    prev: &Network,
    dist: &PropertyDistribution,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<Network> {
    sample_transition(prev, prev.roster(), dist, config, rng)
}

/// Draws a network on `roster` starting from `prev` projected onto it.
///
/// A dynamic `dist` conditions on the projected `prev`; a static-only one
/// (used at term boundaries) ignores persistence and only uses `prev` as the
/// chain's starting point.
pub fn sample_transition<R: Rng + ?Sized>(
    prev: &Network,
    roster: &Arc<Roster>,
    dist: &PropertyDistribution,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<Network> {
    config.validate()?;
    let mut start = prev.project_onto(roster);
    let conditioning = dist.has_dynamic().then(|| start.clone());
    warm_start(&mut start, conditioning.as_ref(), dist, rng);
    let mut state = SamplerState::new(start, conditioning.as_ref());
    let target = checked_target(&state, dist)?;
    run_chain(&mut state, &target, config.proposals_per_step(roster.len()), rng);
    Ok(state.into_current())
}

/// Draws a first network from the static target.
pub fn sample_initial_network<R: Rng + ?Sized>(
    roster: &Arc<Roster>,
    dist: &PropertyDistribution,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<Network> {
    config.validate()?;
    let mut start = Network::empty(roster.clone());
    warm_start(&mut start, None, dist, rng);
    let mut state = SamplerState::new(start, None);
    let target = checked_target(&state, dist)?;
    run_chain(&mut state, &target, config.burn_in(roster.len()), rng);
    Ok(state.into_current())
}

/// Target for one forecast step.
#[derive(Clone, Debug)]
pub struct StepTarget {
    pub time: String,
    pub roster: Arc<Roster>,
    pub dist: PropertyDistribution,
}

/// Samples one trajectory over `steps`.
///
/// Without `seed_network` the first step must be static-only and is drawn
/// with [`sample_initial_network`]. The seed network itself is not part of
/// the output.
pub fn sample_dynamic_network<R: Rng + ?Sized>(
    steps: &[StepTarget],
    seed_network: Option<&Network>,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<DynamicNetwork> {
    let mut out = DynamicNetwork::new();
    let mut prev: Option<Network> = seed_network.cloned();
    for step in steps {
        let next = match &prev {
            Some(p) => sample_transition(p, &step.roster, &step.dist, config, rng)?,
            None => sample_initial_network(&step.roster, &step.dist, config, rng)?,
        };
        out.push(step.time.clone(), next.clone());
        prev = Some(next);
    }
    Ok(out)
}

/// Independent trajectories in parallel; replicate `r` uses seed `config.seed + r`.
pub fn sample_replicates(
    steps: &[StepTarget],
    seed_network: Option<&Network>,
    config: &SamplerConfig,
    replicates: usize,
) -> Result<Vec<DynamicNetwork>> {
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(config.seed, r);
            sample_dynamic_network(steps, seed_network, config, &mut rng)
        })
        .collect()
}

pub fn replicate_rng(seed: u64, replicate: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(replicate as u64))
}
