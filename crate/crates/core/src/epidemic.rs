//! Susceptible–infected spread over sampled dynamic networks, and the two
//! contact-intervention study designs.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::netcore::{persistence_counts, LabelSet, Network, Roster};
use crate::sampler::{
    replicate_rng, sample_initial_network, sample_transition, PropertyDistribution, SamplerConfig,
    DEFAULT_VARIANCE_FLOOR,
};

pub const DEFAULT_TRANSMISSION_PROB: f64 = 0.05;

/// The single group label used by the studies.
pub const STUDY_LABEL: &str = "A";

#[derive(Clone, Debug, PartialEq)]
pub struct EpidemicState {
    roster: Arc<Roster>,
    infected: Vec<bool>,
    t: usize,
}

impl EpidemicState {
    pub fn roster(&self) -> &Arc<Roster> {
        &self.roster
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn is_infected(&self, node: usize) -> bool {
        self.infected[node]
    }

    pub fn infected_count(&self) -> usize {
        self.infected.iter().filter(|&&b| b).count()
    }

    pub fn infected_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.infected
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.roster.id(i))
    }

    /// Re-indexes onto `roster`; infected nodes absent from it are dropped.
    fn aligned_to(&self, roster: &Arc<Roster>) -> Vec<bool> {
        if Arc::ptr_eq(&self.roster, roster) || self.roster.ids() == roster.ids() {
            return self.infected.clone();
        }
        let mut out = vec![false; roster.len()];
        for id in self.infected_ids() {
            if let Some(i) = roster.index_of(id) {
                out[i] = true;
            }
        }
        out
    }
}

/// `n_seeds` distinct nodes chosen uniformly.
pub fn init_epidemic<R: Rng + ?Sized>(net: &Network, n_seeds: usize, rng: &mut R) -> Result<EpidemicState> {
    let n = net.node_count();
    if n_seeds > n {
        return Err(Error::invalid(format!("{n_seeds} seeds on a roster of {n}")));
    }
    let mut infected = vec![false; n];
    for i in sample(rng, n, n_seeds) {
        infected[i] = true;
    }
    Ok(EpidemicState {
        roster: net.roster().clone(),
        infected,
        t: 0,
    })
}

/// One synchronous step: a susceptible node with `k` infected neighbours is
/// infected with probability `1 - (1 - beta)^k`.
///
/// One uniform is drawn per node regardless of state, so runs sharing a
/// random stream are coupled: a larger `beta` never infects fewer nodes.
pub fn step_si<R: Rng + ?Sized>(state: &EpidemicState, net: &Network, beta: f64, rng: &mut R) -> EpidemicState {
    let roster = net.roster();
    let before = state.aligned_to(roster);
    let mut after = before.clone();
    let escape = 1.0 - beta;
    for (v, slot) in after.iter_mut().enumerate() {
        let u: f64 = rng.random();
        if *slot {
            continue;
        }
        let k = net.neighbors(v).filter(|&w| before[w]).count();
        if k > 0 && u < 1.0 - escape.powi(k as i32) {
            *slot = true;
        }
    }
    EpidemicState {
        roster: roster.clone(),
        infected: after,
        t: state.t + 1,
    }
}

/// Binomial variance `N p (1 - p)` with `p = mean / N`.
pub fn variance_model(mean: f64, trials: f64) -> f64 {
    if trials <= 0.0 {
        return 0.0;
    }
    let p = (mean / trials).clamp(0.0, 1.0);
    trials * p * (1.0 - p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub n_nodes: usize,
    pub n_seeds: usize,
    /// Number of networks per trajectory, including the initial one.
    pub horizon: usize,
    /// Target mean edge count at each step.
    pub edge_mean_schedule: Vec<f64>,
    /// Target fraction of the previous step's mean that persists.
    pub persistence_fraction: f64,
    pub transmission_prob: f64,
    pub replicates: usize,
    pub seed: u64,
    pub sweeps: f64,
}

impl StudyConfig {
    fn validate(&self) -> Result<()> {
        if self.n_seeds > self.n_nodes {
            return Err(Error::invalid("more seeds than nodes"));
        }
        if self.horizon == 0 || self.edge_mean_schedule.len() != self.horizon {
            return Err(Error::invalid(format!(
                "schedule has {} entries for horizon {}",
                self.edge_mean_schedule.len(),
                self.horizon
            )));
        }
        let dyads = dyads(self.n_nodes);
        if self.edge_mean_schedule.iter().any(|&m| !(0.0..=dyads).contains(&m)) {
            return Err(Error::invalid("edge means must lie in [0, C(n,2)]"));
        }
        if !(0.0..=1.0).contains(&self.persistence_fraction) {
            return Err(Error::invalid("persistence fraction must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.transmission_prob) {
            return Err(Error::invalid("transmission probability must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn roster(&self) -> Arc<Roster> {
        Arc::new(
            Roster::from_pairs((0..self.n_nodes).map(|i| (format!("n{i}"), STUDY_LABEL)))
                .expect("generated ids are distinct"),
        )
    }

    /// Per-step targets on the property scale (counts divided by `n`).
    ///
    /// Step 0 is static-only. Later steps add persistence with mean
    /// `fraction * schedule[t-1]` and binomial variance over the previous
    /// mean's edges.
    pub fn targets(&self) -> Result<Vec<PropertyDistribution>> {
        self.validate()?;
        let labels = LabelSet::new([STUDY_LABEL])?;
        let n = self.n_nodes as f64;
        let dyads = dyads(self.n_nodes);
        let f = self.persistence_fraction;
        self.edge_mean_schedule
            .iter()
            .enumerate()
            .map(|(t, &m)| {
                let mut mean = vec![m / n];
                let mut var = vec![variance_model(m, dyads) / (n * n)];
                if t > 0 {
                    let prev = self.edge_mean_schedule[t - 1];
                    mean.push(f * prev / n);
                    var.push(variance_model(f * prev, prev) / (n * n));
                }
                PropertyDistribution::new(labels.clone(), mean, var, t > 0, DEFAULT_VARIANCE_FLOOR)
            })
            .collect()
    }
}

fn dyads(n: usize) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// `horizon` evenly spaced values from `start` to `end` inclusive.
pub fn linear_schedule(start: f64, end: f64, horizon: usize) -> Vec<f64> {
    match horizon {
        0 => Vec::new(),
        1 => vec![start],
        h => (0..h)
            .map(|t| start + (end - start) * t as f64 / (h - 1) as f64)
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub t: usize,
    pub edges: usize,
    /// Edges also present at the previous step; 0 at step 0.
    pub persisting: usize,
    pub cumulative_infected: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub replicate: usize,
    pub steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn final_infected(&self) -> usize {
        self.steps.last().map_or(0, |s| s.cumulative_infected)
    }
}

/// Separate stream for the epidemic so that network draws do not depend on
/// the transmission probability.
fn epidemic_rng(seed: u64, replicate: usize) -> ChaCha8Rng {
    let mut rng = replicate_rng(seed, replicate);
    rng.set_stream(1);
    rng
}

/// All replicates of one setting, in parallel. Replicate `r` draws networks
/// from seed `seed + r`, so settings sharing `seed` use common random numbers.
pub fn run_study(config: &StudyConfig) -> Result<Vec<Trajectory>> {
    let targets = config.targets()?;
    let roster = config.roster();
    let sampler = SamplerConfig::new(config.seed).with_sweeps(config.sweeps);
    (0..config.replicates)
        .into_par_iter()
        .map(|r| run_replicate(config, &targets, &roster, &sampler, r))
        .collect()
}

fn run_replicate(
    config: &StudyConfig,
    targets: &[PropertyDistribution],
    roster: &Arc<Roster>,
    sampler: &SamplerConfig,
    replicate: usize,
) -> Result<Trajectory> {
    let mut net_rng = replicate_rng(config.seed, replicate);
    let mut si_rng = epidemic_rng(config.seed, replicate);
    let mut steps = Vec::with_capacity(config.horizon);
    let mut prev: Option<Network> = None;
    let mut state: Option<EpidemicState> = None;
    for (t, dist) in targets.iter().enumerate() {
        let net = match &prev {
            None => sample_initial_network(roster, dist, sampler, &mut net_rng)?,
            Some(p) => sample_transition(p, roster, dist, sampler, &mut net_rng)?,
        };
        let persisting = prev.as_ref().map_or(0, |p| persistence_counts(&net, p).total() as usize);
        let current = match state.take() {
            None => init_epidemic(&net, config.n_seeds, &mut si_rng)?,
            Some(s) => s,
        };
        let next = step_si(&current, &net, config.transmission_prob, &mut si_rng);
        steps.push(StepRecord {
            t,
            edges: net.edge_count(),
            persisting,
            cumulative_infected: next.infected_count(),
        });
        state = Some(next);
        prev = Some(net);
    }
    Ok(Trajectory { replicate, steps })
}

/// Edge-count ramp study: one setting per final mean, each ramping linearly
/// from `template.edge_mean_schedule[0]`.
pub fn run_study_1(template: &StudyConfig, final_means: &[f64]) -> Result<Vec<Vec<Trajectory>>> {
    let start = *template
        .edge_mean_schedule
        .first()
        .ok_or_else(|| Error::invalid("empty schedule"))?;
    final_means
        .iter()
        .map(|&end| {
            run_study(&StudyConfig {
                edge_mean_schedule: linear_schedule(start, end, template.horizon),
                ..template.clone()
            })
        })
        .collect()
}

/// Persistence sweep: one setting per persistence fraction, edge mean held
/// at `template.edge_mean_schedule[0]`.
pub fn run_study_2(template: &StudyConfig, grid: &[f64]) -> Result<Vec<Vec<Trajectory>>> {
    let mean = *template
        .edge_mean_schedule
        .first()
        .ok_or_else(|| Error::invalid("empty schedule"))?;
    grid.iter()
        .map(|&fraction| {
            run_study(&StudyConfig {
                edge_mean_schedule: vec![mean; template.horizon],
                persistence_fraction: fraction,
                ..template.clone()
            })
        })
        .collect()
}

/// Desk-scale version of the edge ramp: 200 nodes at mean degree 3.
pub fn desk_study_1() -> (StudyConfig, Vec<f64>) {
    let config = StudyConfig {
        n_nodes: 200,
        n_seeds: 5,
        horizon: 30,
        edge_mean_schedule: vec![300.0; 30],
        persistence_fraction: 0.9,
        transmission_prob: DEFAULT_TRANSMISSION_PROB,
        replicates: 20,
        seed: 20_170_601,
        sweeps: SamplerConfig::DEFAULT_SWEEPS,
    };
    let finals = (0..7).map(|k| 50.0 * k as f64).collect();
    (config, finals)
}

/// Desk-scale persistence sweep: 200 nodes at mean degree 1.6.
pub fn desk_study_2() -> (StudyConfig, Vec<f64>) {
    let config = StudyConfig {
        n_nodes: 200,
        n_seeds: 5,
        horizon: 30,
        edge_mean_schedule: vec![160.0; 30],
        persistence_fraction: 0.0,
        transmission_prob: DEFAULT_TRANSMISSION_PROB,
        replicates: 20,
        seed: 20_170_602,
        sweeps: SamplerConfig::DEFAULT_SWEEPS,
    };
    (config, vec![0.0, 0.25, 0.5, 0.75, 1.0])
}
