//! Synthetic two-party legislature with Senate-like sizes, for exercising
//! the pipeline when real bill data is unavailable.
//!
//! Monthly target edge counts per party pair follow a yearly cycle with
//! multiplicative AR(1) noise. A fixed share of each month's edges persists
//! from the previous month, except at term starts, where part of the roster
//! is replaced and the network is drawn without a persistence target.
//! Networks are drawn with the congruence-class sampler and then split into
//! bills, one per sponsor.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::epidemic::variance_model;
use crate::error::{Error, Result};
use crate::ingest::{BillRecord, MonthlyRosters, TermCalendar, YearMonth};
use crate::netcore::{mixing_counts, DynamicNetwork, LabelSet, Network, Roster};
use crate::sampler::{
    sample_initial_network, sample_transition, PropertyDistribution, SamplerConfig, DEFAULT_VARIANCE_FLOOR,
};

#[derive(Clone, Debug)]
pub struct SurrogateConfig {
    pub senators: usize,
    pub first_month: YearMonth,
    pub first_term: u32,
    pub terms: usize,
    pub months_per_term: i64,
    /// Seats that change hands at each term start after the first.
    pub turnover: usize,
    /// Mean edge counts for D–D, D–R and R–R.
    pub mean_counts: [f64; 3],
    /// Relative amplitude of the yearly cycle.
    pub seasonal_amplitude: f64,
    pub ar: f64,
    /// Innovation sd of the log-scale AR(1) noise.
    pub noise_sd: f64,
    /// Expected share of the previous month's edges that persist.
    pub persistence: f64,
    pub seed: u64,
    pub sweeps: f64,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig {
            senators: 100,
            first_month: YearMonth::new(2003, 1).expect("valid month"),
            first_term: 108,
            terms: 7,
            months_per_term: 24,
            turnover: 12,
            mean_counts: [120.0, 250.0, 120.0],
            seasonal_amplitude: 0.3,
            ar: 0.6,
            noise_sd: 0.1,
            persistence: 0.4,
            seed: 2003,
            sweeps: SamplerConfig::DEFAULT_SWEEPS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Surrogate {
    pub calendar: TermCalendar,
    pub rosters: MonthlyRosters,
    pub records: Vec<BillRecord>,
    pub networks: DynamicNetwork,
}

pub fn generate_surrogate(config: &SurrogateConfig) -> Result<Surrogate> {
    if config.senators < 4 {
        return Err(Error::invalid("surrogate needs at least 4 senators"));
    }
    if config.turnover > config.senators {
        return Err(Error::invalid("turnover exceeds the number of seats"));
    }
    if !(0.0..=1.0).contains(&config.persistence) {
        return Err(Error::invalid("persistence must lie in [0, 1]"));
    }
    let calendar = TermCalendar::regular(config.first_term, config.first_month, config.months_per_term, config.terms)?;
    let labels = LabelSet::new(["D", "R"])?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sampler = SamplerConfig::new(config.seed).with_sweeps(config.sweeps);

    let mut members: Vec<(String, String)> = (0..config.senators)
        .map(|k| {
            let party = if k % 2 == 0 { "D" } else { "R" };
            (format!("S{:03}", k + 1), party.to_string())
        })
        .collect();
    let mut next_id = config.senators;
    let mut new_member = |rng: &mut ChaCha8Rng| {
        next_id += 1;
        let party = if rng.random::<bool>() { "D" } else { "R" };
        (format!("S{next_id:03}"), party.to_string())
    };

    let mut rosters = MonthlyRosters::new();
    let mut networks = DynamicNetwork::new();
    let mut records = Vec::new();
    let mut noise = [0.0f64; 3];
    let mut prev: Option<Network> = None;
    let mut roster = Arc::new(Roster::with_labels(members.iter().cloned(), labels.clone())?);
    for month in calendar.months() {
        let term_start = calendar.is_term_start(month);
        if term_start && month != calendar.first_month() {
            let mut seats: Vec<usize> = (0..members.len()).collect();
            seats.shuffle(&mut rng);
            for &s in &seats[..config.turnover] {
                members[s] = new_member(&mut rng);
            }
            roster = Arc::new(Roster::with_labels(members.iter().cloned(), labels.clone())?);
        }
        let tally = roster.tally();
        let phase = 2.0 * std::f64::consts::PI * f64::from(month.month() - 1) / 12.0;
        let season = 1.0 + config.seasonal_amplitude * phase.cos();
        let mut mean = Vec::with_capacity(6);
        let mut var = Vec::with_capacity(6);
        let mut dyn_mean = Vec::with_capacity(3);
        let mut dyn_var = Vec::with_capacity(3);
        let prev_counts = prev.as_ref().map(|p| mixing_counts(&p.project_onto(&roster)));
        for (k, pair) in labels.pairs().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            noise[k] = config.ar * noise[k] + config.noise_sd * z;
            let possible = tally.possible_dyads(pair) as f64;
            let count = (config.mean_counts[k] * season * noise[k].exp()).min(0.9 * possible);
            let m = tally.count(pair.first).max(1) as f64;
            mean.push(count / m);
            var.push(variance_model(count, possible) / (m * m));
            if let Some(pc) = &prev_counts {
                let base = (pc.get(k) as f64).min(count);
                dyn_mean.push(config.persistence * base / m);
                dyn_var.push(variance_model(config.persistence * base, base.max(1.0)) / (m * m));
            }
        }
        let has_dynamic = prev.is_some() && !term_start;
        if has_dynamic {
            mean.extend(dyn_mean);
            var.extend(dyn_var);
        }
        let dist = PropertyDistribution::new(labels.clone(), mean, var, has_dynamic, DEFAULT_VARIANCE_FLOOR)?;
        let net = match &prev {
            Some(p) => sample_transition(p, &roster, &dist, &sampler, &mut rng)?,
            None => sample_initial_network(&roster, &dist, &sampler, &mut rng)?,
        };
        records.extend(bills_for(month, &net, &mut rng));
        rosters.insert(month, members.clone());
        networks.push(month.to_string(), net.clone());
        prev = Some(net);
    }
    Ok(Surrogate {
        calendar,
        rosters,
        records,
        networks,
    })
}

/// Splits `net` into bills: each node sponsors one bill cosponsored by its
/// higher-indexed neighbors. A few solo bills are added. Passage odds rise
/// with the share of the sponsor's links that cross parties.
fn bills_for<R: Rng>(month: YearMonth, net: &Network, rng: &mut R) -> Vec<BillRecord> {
    let roster = net.roster();
    let mut out = Vec::new();
    let mut add = |sponsor: usize, cos: Vec<usize>, rng: &mut R| {
        let cross = cos.iter().filter(|&&j| roster.group(j) != roster.group(sponsor)).count();
        let p = 0.05 + 0.3 * cross as f64 / (cos.len() as f64 + 1.0);
        out.push(BillRecord {
            bill_id: format!("{month}-{:04}", out.len() + 1),
            month,
            sponsor: roster.id(sponsor).to_string(),
            cosponsors: cos.iter().map(|&j| roster.id(j).to_string()).collect(),
            passed: Some(rng.random::<f64>() < p),
        });
    };
    for i in 0..roster.len() {
        let cos: Vec<usize> = net.neighbors(i).filter(|&j| j > i).collect();
        if !cos.is_empty() {
            add(i, cos, rng);
        }
    }
    for _ in 0..rng.random_range(0..5) {
        let s = rng.random_range(0..roster.len());
        add(s, Vec::new(), rng);
    }
    out
}
