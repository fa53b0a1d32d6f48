//! The proposal-count formulas and the chain's stationary distribution
//! against brute-force oracles on small graphs.

use std::collections::BTreeMap;
use std::sync::Arc;

use dccm::netcore::{LabelSet, Network, Roster};
use dccm::sampler::{
    acceptance_probability, enumerate_target, forward_reverse_counts, run_chain, run_chain_stepwise, ClassKey,
    PropertyDistribution, SamplerState, Target,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn roster(groups: &[&str]) -> Arc<Roster> {
    let labels = LabelSet::new(["D", "R"]).unwrap();
    Arc::new(Roster::with_labels(groups.iter().enumerate().map(|(i, g)| (format!("v{i}"), *g)), labels).unwrap())
}

fn random_graph(r: &Arc<Roster>, p: f64, rng: &mut impl Rng) -> Network {
    let mut g = Network::empty(r.clone());
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            if rng.random_bool(p) {
                g.toggle(i, j);
            }
        }
    }
    g
}

/// Counts dyads whose toggle moves `from` into the class of `to_class`,
/// recomputing every class from scratch.
fn brute_force_moves(from: &Network, prev: Option<&Network>, to_class: &ClassKey) -> u64 {
    let n = from.node_count();
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            let mut g = from.clone();
            g.toggle(i, j);
            if ClassKey::of(&g, prev) == *to_class {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn forward_reverse_counts_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked_pairs = 0;
    while checked_pairs < 10_000 {
        let n = rng.random_range(2..=5);
        let groups: Vec<&str> = (0..n).map(|_| if rng.random_bool(0.5) { "D" } else { "R" }).collect();
        let r = roster(&groups);
        let cur = random_graph(&r, rng.random_range(0.0..1.0), &mut rng);
        let prev = random_graph(&r, rng.random_range(0.0..1.0), &mut rng);
        let conditional = rng.random_bool(0.8);
        let prev_opt = conditional.then_some(&prev);
        let state = SamplerState::new(cur.clone(), prev_opt);
        let own = ClassKey::of(&cur, prev_opt);
        for i in 0..n {
            for j in i + 1..n {
                let mut toggled = cur.clone();
                toggled.toggle(i, j);
                let fwd = brute_force_moves(&cur, prev_opt, &ClassKey::of(&toggled, prev_opt));
                let rev = brute_force_moves(&toggled, prev_opt, &own);
                assert_eq!(
                    forward_reverse_counts(&state, (i, j)),
                    (fwd, rev),
                    "groups {groups:?} cur {cur:?} prev {prev_opt:?} dyad ({i},{j})"
                );
            }
        }
        checked_pairs += 1;
    }
}

/// 4 nodes in two groups, conditioned on a fixed previous network. The
/// target is spread enough that several classes carry real mass.
fn four_node_instance() -> (Arc<Roster>, Network, PropertyDistribution) {
    let r = roster(&["D", "D", "R", "R"]);
    let prev = Network::from_index_edges(r.clone(), &[(0, 1), (0, 2), (2, 3)]).unwrap();
    let labels = r.labels().clone();
    let dist = PropertyDistribution::new(
        labels,
        vec![0.5, 1.0, 0.5, 0.5, 0.5, 0.5],
        vec![0.25, 0.5, 0.25, 0.15, 0.15, 0.15],
        true,
        1e-8,
    )
    .unwrap();
    (r, prev, dist)
}

fn total_variation(exact: &BTreeMap<ClassKey, f64>, counts: &BTreeMap<ClassKey, u64>, samples: u64) -> f64 {
    let mut keys: Vec<&ClassKey> = exact.keys().collect();
    keys.extend(counts.keys());
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| {
            let p = exact.get(k).copied().unwrap_or(0.0);
            let q = counts.get(k).copied().unwrap_or(0) as f64 / samples as f64;
            (p - q).abs()
        })
        .sum::<f64>()
}

fn exact_classes(r: &Arc<Roster>, prev: &Network, dist: &PropertyDistribution) -> BTreeMap<ClassKey, f64> {
    let exact: BTreeMap<ClassKey, f64> = enumerate_target(r, Some(prev), dist)
        .unwrap()
        .into_iter()
        .map(|(k, v)| (k, v.probability))
        .collect();
    let heavy = exact.values().filter(|&&p| p >= 0.05).count();
    assert!(heavy >= 5, "instance too concentrated: {heavy} classes with 5% mass: {:?}", exact.values().filter(|&&p| p > 0.01).collect::<Vec<_>>());
    exact
}

#[test]
fn bulk_chain_matches_enumeration() {
    let (r, prev, dist) = four_node_instance();
    let exact = exact_classes(&r, &prev, &dist);
    let mut state = SamplerState::new(prev.clone(), Some(&prev));
    let target = Target::new(&dist, state.tally()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let thin = 60;
    run_chain(&mut state, &target, 10_000, &mut rng);
    let samples = 100_000u64;
    let mut counts = BTreeMap::new();
    for _ in 0..samples {
        run_chain(&mut state, &target, thin, &mut rng);
        *counts.entry(ClassKey::of_state(&state)).or_insert(0) += 1;
    }
    let tv = total_variation(&exact, &counts, samples);
    assert!(tv < 0.05, "total variation {tv}");
}

#[test]
fn stepwise_chain_matches_enumeration() {
    let (r, prev, dist) = four_node_instance();
    let exact = exact_classes(&r, &prev, &dist);
    let mut state = SamplerState::new(prev.clone(), Some(&prev));
    let target = Target::new(&dist, state.tally()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    run_chain_stepwise(&mut state, &target, 10_000, &mut rng);
    let samples = 100_000u64;
    let mut counts = BTreeMap::new();
    for _ in 0..samples {
        run_chain_stepwise(&mut state, &target, 60, &mut rng);
        *counts.entry(ClassKey::of_state(&state)).or_insert(0) += 1;
    }
    let tv = total_variation(&exact, &counts, samples);
    assert!(tv < 0.05, "total variation {tv}");
}

#[test]
fn static_only_chain_matches_enumeration() {
    let r = roster(&["D", "R", "R", "D"]);
    let dist = PropertyDistribution::new(r.labels().clone(), vec![0.5, 1.0, 0.5], vec![0.3, 0.5, 0.3], false, 1e-8)
        .unwrap();
    let exact: BTreeMap<ClassKey, f64> = enumerate_target(&r, None, &dist)
        .unwrap()
        .into_iter()
        .map(|(k, v)| (k, v.probability))
        .collect();
    let mut state = SamplerState::new(Network::empty(r.clone()), None);
    let target = Target::new(&dist, state.tally()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let samples = 50_000u64;
    let mut counts = BTreeMap::new();
    for _ in 0..samples {
        run_chain(&mut state, &target, 60, &mut rng);
        *counts.entry(ClassKey::of_state(&state)).or_insert(0) += 1;
    }
    let tv = total_variation(&exact, &counts, samples);
    assert!(tv < 0.05, "total variation {tv}");
}

#[test]
fn flat_target_accepts_by_count_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let r = roster(&["D", "D", "R", "R", "D"]);
    let labels = r.labels().clone();
    let dist = PropertyDistribution::new(labels, vec![0.0; 6], vec![1e12; 6], true, 1e-8).unwrap();
    for _ in 0..50 {
        let cur = random_graph(&r, 0.5, &mut rng);
        let prev = random_graph(&r, 0.5, &mut rng);
        let state = SamplerState::new(cur, Some(&prev));
        for i in 0..5 {
            for j in i + 1..5 {
                let (fwd, rev) = forward_reverse_counts(&state, (i, j));
                let expected = (rev as f64 / fwd as f64).min(1.0);
                let a = acceptance_probability(&state, (i, j), &dist).unwrap();
                assert!((a - expected).abs() < 1e-9, "{a} vs {expected}");
            }
        }
    }
}

/// Every class of a small instance is visited, so the chain reaches every
/// graph class from the empty graph.
#[test]
fn chain_reaches_every_class() {
    let r = roster(&["D", "R", "D", "R"]);
    let prev = Network::from_index_edges(r.clone(), &[(0, 1), (2, 3)]).unwrap();
    let dist =
        PropertyDistribution::new(r.labels().clone(), vec![0.5, 1.0, 0.5, 0.5, 0.5, 0.5], vec![50.0; 6], true, 1e-8)
            .unwrap();
    let all: Vec<ClassKey> = enumerate_target(&r, Some(&prev), &dist).unwrap().into_keys().collect();
    let mut state = SamplerState::new(Network::empty(r.clone()), Some(&prev));
    let target = Target::new(&dist, state.tally()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..20_000 {
        run_chain(&mut state, &target, 6, &mut rng);
        seen.insert(ClassKey::of_state(&state));
    }
    assert_eq!(seen.len(), all.len());
}
