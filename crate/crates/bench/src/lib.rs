//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use dccm::forecast::MaskedSeries;
use dccm::netcore::{LabelSet, Network, Roster};
use dccm::PropertyDistribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` nodes split evenly between `D` and `R`, each dyad present with
/// probability `p`.
pub fn two_party_graph(n: usize, p: f64, seed: u64) -> Network {
    let roster = Arc::new(
        Roster::from_pairs((0..n).map(|i| (format!("v{i}"), if i % 2 == 0 { "D" } else { "R" })))
            .expect("distinct ids"),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Network::empty(roster);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                g.toggle(i, j);
            }
        }
    }
    g
}

/// Target centred on the properties of `g` with half its edges persisting.
pub fn target_near(g: &Network) -> PropertyDistribution {
    let labels = LabelSet::new(["D", "R"]).expect("two labels");
    let stat = dccm::netcore::static_properties(g).expect("both groups present");
    let mut mean = stat.clone();
    mean.extend(stat.iter().map(|v| 0.5 * v));
    let var = mean.iter().map(|m| (0.1 * m).max(0.01)).collect();
    PropertyDistribution::new(labels, mean, var, true, 1e-8).expect("valid target")
}

/// AR(1) with coefficient 0.7 and unit innovations.
pub fn ar1_series(n: usize, seed: u64) -> MaskedSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    let values = (0..n)
        .map(|_| {
            let e: f64 = rng.random::<f64>() - 0.5;
            x = 0.7 * x + e * 12f64.sqrt();
            x
        })
        .collect();
    MaskedSeries::observed(values)
}
