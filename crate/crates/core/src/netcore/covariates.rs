//! Whole-network covariate summaries used as inputs for outcome models.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::netcore::network::{GroupTally, Network};

pub const EIGEN_TOLERANCE: f64 = 1e-10;
pub const EIGEN_MAX_ITER: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct CovariateSummary {
    pub n_components: usize,
    pub largest_component: usize,
    pub max_eigenvector_centrality: f64,
    pub max_closeness: f64,
    pub max_betweenness: f64,
    pub group_sizes: GroupTally,
}

pub fn covariate_summary(net: &Network) -> Result<CovariateSummary> {
    if net.node_count() == 0 {
        return Err(Error::EmptyRoster);
    }
    let comps = components(net);
    let largest = comps.iter().map(Vec::len).max().unwrap_or(0);
    let max_of = |v: Vec<f64>| v.into_iter().fold(0.0_f64, f64::max);
    Ok(CovariateSummary {
        n_components: comps.len(),
        largest_component: largest,
        max_eigenvector_centrality: max_of(eigenvector_centrality(net)),
        max_closeness: max_of(closeness_centrality(net)),
        max_betweenness: max_of(betweenness_centrality(net)),
        group_sizes: net.roster().tally(),
    })
}

/// Connected components as node lists, in order of their smallest node.
pub fn components(net: &Network) -> Vec<Vec<usize>> {
    let n = net.node_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for w in net.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Eigenvector centrality on the largest component (first one on ties),
/// unit Euclidean norm; every other node, and isolated nodes, get 0.
///
/// Power iteration runs on `A + I`, which has the same leading eigenvector
/// as `A` but does not oscillate on bipartite components.
pub fn eigenvector_centrality(net: &Network) -> Vec<f64> {
    let n = net.node_count();
    let mut out = vec![0.0; n];
    let comps = components(net);
    let Some(comp) = comps.iter().reduce(|best, c| if c.len() > best.len() { c } else { best }) else {
        return out;
    };
    if comp.len() < 2 {
        return out;
    }
    let mut x = vec![0.0; n];
    for &v in comp {
        x[v] = 1.0 / (comp.len() as f64).sqrt();
    }
    let mut next = vec![0.0; n];
    for _ in 0..EIGEN_MAX_ITER {
        for &v in comp {
            next[v] = x[v] + net.neighbors(v).map(|w| x[w]).sum::<f64>();
        }
        let norm = comp.iter().map(|&v| next[v] * next[v]).sum::<f64>().sqrt();
        let mut diff = 0.0_f64;
        for &v in comp {
            next[v] /= norm;
            diff = diff.max((next[v] - x[v]).abs());
        }
        std::mem::swap(&mut x, &mut next);
        if diff < EIGEN_TOLERANCE {
            break;
        }
    }
    for &v in comp {
        out[v] = x[v];
    }
    out
}

fn bfs_distances(net: &Network, source: usize, dist: &mut [usize]) {
    dist.fill(usize::MAX);
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for w in net.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
}

/// Closeness with the Wasserman–Faust correction for disconnected graphs:
/// `((r-1)/(n-1)) * ((r-1)/sum_d)` where `r` is the number of nodes
/// reachable from the node (itself included). Isolated nodes get 0.
pub fn closeness_centrality(net: &Network) -> Vec<f64> {
    let n = net.node_count();
    let mut dist = vec![0; n];
    (0..n)
        .map(|v| {
            bfs_distances(net, v, &mut dist);
            let (reach, total) = dist
                .iter()
                .filter(|&&d| d != usize::MAX)
                .fold((0usize, 0usize), |(r, s), &d| (r + 1, s + d));
            if total == 0 || n < 2 {
                0.0
            } else {
                let r = (reach - 1) as f64;
                (r / (n - 1) as f64) * (r / total as f64)
            }
        })
        .collect()
}

/// Unnormalized betweenness (Brandes), each unordered pair counted once.
pub fn betweenness_centrality(net: &Network) -> Vec<f64> {
    let n = net.node_count();
    let mut bc = vec![0.0; n];
    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0_f64; n];
    let mut dist = vec![-1_i64; n];
    let mut delta = vec![0.0_f64; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        stack.clear();
        for p in preds.iter_mut() {
            p.clear();
        }
        sigma.fill(0.0);
        dist.fill(-1);
        delta.fill(0.0);
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for w in net.neighbors(v) {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    bc.iter_mut().for_each(|b| *b /= 2.0);
    bc
}
