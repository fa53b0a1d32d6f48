//! Goodness-of-fit statistics: triangles, k-stars and alternating k-stars.

use crate::error::{Error, Result};
use crate::netcore::network::Network;

/// Default geometric decay for [`alternating_k_stars`]. Conventional choice;
/// callers studying a specific model should pass their own.
pub const DEFAULT_TAU: f64 = 2.0;

/// Number of triangles, each unordered node triple counted once.
///
/// Counting over ordered triples gives exactly six times this value.
pub fn triangles(net: &Network) -> u64 {
    let n = net.node_count();
    let mut total = 0u64;
    for i in 0..n {
        let ri = net.row(i);
        for j in net.neighbors(i).filter(|&j| j > i) {
            let rj = net.row(j);
            // Common neighbors k > j.
            let first_word = (j + 1) / 64;
            for w in first_word..ri.len() {
                let mut both = ri[w] & rj[w];
                if w == first_word {
                    let shift = (j + 1) % 64;
                    both &= !0u64 << shift;
                }
                total += both.count_ones() as u64;
            }
        }
    }
    total
}

/// `sum_v C(deg(v), k)`. Zero for `k` larger than every degree.
pub fn k_stars(net: &Network, k: usize) -> Result<u128> {
    if k == 0 {
        return Err(Error::invalid("k-stars need k >= 1"));
    }
    let mut total: u128 = 0;
    for i in 0..net.node_count() {
        total = total
            .checked_add(binomial(net.degree(i) as u64, k as u64))
            .ok_or_else(|| Error::invalid("k-star count overflows u128"))?;
    }
    Ok(total)
}

/// Alternating k-star statistic `sum_{i=2}^{n-1} (-1)^i S_i / tau^(i-2)`.
///
/// Evaluated per node through the binomial identity
/// `sum_{i>=2} C(d,i) (-1/tau)^i = (1 - 1/tau)^d - 1 + d/tau`, which avoids
/// the catastrophic cancellation of summing huge star counts directly.
/// Since every degree is at most `n - 1` the identity covers the same terms.
pub fn alternating_k_stars(net: &Network, tau: f64) -> Result<f64> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::invalid(format!("tau must be positive, got {tau}")));
    }
    let r = 1.0 - 1.0 / tau;
    let total: f64 = net
        .degrees()
        .into_iter()
        .map(|d| {
            let d_f = d as f64;
            tau * tau * (r.powi(d as i32) - 1.0 + d_f / tau)
        })
        .sum();
    Ok(total)
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // Exact at every step: acc * (n - i) is divisible by (i + 1).
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
