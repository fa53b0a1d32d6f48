//! Per-step sample quantiles of realized properties across replicates.

use std::io::Write;

use dccm::netcore::{properties, DynamicNetwork, Network};
use dccm::quantile::quantile;
use dccm::{Component, PropertyDistribution};

pub const BAND_HEADER: [&str; 4] = ["time", "component", "lo", "hi"];
pub const BAND_LO: f64 = 0.025;
pub const BAND_HI: f64 = 0.975;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantileBand {
    pub time: String,
    pub component: String,
    pub lo: f64,
    pub hi: f64,
}

/// Realized property vector of step `t` in `net`, conditioned on the
/// previous step or, at `t = 0`, on `seed`.
pub fn realized(net: &DynamicNetwork, t: usize, seed: Option<&Network>, with_dynamic: bool) -> dccm::Result<Vec<f64>> {
    let g = net.network(t);
    let prev = match t {
        0 => seed,
        _ => net.previous(t),
    }
    .filter(|_| with_dynamic)
    .map(|p| p.project_onto(g.roster()));
    Ok(properties(g, prev.as_ref())?.to_vec())
}

/// One band per (step, component) that the step's target defines.
pub fn quantile_bands(
    targets: &[(String, PropertyDistribution)],
    replicates: &[DynamicNetwork],
    seed: Option<&Network>,
) -> dccm::Result<Vec<QuantileBand>> {
    let mut out = Vec::new();
    for (t, (time, dist)) in targets.iter().enumerate() {
        let values = replicates
            .iter()
            .map(|r| realized(r, t, seed, dist.has_dynamic()))
            .collect::<dccm::Result<Vec<_>>>()?;
        for (k, c) in dist.components().iter().enumerate() {
            let column: Vec<f64> = values.iter().map(|v| v[k]).collect();
            out.push(QuantileBand {
                time: time.clone(),
                component: Component::name(c, dist.labels()),
                lo: quantile(&column, BAND_LO),
                hi: quantile(&column, BAND_HI),
            });
        }
    }
    Ok(out)
}

pub fn write_bands<W: Write>(w: W, bands: &[QuantileBand]) -> dccm::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(BAND_HEADER)?;
    for b in bands {
        wtr.write_record([b.time.as_str(), &b.component, &b.lo.to_string(), &b.hi.to_string()])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
