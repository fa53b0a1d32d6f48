use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use dccm::epidemic::{desk_study_1, desk_study_2, run_study_1, run_study_2, Trajectory};
use dccm::forecast::{build_property_distributions, fit_seasonal_arma, forecast, ForecastResult};
use dccm::ingest::surrogate::{generate_surrogate, SurrogateConfig};
use dccm::ingest::{
    build_monthly_networks, covariate_rows, load_bill_records, load_calendar, load_monthly_rosters,
    network_series, passage_covariates, term_breaks, write_bill_records, write_calendar, write_monthly_rosters,
    write_passage_covariates, write_replicate_covariates, TermCalendar, YearMonth,
};
use dccm::io::{
    build_rosters, read_distributions, read_dynamic_network, read_replicate_edges, read_rosters, read_series,
    write_distributions, write_edges, write_replicate_edges, write_rosters, write_series, write_trajectories,
};
use dccm::netcore::gof::DEFAULT_TAU;
use dccm::netcore::{alternating_k_stars, k_stars, triangles, DynamicNetwork, Network};
use dccm::sampler::{sample_replicates, StepTarget, DEFAULT_VARIANCE_FLOOR};
use dccm::{Component, ComponentKind, LabelSet, PropertyDistribution, Roster, SamplerConfig};

use crate::bands::{quantile_bands, write_bands};
use crate::output::write_atomic;
use crate::scenario::ScenarioSpec;
use crate::{
    CovariatesArgs, EpidemicArgs, ForecastArgs, GenerateArgs, IngestArgs, ScenarioArgs, StatsArgs, SurrogateArgs,
};

pub const PROPERTIES_FILE: &str = "properties.csv";
pub const GOF_FILE: &str = "gof.csv";
pub const DISTRIBUTIONS_FILE: &str = "distributions.csv";
pub const NETWORKS_FILE: &str = "networks.csv";
pub const ROSTERS_FILE: &str = "rosters.csv";
pub const BANDS_FILE: &str = "bands.csv";
pub const TRAJECTORIES_FILE: &str = "trajectories.csv";
pub const TOTALS_FILE: &str = "totals.csv";
pub const COVARIATES_FILE: &str = "covariates.csv";
pub const EDGES_FILE: &str = "edges.csv";
pub const PASSAGE_FILE: &str = "passage.csv";
pub const BILLS_FILE: &str = "bills.csv";
pub const MONTHLY_ROSTERS_FILE: &str = "monthly_rosters.csv";
pub const CALENDAR_FILE: &str = "calendar.csv";

fn breaks_for(net: &DynamicNetwork, calendar: Option<&Path>) -> Result<Vec<bool>> {
    match calendar {
        Some(path) => Ok(term_breaks(net, &load_calendar(path)?).context("network times must be YYYY-MM months")?),
        None => Ok(vec![false; net.len()]),
    }
}

pub fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let net = read_dynamic_network(&args.input, &args.roster)?;
    let breaks = breaks_for(&net, args.calendar.as_deref())?;
    let table = network_series(&net, &breaks)?;
    write_atomic(&args.out_dir, PROPERTIES_FILE, |w| write_series(w, &table))?;
    write_atomic(&args.out_dir, GOF_FILE, |w| write_gof(w, &net))?;
    Ok(())
}

pub fn write_gof<W: Write>(w: W, net: &DynamicNetwork) -> dccm::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["time", "triangles", "two_stars", "three_stars", "alternating_k_stars"])?;
    for (time, g) in net.iter() {
        wtr.write_record([
            time.to_string(),
            triangles(g).to_string(),
            k_stars(g, 2)?.to_string(),
            k_stars(g, 3)?.to_string(),
            alternating_k_stars(g, DEFAULT_TAU)?.to_string(),
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Labels for the `horizon` steps after `last`: successive months when
/// `last` is a month, successive integers when it is an integer.
fn future_times(last: &str, horizon: usize) -> Result<Vec<String>> {
    if let Ok(m) = last.parse::<YearMonth>() {
        return Ok((1..=horizon as i64).map(|h| m.plus(h).to_string()).collect());
    }
    if let Ok(t) = last.parse::<i64>() {
        return Ok((1..=horizon as i64).map(|h| (t + h).to_string()).collect());
    }
    bail!("cannot extend time `{last}`: expected YYYY-MM or an integer")
}

pub fn cmd_forecast(args: &ForecastArgs) -> Result<()> {
    if args.horizon == 0 {
        bail!("--horizon must be positive");
    }
    let table = read_series(&args.input)?;
    let last = table.times.last().ok_or_else(|| anyhow!("{}: no rows", args.input.display()))?;
    let times = future_times(last, args.horizon)?;
    let term_starts = match &args.calendar {
        Some(path) => {
            let cal = load_calendar(path)?;
            times
                .iter()
                .map(|t| t.parse::<YearMonth>().map(|m| cal.is_term_start(m)))
                .collect::<dccm::Result<Vec<_>>>()
                .context("calendar given but series times are not months")?
        }
        None => Vec::new(),
    };
    let labels = &table.labels;
    let mut components = Component::all(labels, false);
    let dynamic = Component::all(labels, true)[labels.pair_count()..].to_vec();
    if dynamic.iter().all(|c| table.get(*c).is_some_and(|s| s.observed_count() > 0)) {
        components.extend(dynamic);
    } else {
        log::warn!("dynamic series missing or fully masked; forecasting static components only");
    }
    let results = components
        .iter()
        .map(|&c| {
            let name = c.name(labels);
            let series = table.get(c).ok_or_else(|| anyhow!("series lacks component `{name}`"))?;
            let order = match c.kind {
                ComponentKind::Static => args.order,
                ComponentKind::Dynamic => args.dynamic_order,
            };
            let model = fit_seasonal_arma(series, order).with_context(|| format!("fitting `{name}`"))?;
            log::info!("{name}: {model:?}");
            forecast(&model, series, args.horizon).with_context(|| format!("forecasting `{name}`"))
        })
        .collect::<Result<Vec<ForecastResult>>>()?;
    let dists = build_property_distributions(labels, &results, args.coverage, &term_starts, DEFAULT_VARIANCE_FLOOR)?;
    let steps: Vec<(String, PropertyDistribution)> = times.into_iter().zip(dists).collect();
    write_atomic(&args.out_dir, DISTRIBUTIONS_FILE, |w| write_distributions(w, &steps))?;
    Ok(())
}

fn roster_on(nodes: &[(String, String)], labels: &LabelSet) -> Result<Arc<Roster>> {
    Ok(Arc::new(Roster::with_labels(nodes.iter().cloned(), labels.clone())?))
}

/// One roster per target step, on the targets' label set.
fn step_rosters(args: &GenerateArgs, targets: &[(String, PropertyDistribution)], labels: &LabelSet) -> Result<Vec<Arc<Roster>>> {
    let schedule = read_rosters(&args.roster)?;
    let find = |time: &str| schedule.iter().find(|(t, _)| t == time).map(|(_, nodes)| nodes);
    if let Some(time) = &args.roster_time {
        let nodes = find(time).ok_or_else(|| anyhow!("{}: no roster at `{time}`", args.roster.display()))?;
        let r = roster_on(nodes, labels)?;
        return Ok(vec![r; targets.len()]);
    }
    if schedule.len() == 1 {
        let r = roster_on(&schedule[0].1, labels)?;
        return Ok(vec![r; targets.len()]);
    }
    targets
        .iter()
        .map(|(time, _)| {
            let nodes = find(time).ok_or_else(|| {
                anyhow!("{}: no roster at `{time}`; pass --roster-time to reuse one roster", args.roster.display())
            })?;
            roster_on(nodes, labels)
        })
        .collect()
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    if args.replicates == 0 {
        bail!("--replicates must be positive");
    }
    let targets = read_distributions(&args.input)?;
    let labels = targets
        .first()
        .ok_or_else(|| anyhow!("{}: no targets", args.input.display()))?
        .1
        .labels()
        .clone();
    let rosters = step_rosters(args, &targets, &labels)?;
    let seed_network: Option<Network> = match (&args.previous, &args.previous_roster) {
        (Some(e), Some(r)) => {
            let observed = read_dynamic_network(e, r)?;
            let last = observed.len().checked_sub(1).ok_or_else(|| anyhow!("{}: no networks", e.display()))?;
            Some(observed.network(last).project_onto(&rosters[0]))
        }
        _ => None,
    };
    if seed_network.is_none() && targets[0].1.has_dynamic() {
        bail!(
            "the first target `{}` has dynamic components; pass --previous and --previous-roster",
            targets[0].0
        );
    }
    let steps: Vec<StepTarget> = targets
        .iter()
        .zip(&rosters)
        .map(|((time, dist), roster)| StepTarget {
            time: time.clone(),
            roster: roster.clone(),
            dist: dist.clone(),
        })
        .collect();
    let config = SamplerConfig::new(args.seed).with_sweeps(args.sweeps);
    let replicates = sample_replicates(&steps, seed_network.as_ref(), &config, args.replicates)?;
    let bands = quantile_bands(&targets, &replicates, seed_network.as_ref())?;
    write_atomic(&args.out_dir, NETWORKS_FILE, |w| write_replicate_edges(w, &replicates))?;
    write_atomic(&args.out_dir, ROSTERS_FILE, |w| write_rosters(w, &replicates[0]))?;
    write_atomic(&args.out_dir, BANDS_FILE, |w| write_bands(w, &bands))?;
    Ok(())
}

pub fn cmd_epidemic(args: &EpidemicArgs) -> Result<()> {
    let (mut config, default_grid) = match args.study {
        1 => desk_study_1(),
        _ => desk_study_2(),
    };
    if let Some(h) = args.horizon {
        config.horizon = h;
    }
    let start = args.edges.unwrap_or(config.edge_mean_schedule[0]);
    config.edge_mean_schedule = vec![start; config.horizon];
    if let Some(n) = args.nodes {
        config.n_nodes = n;
    }
    if let Some(r) = args.replicates {
        config.replicates = r;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(b) = args.beta {
        config.transmission_prob = b;
    }
    if let Some(s) = args.sweeps {
        config.sweeps = s;
    }
    let grid = args.grid.clone().unwrap_or(default_grid);
    let settings = match args.study {
        1 => run_study_1(&config, &grid)?,
        _ => run_study_2(&config, &grid)?,
    };
    write_atomic(&args.out_dir, TRAJECTORIES_FILE, |w| write_trajectories(w, &settings))?;
    write_atomic(&args.out_dir, TOTALS_FILE, |w| write_totals(w, &grid, &settings))?;
    Ok(())
}

/// One row per setting and replicate: `setting,parameter,replicate,final_infected`.
pub fn write_totals<W: Write>(w: W, grid: &[f64], settings: &[Vec<Trajectory>]) -> dccm::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["setting", "parameter", "replicate", "final_infected"])?;
    for (s, (value, trajs)) in grid.iter().zip(settings).enumerate() {
        for t in trajs {
            wtr.write_record([s.to_string(), value.to_string(), t.replicate.to_string(), t.final_infected().to_string()])?;
        }
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn cmd_scenario(args: &ScenarioArgs) -> Result<()> {
    let mut targets = read_distributions(&args.input)?;
    let labels = targets
        .first()
        .ok_or_else(|| anyhow!("{}: no targets", args.input.display()))?
        .1
        .labels()
        .clone();
    let spec = ScenarioSpec::read(&args.scenario_file, &labels)?;
    for (time, dist) in &mut targets {
        spec.apply(dist).with_context(|| format!("at `{time}`"))?;
    }
    write_atomic(&args.out_dir, DISTRIBUTIONS_FILE, |w| write_distributions(w, &targets))?;
    Ok(())
}

pub fn cmd_covariates(args: &CovariatesArgs) -> Result<()> {
    let rosters = build_rosters(&read_rosters(&args.roster)?)?;
    let labels = rosters
        .first()
        .ok_or_else(|| anyhow!("{}: empty roster", args.roster.display()))?
        .1
        .labels()
        .clone();
    let replicates = read_replicate_edges(&args.input, &rosters, args.replicates)?;
    let rows = replicates
        .iter()
        .map(|net| Ok(covariate_rows(net, &breaks_for(net, args.calendar.as_deref())?)?))
        .collect::<Result<Vec<_>>>()?;
    write_atomic(&args.out_dir, COVARIATES_FILE, |w| write_replicate_covariates(w, &labels, &rows))?;
    Ok(())
}

pub fn cmd_ingest(args: &IngestArgs) -> Result<()> {
    let records = load_bill_records(&args.input)?;
    let rosters = load_monthly_rosters(&args.roster)?;
    let calendar: TermCalendar = load_calendar(&args.calendar)?;
    let net = build_monthly_networks(&records, &rosters, &calendar)?;
    let table = network_series(&net, &term_breaks(&net, &calendar)?)?;
    let rows = passage_covariates(&net, &records, Some(&calendar))?;
    let labels = net.network(0).roster().labels().clone();
    write_atomic(&args.out_dir, EDGES_FILE, |w| write_edges(w, &net))?;
    write_atomic(&args.out_dir, ROSTERS_FILE, |w| write_rosters(w, &net))?;
    write_atomic(&args.out_dir, PROPERTIES_FILE, |w| write_series(w, &table))?;
    write_atomic(&args.out_dir, PASSAGE_FILE, |w| write_passage_covariates(w, &labels, &rows))?;
    Ok(())
}

pub fn cmd_surrogate(args: &SurrogateArgs) -> Result<()> {
    let mut config = SurrogateConfig {
        seed: args.seed,
        ..SurrogateConfig::default()
    };
    if let Some(n) = args.senators {
        config.senators = n;
    }
    if let Some(t) = args.terms {
        config.terms = t;
    }
    if let Some(s) = args.sweeps {
        config.sweeps = s;
    }
    let s = generate_surrogate(&config)?;
    write_atomic(&args.out_dir, BILLS_FILE, |w| write_bill_records(w, &s.records))?;
    write_atomic(&args.out_dir, MONTHLY_ROSTERS_FILE, |w| write_monthly_rosters(w, &s.rosters))?;
    write_atomic(&args.out_dir, CALENDAR_FILE, |w| write_calendar(w, &s.calendar))?;
    Ok(())
}

/// Reads the replicate networks and rosters written by [`cmd_generate`].
pub fn load_generated(dir: &Path, replicates: Option<usize>) -> Result<Vec<DynamicNetwork>> {
    let rosters = build_rosters(&read_rosters(&dir.join(ROSTERS_FILE))?)?;
    Ok(read_replicate_edges(&dir.join(NETWORKS_FILE), &rosters, replicates)?)
}
