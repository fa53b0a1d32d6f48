//! CSV formats shared by the pipeline stages.
//!
//! Every file carries a mandatory header row. Readers report the file path
//! and 1-based line number on malformed input. Floats are written in their
//! shortest round-trip form, so write → read is lossless.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use csv::StringRecord;

use crate::component::Component;
use crate::epidemic::Trajectory;
use crate::error::{Error, Result};
use crate::forecast::MaskedSeries;
use crate::netcore::{DynamicNetwork, LabelSet, Network, Roster};
use crate::sampler::PropertyDistribution;

pub const EDGE_HEADER: [&str; 3] = ["time", "node_a", "node_b"];
pub const ROSTER_HEADER: [&str; 3] = ["time", "node_id", "group"];
pub const REPLICATE_EDGE_HEADER: [&str; 4] = ["replicate", "time", "node_a", "node_b"];
pub const SERIES_HEADER: [&str; 4] = ["time", "component", "value", "mask"];
pub const DISTRIBUTION_HEADER: [&str; 5] = ["time", "component", "mean", "variance", "has_dynamic"];
pub const TRAJECTORY_HEADER: [&str; 6] = ["setting", "replicate", "t", "edges", "persisting", "cumulative_infected"];

/// Data rows of a CSV file with their line numbers.
pub struct Rows {
    pub source: String,
    pub rows: Vec<(u64, StringRecord)>,
}

impl Rows {
    pub fn error(&self, line: u64, message: impl Into<String>) -> Error {
        Error::parse(&self.source, line, message)
    }

    /// Parses field `col` of a row.
    pub fn field<T: std::str::FromStr>(&self, line: u64, rec: &StringRecord, col: usize, what: &str) -> Result<T> {
        let raw = rec.get(col).unwrap_or("");
        raw.parse()
            .map_err(|_| self.error(line, format!("invalid {what} `{raw}`")))
    }
}

pub fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a CSV whose header must equal one of `headers`; returns the index
/// of the matched header with the rows.
pub fn read_rows<R: Read>(reader: R, source: &str, headers: &[&[&str]]) -> Result<(usize, Rows)> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let which = headers
        .iter()
        .position(|h| h.len() == found.len() && h.iter().zip(&found).all(|(a, b)| a == b))
        .ok_or_else(|| {
            let wanted: Vec<String> = headers.iter().map(|h| h.join(",")).collect();
            Error::parse(source, 1, format!("expected header {}, found `{}`", wanted.join(" or "), found.join(",")))
        })?;
    let width = headers[which].len();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != width {
            return Err(Error::parse(source, line, format!("expected {width} fields, found {}", rec.len())));
        }
        rows.push((line, rec));
    }
    Ok((
        which,
        Rows {
            source: source.to_string(),
            rows,
        },
    ))
}

pub fn read_file_rows(path: &Path, headers: &[&[&str]]) -> Result<(usize, Rows)> {
    read_rows(open(path)?, &path.display().to_string(), headers)
}

fn writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header)?;
    Ok(wtr)
}

fn finish<W: Write>(wtr: csv::Writer<W>) -> Result<()> {
    wtr.into_inner()
        .map_err(|e| Error::Csv(csv::Error::from(e.into_error())))?
        .flush()
        .map_err(|e| Error::Csv(csv::Error::from(e)))
}

/// Node lists per time step, in order of first appearance.
pub type RosterSchedule = Vec<(String, Vec<(String, String)>)>;

pub fn parse_roster_rows(rows: &Rows) -> Result<RosterSchedule> {
    let mut order: Vec<(String, Vec<(String, String)>)> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    for (line, rec) in &rows.rows {
        let (time, id, group) = (&rec[0], &rec[1], &rec[2]);
        if time.is_empty() || id.is_empty() {
            return Err(rows.error(*line, "empty time or node id"));
        }
        let k = *slot.entry(time.to_string()).or_insert_with(|| {
            order.push((time.to_string(), Vec::new()));
            order.len() - 1
        });
        order[k].1.push((id.to_string(), group.to_string()));
    }
    Ok(order)
}

pub fn read_rosters(path: &Path) -> Result<RosterSchedule> {
    let (_, rows) = read_file_rows(path, &[&ROSTER_HEADER])?;
    parse_roster_rows(&rows)
}

/// Builds rosters over the union of all labels, so every step shares one
/// group-pair layout.
pub fn build_rosters(schedule: &RosterSchedule) -> Result<Vec<(String, Arc<Roster>)>> {
    let labels = LabelSet::new(
        schedule
            .iter()
            .flat_map(|(_, nodes)| nodes.iter().map(|(_, g)| g.clone()))
            .collect::<BTreeSet<_>>(),
    )?;
    schedule
        .iter()
        .map(|(time, nodes)| {
            Roster::with_labels(nodes.iter().cloned(), labels.clone()).map(|r| (time.clone(), Arc::new(r)))
        })
        .collect()
}

pub fn write_rosters<W: Write>(w: W, net: &DynamicNetwork) -> Result<()> {
    let mut wtr = writer(w, &ROSTER_HEADER)?;
    for (time, g) in net.iter() {
        let roster = g.roster();
        for node in 0..roster.len() {
            wtr.write_record([time, roster.id(node), roster.group_label(node)])?;
        }
    }
    finish(wtr)
}

pub fn write_edges<W: Write>(w: W, net: &DynamicNetwork) -> Result<()> {
    let mut wtr = writer(w, &EDGE_HEADER)?;
    for (time, g) in net.iter() {
        for (a, b) in g.edge_ids() {
            wtr.write_record([time, a, b])?;
        }
    }
    finish(wtr)
}

fn time_index(rosters: &[(String, Arc<Roster>)]) -> HashMap<&str, usize> {
    rosters.iter().enumerate().map(|(i, (t, _))| (t.as_str(), i)).collect()
}

/// Groups `(time, a, b)` edges onto the roster steps; times not in the
/// roster are an error.
fn assemble_networks<'a, I>(rosters: &[(String, Arc<Roster>)], rows: &Rows, edges: I) -> Result<DynamicNetwork>
where
    I: IntoIterator<Item = (u64, &'a str, &'a str, &'a str)>,
{
    let index = time_index(rosters);
    let mut nets: Vec<Network> = rosters.iter().map(|(_, r)| Network::empty(r.clone())).collect();
    for (line, time, a, b) in edges {
        let t = *index
            .get(time)
            .ok_or_else(|| rows.error(line, format!("time `{time}` not in roster")))?;
        let roster = nets[t].roster().clone();
        let (i, j) = match (roster.index_of(a), roster.index_of(b)) {
            (Some(i), Some(j)) => (i, j),
            _ => return Err(rows.error(line, format!("edge ({a}, {b}) has an endpoint outside the roster at `{time}`"))),
        };
        if i == j {
            return Err(rows.error(line, format!("self-loop on `{a}`")));
        }
        nets[t].set_edge(i, j, true);
    }
    Ok(rosters.iter().map(|(t, _)| t.clone()).zip(nets).collect())
}

pub fn read_edges(path: &Path, rosters: &[(String, Arc<Roster>)]) -> Result<DynamicNetwork> {
    let (_, rows) = read_file_rows(path, &[&EDGE_HEADER])?;
    let edges = rows.rows.iter().map(|(l, r)| (*l, &r[0], &r[1], &r[2]));
    assemble_networks(rosters, &rows, edges)
}

/// Edge list plus roster file → one network per roster time step.
pub fn read_dynamic_network(edges: &Path, rosters: &Path) -> Result<DynamicNetwork> {
    let rosters = build_rosters(&read_rosters(rosters)?)?;
    read_edges(edges, &rosters)
}

pub fn write_replicate_edges<W: Write>(w: W, replicates: &[DynamicNetwork]) -> Result<()> {
    let mut wtr = writer(w, &REPLICATE_EDGE_HEADER)?;
    for (r, net) in replicates.iter().enumerate() {
        let r = r.to_string();
        for (time, g) in net.iter() {
            for (a, b) in g.edge_ids() {
                wtr.write_record([r.as_str(), time, a, b])?;
            }
        }
    }
    finish(wtr)
}

/// Long-format replicate edges. `replicates` fixes the count; otherwise it
/// is one past the largest index present.
pub fn read_replicate_edges(
    path: &Path,
    rosters: &[(String, Arc<Roster>)],
    replicates: Option<usize>,
) -> Result<Vec<DynamicNetwork>> {
    let (_, rows) = read_file_rows(path, &[&REPLICATE_EDGE_HEADER])?;
    let mut by_rep: Vec<Vec<(u64, &str, &str, &str)>> = Vec::new();
    for (line, rec) in &rows.rows {
        let r: usize = rows.field(*line, rec, 0, "replicate")?;
        if replicates.is_some_and(|n| r >= n) {
            return Err(rows.error(*line, format!("replicate {r} out of range")));
        }
        if by_rep.len() <= r {
            by_rep.resize_with(r + 1, Vec::new);
        }
        by_rep[r].push((*line, &rec[1], &rec[2], &rec[3]));
    }
    if let Some(n) = replicates {
        by_rep.resize_with(n, Vec::new);
    }
    by_rep
        .into_iter()
        .map(|edges| assemble_networks(rosters, &rows, edges))
        .collect()
}

/// Labels named by component strings such as `static:D:R`.
fn labels_from_components<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<LabelSet> {
    let mut labels = BTreeSet::new();
    for name in names {
        let parts: Vec<&str> = name.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!("malformed component `{name}`")));
        }
        labels.insert(parts[1].to_string());
        labels.insert(parts[2].to_string());
    }
    LabelSet::new(labels)
}

/// Per-component series over a shared time axis.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTable {
    pub labels: LabelSet,
    pub times: Vec<String>,
    pub series: Vec<(Component, MaskedSeries)>,
}

impl SeriesTable {
    pub fn get(&self, c: Component) -> Option<&MaskedSeries> {
        self.series.iter().find(|(k, _)| *k == c).map(|(_, s)| s)
    }
}

fn parse_mask(raw: &str) -> Option<bool> {
    match raw {
        "1" | "true" => Some(true),
        "0" | "false" | "" => Some(false),
        _ => None,
    }
}

pub fn write_series<W: Write>(w: W, table: &SeriesTable) -> Result<()> {
    let mut wtr = writer(w, &SERIES_HEADER)?;
    for (t, time) in table.times.iter().enumerate() {
        for (c, s) in &table.series {
            let name = c.name(&table.labels);
            match s.value(t) {
                Some(v) => wtr.write_record([time.as_str(), &name, &v.to_string(), "0"])?,
                None => wtr.write_record([time.as_str(), &name, "", "1"])?,
            }
        }
    }
    finish(wtr)
}

/// Rows absent for a (time, component) are read as masked.
pub fn read_series(path: &Path) -> Result<SeriesTable> {
    let (_, rows) = read_file_rows(path, &[&SERIES_HEADER])?;
    let labels = labels_from_components(rows.rows.iter().map(|(_, r)| &r[1]))
        .map_err(|e| rows.error(2, e.to_string()))?;
    let mut times: Vec<String> = Vec::new();
    let mut time_slot: HashMap<String, usize> = HashMap::new();
    let mut cells: HashMap<(usize, Component), Option<f64>> = HashMap::new();
    let mut components = BTreeSet::new();
    for (line, rec) in &rows.rows {
        let t = *time_slot.entry(rec[0].to_string()).or_insert_with(|| {
            times.push(rec[0].to_string());
            times.len() - 1
        });
        let c = Component::parse(&rec[1], &labels).map_err(|e| rows.error(*line, e.to_string()))?;
        let masked = parse_mask(&rec[3]).ok_or_else(|| rows.error(*line, format!("invalid mask `{}`", &rec[3])))?;
        let value = if masked {
            None
        } else {
            let v: f64 = rows.field(*line, rec, 2, "value")?;
            if !v.is_finite() {
                return Err(rows.error(*line, "non-finite value"));
            }
            Some(v)
        };
        if cells.insert((t, c), value).is_some() {
            return Err(rows.error(*line, format!("duplicate row for `{}` at `{}`", &rec[1], &rec[0])));
        }
        components.insert(c);
    }
    let series = components
        .into_iter()
        .map(|c| {
            let s = (0..times.len()).map(|t| cells.get(&(t, c)).copied().flatten()).collect();
            (c, MaskedSeries::new(s))
        })
        .collect();
    Ok(SeriesTable { labels, times, series })
}

pub fn write_distributions<W: Write>(w: W, steps: &[(String, PropertyDistribution)]) -> Result<()> {
    let mut wtr = writer(w, &DISTRIBUTION_HEADER)?;
    for (time, d) in steps {
        let has_dynamic = if d.has_dynamic() { "true" } else { "false" };
        for (k, c) in d.components().iter().enumerate() {
            wtr.write_record([
                time.as_str(),
                &c.name(d.labels()),
                &d.mean()[k].to_string(),
                &d.variance()[k].to_string(),
                has_dynamic,
            ])?;
        }
    }
    finish(wtr)
}

/// Each time step must list exactly the static components, plus the
/// dynamic ones when its `has_dynamic` is true. Variances are taken as
/// written (no floor beyond positivity).
pub fn read_distributions(path: &Path) -> Result<Vec<(String, PropertyDistribution)>> {
    let (_, rows) = read_file_rows(path, &[&DISTRIBUTION_HEADER])?;
    let labels = labels_from_components(rows.rows.iter().map(|(_, r)| &r[1]))
        .map_err(|e| rows.error(2, e.to_string()))?;
    struct Step {
        time: String,
        line: u64,
        has_dynamic: bool,
        cells: HashMap<usize, (f64, f64)>,
    }
    let mut steps: Vec<Step> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    for (line, rec) in &rows.rows {
        let has_dynamic = match parse_mask(&rec[4]) {
            Some(b) if !rec[4].is_empty() => b,
            _ => return Err(rows.error(*line, format!("invalid has_dynamic `{}`", &rec[4]))),
        };
        let k = *slot.entry(rec[0].to_string()).or_insert_with(|| {
            steps.push(Step {
                time: rec[0].to_string(),
                line: *line,
                has_dynamic,
                cells: HashMap::new(),
            });
            steps.len() - 1
        });
        let step = &mut steps[k];
        if step.has_dynamic != has_dynamic {
            return Err(rows.error(*line, "has_dynamic differs within one time step"));
        }
        let c = Component::parse(&rec[1], &labels).map_err(|e| rows.error(*line, e.to_string()))?;
        let mean: f64 = rows.field(*line, rec, 2, "mean")?;
        let var: f64 = rows.field(*line, rec, 3, "variance")?;
        if step.cells.insert(c.index(&labels), (mean, var)).is_some() {
            return Err(rows.error(*line, format!("duplicate component `{}`", &rec[1])));
        }
    }
    steps
        .into_iter()
        .map(|s| {
            let dim = Component::all(&labels, s.has_dynamic).len();
            let mut mean = Vec::with_capacity(dim);
            let mut var = Vec::with_capacity(dim);
            for k in 0..dim {
                let (m, v) = s.cells.get(&k).ok_or_else(|| {
                    rows.error(
                        s.line,
                        format!("time `{}` lacks component `{}`", s.time, Component::from_index(k, &labels).name(&labels)),
                    )
                })?;
                mean.push(*m);
                var.push(*v);
            }
            if s.cells.len() != dim {
                return Err(rows.error(s.line, format!("time `{}` lists dynamic components but has_dynamic is false", s.time)));
            }
            let d = PropertyDistribution::new(labels.clone(), mean, var, s.has_dynamic, f64::MIN_POSITIVE)
                .map_err(|e| rows.error(s.line, e.to_string()))?;
            Ok((s.time, d))
        })
        .collect()
}

/// `setting` labels the study setting each trajectory group belongs to.
pub fn write_trajectories<W: Write>(w: W, settings: &[Vec<Trajectory>]) -> Result<()> {
    let mut wtr = writer(w, &TRAJECTORY_HEADER)?;
    for (s, trajs) in settings.iter().enumerate() {
        for traj in trajs {
            for step in &traj.steps {
                wtr.write_record([
                    s.to_string(),
                    traj.replicate.to_string(),
                    step.t.to_string(),
                    step.edges.to_string(),
                    step.persisting.to_string(),
                    step.cumulative_infected.to_string(),
                ])?;
            }
        }
    }
    finish(wtr)
}
