//! Sponsor/co-sponsor bill records to monthly networks, masked property
//! series and passage covariate tables.

mod month;
mod records;
pub mod surrogate;

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::sync::Arc;

pub use month::YearMonth;
pub use records::{
    load_bill_records, load_calendar, load_monthly_rosters, normalize_party, read_bill_records, read_calendar,
    read_monthly_rosters, write_bill_records, write_calendar, write_monthly_rosters, BillRecord, MonthlyRosters,
    Term, TermCalendar, BILL_HEADER, CALENDAR_HEADER, MONTHLY_ROSTER_HEADER,
};

use crate::component::Component;
use crate::error::{Error, Result};
use crate::forecast::MaskedSeries;
use crate::io::SeriesTable;
use crate::netcore::{covariate_summary, properties, CovariateSummary, DynamicNetwork, LabelSet, Network, Roster};

/// One network per calendar month: an edge joins each bill's sponsor to
/// each of its cosponsors, and repeated links collapse to one edge.
///
/// Every calendar month needs a roster. All rosters share the label set
/// formed by the union of parties.
pub fn build_monthly_networks(
    records: &[BillRecord],
    rosters: &MonthlyRosters,
    calendar: &TermCalendar,
) -> Result<DynamicNetwork> {
    let labels = LabelSet::new(
        rosters
            .values()
            .flat_map(|nodes| nodes.iter().map(|(_, p)| p.clone()))
            .collect::<BTreeSet<_>>(),
    )?;
    let mut nets: Vec<(YearMonth, Network)> = Vec::new();
    let mut slot: HashMap<YearMonth, usize> = HashMap::new();
    for month in calendar.months() {
        let nodes = rosters
            .get(&month)
            .ok_or_else(|| Error::invalid(format!("no roster for {month}")))?;
        let roster = Arc::new(Roster::with_labels(nodes.iter().cloned(), labels.clone())?);
        slot.insert(month, nets.len());
        nets.push((month, Network::empty(roster)));
    }
    let mut unknown = BTreeSet::new();
    for bill in records {
        let t = *slot.get(&bill.month).ok_or_else(|| {
            Error::invalid(format!("bill {} dated {} lies outside the calendar", bill.bill_id, bill.month))
        })?;
        let net = &mut nets[t].1;
        let roster = net.roster().clone();
        let Some(s) = roster.index_of(&bill.sponsor) else {
            unknown.insert(format!("{}@{}", bill.sponsor, bill.month));
            continue;
        };
        for c in &bill.cosponsors {
            match roster.index_of(c) {
                Some(j) if j != s => net.set_edge(s, j, true),
                Some(_) => {}
                None => {
                    unknown.insert(format!("{c}@{}", bill.month));
                }
            }
        }
    }
    if !unknown.is_empty() {
        return Err(Error::UnknownSenators(unknown.into_iter().collect()));
    }
    Ok(nets.into_iter().map(|(m, n)| (m.to_string(), n)).collect())
}

/// Static and dynamic property series of `net`. Dynamic values are masked
/// at step 0 and wherever `breaks[t]` holds.
pub fn network_series(net: &DynamicNetwork, breaks: &[bool]) -> Result<SeriesTable> {
    if net.is_empty() {
        return Err(Error::invalid("no networks"));
    }
    if breaks.len() != net.len() {
        return Err(Error::DimensionMismatch {
            expected: net.len(),
            actual: breaks.len(),
        });
    }
    let labels = net.network(0).roster().labels().clone();
    let components = Component::all(&labels, true);
    let mut columns = vec![MaskedSeries::default(); components.len()];
    let pairs = labels.pair_count();
    for t in 0..net.len() {
        let g = net.network(t);
        if *g.roster().labels() != labels {
            return Err(Error::invalid(format!("label set changes at `{}`", net.time(t))));
        }
        let prev = net.previous(t).filter(|_| !breaks[t]);
        let p = properties(g, prev)?;
        for (k, v) in p.static_part.iter().enumerate() {
            columns[k].push(Some(*v));
        }
        for k in 0..pairs {
            columns[pairs + k].push(p.dynamic_part.as_ref().map(|d| d[k]));
        }
    }
    Ok(SeriesTable {
        labels,
        times: net.times().map(str::to_string).collect(),
        series: components.into_iter().zip(columns).collect(),
    })
}

/// Term-start flags for each step of `net`, whose times must be months.
pub fn term_breaks(net: &DynamicNetwork, calendar: &TermCalendar) -> Result<Vec<bool>> {
    net.times()
        .map(|t| t.parse::<YearMonth>().map(|m| calendar.is_term_start(m)))
        .collect()
}

/// Monthly property series with dynamic values masked at every term start.
pub fn property_series(net: &DynamicNetwork, calendar: &TermCalendar) -> Result<SeriesTable> {
    network_series(net, &term_breaks(net, calendar)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CovariateRow {
    pub time: String,
    /// Static then dynamic components; dynamic entries are `None` where masked.
    pub eta: Vec<Option<f64>>,
    pub summary: CovariateSummary,
}

/// Property values and covariate summaries per step.
pub fn covariate_rows(net: &DynamicNetwork, breaks: &[bool]) -> Result<Vec<CovariateRow>> {
    let series = network_series(net, breaks)?;
    (0..net.len())
        .map(|t| {
            Ok(CovariateRow {
                time: net.time(t).to_string(),
                eta: series.series.iter().map(|(_, s)| s.value(t)).collect(),
                summary: covariate_summary(net.network(t))?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PassageRow {
    pub covariates: CovariateRow,
    pub introduced: usize,
    pub passed: usize,
    /// `passed / introduced`, missing for months without bills.
    pub pass_proportion: Option<f64>,
}

/// Covariates joined with the monthly share of bills that passed. Dynamic
/// components are masked at term starts when a calendar is given.
pub fn passage_covariates(
    net: &DynamicNetwork,
    records: &[BillRecord],
    calendar: Option<&TermCalendar>,
) -> Result<Vec<PassageRow>> {
    let breaks = match calendar {
        Some(c) => term_breaks(net, c)?,
        None => vec![false; net.len()],
    };
    let mut tallies: HashMap<String, (usize, usize)> = HashMap::new();
    for bill in records {
        let passed = bill
            .passed
            .ok_or_else(|| Error::invalid(format!("bill {} has no passed flag", bill.bill_id)))?;
        let e = tallies.entry(bill.month.to_string()).or_default();
        e.0 += 1;
        e.1 += usize::from(passed);
    }
    Ok(covariate_rows(net, &breaks)?
        .into_iter()
        .map(|row| {
            let (introduced, passed) = tallies.get(&row.time).copied().unwrap_or_default();
            PassageRow {
                pass_proportion: (introduced > 0).then(|| passed as f64 / introduced as f64),
                covariates: row,
                introduced,
                passed,
            }
        })
        .collect())
}

fn covariate_header(labels: &LabelSet) -> Vec<String> {
    let mut h: Vec<String> = Component::all(labels, true).iter().map(|c| c.name(labels)).collect();
    h.extend(
        ["n_components", "largest_component", "max_eigenvector_centrality", "max_closeness", "max_betweenness"]
            .map(String::from),
    );
    h.extend(labels.iter().map(|l| format!("size:{l}")));
    h
}

fn covariate_fields(row: &CovariateRow) -> Vec<String> {
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let s = &row.summary;
    let mut f: Vec<String> = row.eta.iter().map(|v| opt(*v)).collect();
    f.extend([
        s.n_components.to_string(),
        s.largest_component.to_string(),
        s.max_eigenvector_centrality.to_string(),
        s.max_closeness.to_string(),
        s.max_betweenness.to_string(),
    ]);
    f.extend(s.group_sizes.counts().iter().map(usize::to_string));
    f
}

/// `time`, the property components, the covariate summary and group sizes,
/// then `introduced,passed,pass_proportion`.
pub fn write_passage_covariates<W: Write>(w: W, labels: &LabelSet, rows: &[PassageRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["time".to_string()];
    header.extend(covariate_header(labels));
    header.extend(["introduced", "passed", "pass_proportion"].map(String::from));
    wtr.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.covariates.time.clone()];
        rec.extend(covariate_fields(&r.covariates));
        rec.push(r.introduced.to_string());
        rec.push(r.passed.to_string());
        rec.push(r.pass_proportion.map_or(String::new(), |p| p.to_string()));
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Covariates per replicate: `replicate,time`, then the same columns as
/// [`write_passage_covariates`] without the passage counts.
pub fn write_replicate_covariates<W: Write>(w: W, labels: &LabelSet, replicates: &[Vec<CovariateRow>]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["replicate".to_string(), "time".to_string()];
    header.extend(covariate_header(labels));
    wtr.write_record(&header)?;
    for (r, rows) in replicates.iter().enumerate() {
        for row in rows {
            let mut rec = vec![r.to_string(), row.time.clone()];
            rec.extend(covariate_fields(row));
            wtr.write_record(&rec)?;
        }
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
