//! Bill records, term calendars and monthly party rosters.

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::YearMonth;
use crate::io::{open, read_rows, Rows};

pub const BILL_HEADER: [&str; 5] = ["bill_id", "month", "sponsor", "cosponsors", "passed"];
pub const CALENDAR_HEADER: [&str; 3] = ["term", "start_month", "end_month"];
pub const MONTHLY_ROSTER_HEADER: [&str; 3] = ["month", "node_id", "party"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BillRecord {
    pub bill_id: String,
    pub month: YearMonth,
    pub sponsor: String,
    /// Never contains the sponsor or repeats.
    pub cosponsors: Vec<String>,
    pub passed: Option<bool>,
}

fn parse_flag(raw: &str) -> Option<Option<bool>> {
    match raw.to_ascii_lowercase().as_str() {
        "" => Some(None),
        "true" | "1" | "yes" => Some(Some(true)),
        "false" | "0" | "no" => Some(Some(false)),
        _ => None,
    }
}

fn month_field(rows: &Rows, line: u64, raw: &str) -> Result<YearMonth> {
    raw.parse().map_err(|e: Error| rows.error(line, e.to_string()))
}

pub fn read_bill_records<R: Read>(reader: R, source: &str) -> Result<Vec<BillRecord>> {
    let (_, rows) = read_rows(reader, source, &[&BILL_HEADER])?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(rows.rows.len());
    for (line, rec) in &rows.rows {
        let bill_id = rec[0].to_string();
        if bill_id.is_empty() {
            return Err(rows.error(*line, "empty bill id"));
        }
        if !seen.insert(bill_id.clone()) {
            return Err(Error::DuplicateBill(bill_id));
        }
        let month = month_field(&rows, *line, &rec[1])?;
        let sponsor = rec[2].to_string();
        if sponsor.is_empty() {
            return Err(rows.error(*line, "empty sponsor"));
        }
        let mut cosponsors: Vec<String> = Vec::new();
        for c in rec[3].split(';').map(str::trim).filter(|c| !c.is_empty()) {
            if c == sponsor {
                log::warn!("{source}:{line}: bill {bill_id} lists its sponsor {c} as a cosponsor; dropped");
            } else if !cosponsors.iter().any(|x| x == c) {
                cosponsors.push(c.to_string());
            }
        }
        let passed = parse_flag(&rec[4]).ok_or_else(|| rows.error(*line, format!("invalid passed flag `{}`", &rec[4])))?;
        out.push(BillRecord {
            bill_id,
            month,
            sponsor,
            cosponsors,
            passed,
        });
    }
    Ok(out)
}

pub fn load_bill_records(path: &Path) -> Result<Vec<BillRecord>> {
    read_bill_records(open(path)?, &path.display().to_string())
}

pub fn write_bill_records<W: Write>(w: W, records: &[BillRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(BILL_HEADER)?;
    for r in records {
        let passed = match r.passed {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        wtr.write_record([
            r.bill_id.as_str(),
            &r.month.to_string(),
            &r.sponsor,
            &r.cosponsors.join(";"),
            passed,
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Term {
    pub number: u32,
    pub start: YearMonth,
    pub end: YearMonth,
}

/// Contiguous, non-overlapping terms in chronological order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermCalendar {
    terms: Vec<Term>,
}

impl TermCalendar {
    pub fn new(mut terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("calendar has no terms"));
        }
        terms.sort_by_key(|t| t.start);
        for t in &terms {
            if t.end < t.start {
                return Err(Error::invalid(format!("term {} ends before it starts", t.number)));
            }
        }
        for w in terms.windows(2) {
            if w[1].start != w[0].end.succ() {
                return Err(Error::invalid(format!(
                    "terms {} and {} are not contiguous ({} then {})",
                    w[0].number, w[1].number, w[0].end, w[1].start
                )));
            }
        }
        Ok(TermCalendar { terms })
    }

    /// `count` consecutive terms of `months` months each from `first`.
    pub fn regular(first_number: u32, first: YearMonth, months: i64, count: usize) -> Result<Self> {
        if months < 1 {
            return Err(Error::invalid("terms must span at least one month"));
        }
        Self::new(
            (0..count)
                .map(|k| {
                    let start = first.plus(k as i64 * months);
                    Term {
                        number: first_number + k as u32,
                        start,
                        end: start.plus(months - 1),
                    }
                })
                .collect(),
        )
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn first_month(&self) -> YearMonth {
        self.terms[0].start
    }

    pub fn last_month(&self) -> YearMonth {
        self.terms[self.terms.len() - 1].end
    }

    pub fn months(&self) -> impl Iterator<Item = YearMonth> {
        self.first_month().through(self.last_month())
    }

    pub fn term_of(&self, month: YearMonth) -> Option<&Term> {
        self.terms.iter().find(|t| t.start <= month && month <= t.end)
    }

    pub fn is_term_start(&self, month: YearMonth) -> bool {
        self.terms.iter().any(|t| t.start == month)
    }
}

pub fn read_calendar<R: Read>(reader: R, source: &str) -> Result<TermCalendar> {
    let (_, rows) = read_rows(reader, source, &[&CALENDAR_HEADER])?;
    let mut terms = Vec::with_capacity(rows.rows.len());
    for (line, rec) in &rows.rows {
        terms.push(Term {
            number: rows.field(*line, rec, 0, "term number")?,
            start: month_field(&rows, *line, &rec[1])?,
            end: month_field(&rows, *line, &rec[2])?,
        });
    }
    TermCalendar::new(terms).map_err(|e| Error::parse(source, 1, e.to_string()))
}

pub fn load_calendar(path: &Path) -> Result<TermCalendar> {
    read_calendar(open(path)?, &path.display().to_string())
}

pub fn write_calendar<W: Write>(w: W, calendar: &TermCalendar) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CALENDAR_HEADER)?;
    for t in calendar.terms() {
        wtr.write_record([t.number.to_string(), t.start.to_string(), t.end.to_string()])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Party label used for grouping. Independents and socialists caucus with
/// the Democrats and are labeled `D`; other labels pass through unchanged.
pub fn normalize_party(raw: &str) -> String {
    match raw.trim().to_ascii_lowercase().as_str() {
        "d" | "dem" | "democrat" | "democratic" | "i" | "id" | "ind" | "independent" | "s" | "socialist" => {
            "D".to_string()
        }
        "r" | "rep" | "republican" => "R".to_string(),
        _ => raw.trim().to_string(),
    }
}

/// Senators and party labels per month.
pub type MonthlyRosters = BTreeMap<YearMonth, Vec<(String, String)>>;

pub fn read_monthly_rosters<R: Read>(reader: R, source: &str) -> Result<MonthlyRosters> {
    let (_, rows) = read_rows(reader, source, &[&MONTHLY_ROSTER_HEADER])?;
    let mut out = MonthlyRosters::new();
    for (line, rec) in &rows.rows {
        let month = month_field(&rows, *line, &rec[0])?;
        let id = rec[1].to_string();
        if id.is_empty() {
            return Err(rows.error(*line, "empty node id"));
        }
        let nodes = out.entry(month).or_default();
        if nodes.iter().any(|(n, _)| *n == id) {
            return Err(rows.error(*line, format!("`{id}` listed twice in {month}")));
        }
        nodes.push((id, normalize_party(&rec[2])));
    }
    Ok(out)
}

pub fn load_monthly_rosters(path: &Path) -> Result<MonthlyRosters> {
    read_monthly_rosters(open(path)?, &path.display().to_string())
}

pub fn write_monthly_rosters<W: Write>(w: W, rosters: &MonthlyRosters) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(MONTHLY_ROSTER_HEADER)?;
    for (month, nodes) in rosters {
        let m = month.to_string();
        for (id, party) in nodes {
            wtr.write_record([m.as_str(), id, party])?;
        }
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
