use std::fs::File;
use std::sync::Arc;

use dccm::component::{Component, ComponentKind};
use dccm::ingest::surrogate::{generate_surrogate, SurrogateConfig};
use dccm::ingest::{
    build_monthly_networks, covariate_rows, load_bill_records, load_calendar, load_monthly_rosters,
    passage_covariates, property_series, read_bill_records, term_breaks, write_bill_records, write_calendar,
    write_monthly_rosters, MonthlyRosters, TermCalendar, YearMonth,
};
use dccm::io::{read_distributions, read_series, write_distributions, write_series};
use dccm::netcore::covariates::{betweenness_centrality, closeness_centrality, eigenvector_centrality};
use dccm::netcore::{covariate_summary, properties, Network, Roster};
use dccm::PropertyDistribution;

const BILLS: &str = "bill_id,month,sponsor,cosponsors,passed
B01,2003-01,a,b;c,true
B02,2003-01,b,c,false
B03,2003-01,d,,false
B04,2003-02,a,b,true
B05,2003-02,c,d;a,false
B06,2003-02,d,a,true
B07,2003-03,b,a;e,false
B08,2003-03,e,d,true
B09,2003-04,a,b;d;e,false
B10,2003-04,e,e,true
";

fn ym(s: &str) -> YearMonth {
    s.parse().unwrap()
}

fn rosters() -> MonthlyRosters {
    let first: Vec<(String, String)> =
        [("a", "D"), ("b", "R"), ("c", "D"), ("d", "R")].map(|(i, p)| (i.to_string(), p.to_string())).to_vec();
    let second: Vec<(String, String)> =
        [("a", "D"), ("b", "R"), ("d", "R"), ("e", "D")].map(|(i, p)| (i.to_string(), p.to_string())).to_vec();
    [("2003-01", &first), ("2003-02", &first), ("2003-03", &second), ("2003-04", &second)]
        .into_iter()
        .map(|(m, r)| (ym(m), r.clone()))
        .collect()
}

fn calendar() -> TermCalendar {
    TermCalendar::regular(1, ym("2003-01"), 2, 2).unwrap()
}

#[test]
fn ten_bill_fixture_builds_expected_networks() {
    let records = read_bill_records(BILLS.as_bytes(), "bills.csv").unwrap();
    assert_eq!(records.len(), 10);
    let dn = build_monthly_networks(&records, &rosters(), &calendar()).unwrap();
    assert_eq!(dn.times().collect::<Vec<_>>(), ["2003-01", "2003-02", "2003-03", "2003-04"]);
    let mut edges: Vec<Vec<(String, String)>> = Vec::new();
    for (_, net) in dn.iter() {
        let mut e: Vec<(String, String)> = net
            .edge_ids()
            .map(|(x, y)| if x < y { (x.into(), y.into()) } else { (y.into(), x.into()) })
            .collect();
        e.sort();
        edges.push(e);
    }
    let pairs = |v: &[(&str, &str)]| -> Vec<(String, String)> { v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect() };
    assert_eq!(edges[0], pairs(&[("a", "b"), ("a", "c"), ("b", "c")]));
    assert_eq!(edges[1], pairs(&[("a", "b"), ("a", "c"), ("a", "d"), ("c", "d")]));
    assert_eq!(edges[2], pairs(&[("a", "b"), ("b", "e"), ("d", "e")]));
    assert_eq!(edges[3], pairs(&[("a", "b"), ("a", "d"), ("a", "e")]));

    let series = property_series(&dn, &calendar()).unwrap();
    let dyn_dr = series.get(Component::new(ComponentKind::Dynamic, 1)).unwrap();
    // Month 2 keeps a-b (D-R) from month 1; months 1 and 3 start terms.
    assert_eq!(dyn_dr.values(), [None, Some(0.5), None, Some(0.5)]);

    let rows = passage_covariates(&dn, &records, Some(&calendar())).unwrap();
    let shares: Vec<Option<f64>> = rows.iter().map(|r| r.pass_proportion).collect();
    assert_eq!(shares, [Some(1.0 / 3.0), Some(2.0 / 3.0), Some(0.5), Some(0.5)]);
}

#[test]
fn bill_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let records = read_bill_records(BILLS.as_bytes(), "bills.csv").unwrap();
    let path = dir.path().join("bills.csv");
    write_bill_records(File::create(&path).unwrap(), &records).unwrap();
    assert_eq!(load_bill_records(&path).unwrap(), records);
}

#[test]
fn surrogate_survives_the_file_pipeline() {
    let config = SurrogateConfig {
        senators: 30,
        terms: 2,
        months_per_term: 6,
        turnover: 4,
        mean_counts: [25.0, 50.0, 25.0],
        sweeps: 10.0,
        ..SurrogateConfig::default()
    };
    let s = generate_surrogate(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (b, r, c) = (dir.path().join("bills.csv"), dir.path().join("rosters.csv"), dir.path().join("calendar.csv"));
    write_bill_records(File::create(&b).unwrap(), &s.records).unwrap();
    write_monthly_rosters(File::create(&r).unwrap(), &s.rosters).unwrap();
    write_calendar(File::create(&c).unwrap(), &s.calendar).unwrap();
    let calendar = load_calendar(&c).unwrap();
    assert_eq!(calendar, s.calendar);
    let dn = build_monthly_networks(&load_bill_records(&b).unwrap(), &load_monthly_rosters(&r).unwrap(), &calendar)
        .unwrap();
    assert_eq!(dn, s.networks);

    let breaks = term_breaks(&dn, &calendar).unwrap();
    assert_eq!(breaks.iter().filter(|&&b| b).count(), 2);
    let table = property_series(&dn, &calendar).unwrap();
    for (t, (_, net)) in dn.iter().enumerate() {
        let direct = properties(net, (!breaks[t]).then(|| dn.network(t - 1)).map(|p| p.project_onto(net.roster())).as_ref())
            .unwrap()
            .to_vec();
        for (k, (_, s)) in table.series.iter().enumerate() {
            match s.value(t) {
                Some(v) => assert_eq!(v, direct[k], "t {t} component {k}"),
                None => assert!(breaks[t] && k >= 3),
            }
        }
    }
    for (row, (_, net)) in covariate_rows(&dn, &breaks).unwrap().iter().zip(dn.iter()) {
        assert_eq!(row.summary, covariate_summary(net).unwrap());
    }

    let path = dir.path().join("series.csv");
    write_series(File::create(&path).unwrap(), &table).unwrap();
    assert_eq!(read_series(&path).unwrap(), table);
}

#[test]
fn distribution_file_round_trip() {
    let labels = dccm::LabelSet::new(["D", "R"]).unwrap();
    let steps: Vec<(String, PropertyDistribution)> = vec![
        (
            "2009-01".into(),
            PropertyDistribution::new(labels.clone(), vec![1.5, 2.25, 0.125], vec![0.5, 1e-9, 3.0], false, 1e-12)
                .unwrap(),
        ),
        (
            "2009-02".into(),
            PropertyDistribution::new(labels, vec![1.5, 2.0, 0.1, 0.7, 0.3, 0.05], vec![0.1; 6], true, 1e-12).unwrap(),
        ),
    ];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dist.csv");
    write_distributions(File::create(&path).unwrap(), &steps).unwrap();
    assert_eq!(read_distributions(&path).unwrap(), steps);
}

/// Reference values from networkx 3 (`closeness_centrality` with
/// `wf_improved=True`, unnormalized `betweenness_centrality`, and
/// `eigenvector_centrality_numpy` on the largest component).
#[test]
fn centralities_match_reference_values() {
    let r = Arc::new(Roster::from_pairs((0..10).map(|i| (i.to_string(), "A"))).unwrap());
    let edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (3, 6), (7, 8)];
    let net = Network::from_index_edges(r, &edges).unwrap();
    let closeness = [
        0.3076923076923077,
        0.3076923076923077,
        0.4444444444444444,
        0.5,
        0.3333333333333333,
        0.3333333333333333,
        0.3076923076923077,
        0.1111111111111111,
        0.1111111111111111,
        0.0,
    ];
    let betweenness = [0.0, 0.0, 8.0, 11.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let eigen = [
        0.29759919794893835,
        0.2975991979489384,
        0.4544351565588998,
        0.5531610485623127,
        0.3622525282491018,
        0.3622525282491019,
        0.21889995237846802,
        0.0,
        0.0,
        0.0,
    ];
    let close = |got: Vec<f64>, want: &[f64], tol: f64| {
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < tol, "{got:?} vs {want:?}");
        }
    };
    close(closeness_centrality(&net), &closeness, 1e-12);
    close(betweenness_centrality(&net), &betweenness, 1e-12);
    close(eigenvector_centrality(&net), &eigen, 1e-8);
}
