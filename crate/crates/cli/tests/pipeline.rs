//! End-to-end runs of the command line on small inputs.

use std::fs;
use std::path::{Path, PathBuf};

use dccm::io::read_distributions;

fn dccm(args: &[&str]) -> anyhow::Result<()> {
    let mut full = vec!["dccm"];
    full.extend_from_slice(args);
    dccm_cli::run_from(full)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

/// Surrogate, ingest and forecast on a small legislature. Returns the
/// scratch directory and the forecast targets.
fn forecast_fixture(coverage: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n);
    dccm(&["surrogate", "--senators", "20", "--terms", "2", "--sweeps", "5", "--out-dir", s(&d("sur"))]).unwrap();
    dccm(&[
        "ingest",
        "--input",
        s(&d("sur/bills.csv")),
        "--roster",
        s(&d("sur/monthly_rosters.csv")),
        "--calendar",
        s(&d("sur/calendar.csv")),
        "--out-dir",
        s(&d("ing")),
    ])
    .unwrap();
    dccm(&[
        "forecast",
        "--input",
        s(&d("ing/properties.csv")),
        "--order",
        "1,0,0,0,1",
        "--dynamic-order",
        "1,0,0,0,1",
        "--horizon",
        "3",
        "--coverage",
        coverage,
        "--out-dir",
        s(&d("fc")),
    ])
    .unwrap();
    let targets = d("fc/distributions.csv");
    (dir, targets)
}

fn generate(dir: &Path, targets: &Path, replicates: &str, seed: &str, out: &str) -> PathBuf {
    let last = rows(&dir.join("ing/rosters.csv")).last().unwrap()[0].to_string();
    let out = dir.join(out);
    dccm(&[
        "generate",
        "--input",
        s(targets),
        "--roster",
        s(&dir.join("ing/rosters.csv")),
        "--roster-time",
        &last,
        "--previous",
        s(&dir.join("ing/edges.csv")),
        "--previous-roster",
        s(&dir.join("ing/rosters.csv")),
        "--replicates",
        replicates,
        "--seed",
        seed,
        "--sweeps",
        "5",
        "--out-dir",
        s(&out),
    ])
    .unwrap();
    out
}

#[test]
fn stages_compose() {
    let (dir, targets) = forecast_fixture("0.95");
    let d = dir.path();
    dccm(&[
        "stats",
        "--input",
        s(&d.join("ing/edges.csv")),
        "--roster",
        s(&d.join("ing/rosters.csv")),
        "--calendar",
        s(&d.join("sur/calendar.csv")),
        "--out-dir",
        s(&d.join("stats")),
    ])
    .unwrap();
    assert_eq!(fs::read(d.join("stats/properties.csv")).unwrap(), fs::read(d.join("ing/properties.csv")).unwrap());
    assert_eq!(rows(&d.join("stats/gof.csv")).len(), 48);

    let steps = read_distributions(&targets).unwrap();
    assert_eq!(steps.len(), 3);
    // Without a calendar every forecast step carries dynamic components.
    assert!(steps.iter().all(|(_, dist)| dist.has_dynamic()));

    let gen = generate(d, &targets, "4", "3", "gen");
    // Two labels give 3 static and 3 dynamic components per step.
    assert_eq!(rows(&gen.join("bands.csv")).len(), 3 * 6);
    dccm(&[
        "covariates",
        "--input",
        s(&gen.join("networks.csv")),
        "--roster",
        s(&gen.join("rosters.csv")),
        "--replicates",
        "4",
        "--out-dir",
        s(&d.join("cov")),
    ])
    .unwrap();
    let cov = rows(&d.join("cov/covariates.csv"));
    assert_eq!(cov.len(), 4 * 3);
    assert_eq!(&cov[0][0], "0");
    assert_eq!(&cov[11][0], "3");
}

#[test]
fn generation_is_deterministic_per_seed() {
    let (dir, targets) = forecast_fixture("0.95");
    let a = generate(dir.path(), &targets, "3", "11", "a");
    let b = generate(dir.path(), &targets, "3", "11", "b");
    let c = generate(dir.path(), &targets, "3", "12", "c");
    for f in ["networks.csv", "bands.csv", "rosters.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_ne!(fs::read(a.join("networks.csv")).unwrap(), fs::read(c.join("networks.csv")).unwrap());
}

#[test]
fn single_replicate_band_is_a_point() {
    let (dir, targets) = forecast_fixture("0.95");
    let out = generate(dir.path(), &targets, "1", "5", "one");
    for r in rows(&out.join("bands.csv")) {
        assert_eq!(r[2], r[3]);
    }
}

#[test]
fn coverage_scales_target_variance() {
    let (_a, wide) = forecast_fixture("0.95");
    let (_b, half) = forecast_fixture("0.5");
    // Target sd is half the interval half-width: z_{(1+c)/2} / 2 forecast sd.
    let expected = (0.674_489_750_196_081_7_f64 / 1.959_963_984_540_054).powi(2);
    for ((_, w), (_, h)) in read_distributions(&wide).unwrap().iter().zip(&read_distributions(&half).unwrap()) {
        assert_eq!(w.mean(), h.mean());
        for (vw, vh) in w.variance().iter().zip(h.variance()) {
            if *vw > 1e-6 {
                assert!((vh / vw - expected).abs() < 1e-9, "{vh} / {vw}");
            }
        }
    }
}

#[test]
fn identity_scenario_reproduces_targets() {
    let (dir, targets) = forecast_fixture("0.95");
    let spec = dir.path().join("identity.csv");
    fs::write(&spec, "component,operation,value\nstatic:D:R,scale_mean,1\ndynamic:D:D,scale_variance,1\n").unwrap();
    let out = dir.path().join("scen");
    dccm(&["scenario", "--input", s(&targets), "--scenario-file", s(&spec), "--out-dir", s(&out)]).unwrap();
    assert_eq!(fs::read(out.join("distributions.csv")).unwrap(), fs::read(&targets).unwrap());

    fs::write(&spec, "component,operation,value\nstatic:D:R,scale_mean,2\n").unwrap();
    dccm(&["scenario", "--input", s(&targets), "--scenario-file", s(&spec), "--out-dir", s(&out)]).unwrap();
    for ((_, before), (_, after)) in read_distributions(&targets).unwrap().iter().zip(&read_distributions(&out.join("distributions.csv")).unwrap()) {
        assert_eq!(after.mean()[1], 2.0 * before.mean()[1]);
        assert_eq!(after.mean()[0], before.mean()[0]);
    }
}

#[test]
fn persistence_grid_gives_one_total_per_setting_and_replicate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("epi");
    dccm(&[
        "epidemic", "--study", "2", "--grid", "0,0.5,1", "--replicates", "3", "--nodes", "30", "--edges", "20",
        "--horizon", "5", "--sweeps", "5", "--out-dir", s(&out),
    ])
    .unwrap();
    let totals = rows(&out.join("totals.csv"));
    assert_eq!(totals.len(), 3 * 3);
    let params: Vec<&str> = totals.iter().map(|r| r.get(1).unwrap()).collect();
    assert_eq!(params, ["0", "0", "0", "0.5", "0.5", "0.5", "1", "1", "1"]);
    assert_eq!(rows(&out.join("trajectories.csv")).len(), 3 * 3 * 5);
}

#[test]
fn covariates_of_empty_and_complete_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut roster = String::from("time,node_id,group\n");
    for t in ["1", "2"] {
        for (v, g) in [("a", "D"), ("b", "D"), ("c", "R"), ("d", "R")] {
            roster.push_str(&format!("{t},{v},{g}\n"));
        }
    }
    fs::write(d.join("rosters.csv"), roster).unwrap();
    // Replicate 0 is empty at both steps; replicate 1 is complete at both.
    let mut edges = String::from("replicate,time,node_a,node_b\n");
    for t in ["1", "2"] {
        for (a, b) in [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")] {
            edges.push_str(&format!("1,{t},{a},{b}\n"));
        }
    }
    fs::write(d.join("networks.csv"), edges).unwrap();
    dccm(&[
        "covariates", "--input", s(&d.join("networks.csv")), "--roster", s(&d.join("rosters.csv")), "--replicates", "2",
        "--out-dir", s(&d.join("out")),
    ])
    .unwrap();
    let mut rdr = csv::Reader::from_path(d.join("out/covariates.csv")).unwrap();
    let header = rdr.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let table: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(table.len(), 4);
    let field = |r: usize, name: &str| table[r][col(name)].to_string();
    let empty_second = 1;
    let full_second = 3;
    assert_eq!(field(empty_second, "n_components"), "4");
    assert_eq!(field(empty_second, "largest_component"), "1");
    assert_eq!(field(empty_second, "max_closeness"), "0");
    assert_eq!(field(empty_second, "static:D:R"), "0");
    assert_eq!(field(empty_second, "dynamic:D:R"), "0");
    assert_eq!(field(full_second, "n_components"), "1");
    assert_eq!(field(full_second, "largest_component"), "4");
    assert_eq!(field(full_second, "max_closeness"), "1");
    assert_eq!(field(full_second, "max_betweenness"), "0");
    assert!((field(full_second, "max_eigenvector_centrality").parse::<f64>().unwrap() - 0.5).abs() < 1e-9);
    // D:R has 4 dyads, all present and all persisting; the first label has 2 nodes.
    assert_eq!(field(full_second, "static:D:R"), "2");
    assert_eq!(field(full_second, "dynamic:D:R"), "2");
    assert_eq!(field(full_second, "size:D"), "2");
    // The first step has no previous network.
    assert_eq!(field(0, "dynamic:D:R"), "");
}

#[test]
fn invalid_invocations_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert!(dccm(&["stats", "--input", s(&missing), "--roster", s(&missing), "--out-dir", s(dir.path())]).is_err());
    assert!(dccm(&["epidemic", "--study", "3", "--out-dir", s(dir.path())]).is_err());
    assert!(dccm(&["forecast", "--input", s(&missing), "--order", "1,0", "--out-dir", s(dir.path())]).is_err());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}
