mod common;

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::{oracle_rules, Intension, RawMmer};
use gar_core::dataio::{load_mmer, SchemaConfig};
use gar_core::measures::Thresholds;
use gar_core::model::InformationSystem;

fn toy(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/toy").join(file)
}

fn gar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gar")).args(args).output().unwrap()
}

fn ok(args: &[&str]) {
    let out = gar(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn error_record(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().find(|l| l.starts_with('{')).expect("an error record");
    serde_json::from_str(line).unwrap()
}

#[test]
fn discretize_toy_price_matches_the_expected_labels() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("price.toml");
    fs::write(&spec, "[[target]]\nattribute = \"Price\"\nmethod = \"width\"\nk = 3\n").unwrap();
    let out = dir.path().join("out");
    ok(&["discretize", "--schema", s(&toy("schema.toml")), "--spec", s(&spec), "--out", s(&out)]);

    let table = fs::read_to_string(out.join("target.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(table.as_bytes());
    let prices: Vec<String> = rdr.records().map(|r| r.unwrap()[4].to_string()).collect();
    let one_decimal: Vec<String> = prices
        .iter()
        .map(|l| {
            let iv = gar_core::model::Interval::parse_label(l).unwrap();
            format!("[{:.1}, {:.1}{}", iv.lo(), iv.hi(), if iv.hi_closed() { "]" } else { ")" })
        })
        .collect();
    let a = "[2.0, 7.3)";
    let b = "[7.3, 12.7)";
    let c = "[12.7, 18.0]";
    assert_eq!(one_decimal, [a, a, a, b, c, a, a, c]);

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let chain = &report["chains"]["target"]["chains"][0];
    assert_eq!(chain["attribute"], "Price");
    assert_eq!(chain["boundaries"], serde_json::json!([2.0, 22.0 / 3.0, 38.0 / 3.0, 18.0]));
}

#[test]
fn discretizing_a_nominal_column_is_a_type_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.toml");
    fs::write(&spec, "[[source]]\nattribute = \"Gender\"\nmethod = \"ew\"\nk = 2\n").unwrap();
    let out = gar(&["discretize", "--schema", s(&toy("schema.toml")), "--spec", s(&spec), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let record = error_record(&out);
    assert_eq!(record["error"], "type");
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
}

#[test]
fn usage_and_data_errors_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = gar(&["mine", "--schema", s(&toy("schema.toml")), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_record(&out)["error"], "usage");

    let out = gar(&[
        "mine", "--schema", s(&toy("schema.toml")), "--method", "ew", "--k", "3",
        "--ms", "1.5", "--mt", "0.3", "--mc", "0.6", "--tc", "0.6", "--out", s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = gar(&["stats", "--schema", s(&dir.path().join("missing.toml"))]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "io");

    let out = gar(&[
        "mine", "--schema", s(&toy("schema.toml")), "--spec", s(&toy("spec.toml")),
        "--ms", "0.3", "--mt", "0.3", "--mc", "0.6", "--tc", "0.6", "--out", s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn discretize_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        ok(&["discretize", "--schema", s(&toy("schema.toml")), "--method", "ef", "--k", "3", "--out", s(out)]);
    }
    for f in ["source.csv", "target.csv", "relation.csv", "schema.toml"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

/// Value codes per attribute, in order of first appearance.
fn encode(is: &InformationSystem) -> (Vec<Vec<u8>>, Vec<HashMap<String, u8>>) {
    let mut dicts = vec![HashMap::new(); is.attributes().len()];
    let rows = (0..is.len())
        .map(|o| {
            (0..is.attributes().len())
                .map(|a| {
                    let next = dicts[a].len() as u8;
                    *dicts[a].entry(is.value(o, a).to_string()).or_insert(next)
                })
                .collect()
        })
        .collect();
    (rows, dicts)
}

fn decode(side: &serde_json::Value, is: &InformationSystem, dicts: &[HashMap<String, u8>]) -> Intension {
    side.as_array()
        .unwrap()
        .iter()
        .map(|d| {
            let a = is.attribute_index(d["attribute"].as_str().unwrap()).unwrap();
            (a, dicts[a][d["value"].as_str().unwrap()])
        })
        .collect()
}

#[test]
fn toy_rules_equal_the_brute_force_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let (disc, mined) = (dir.path().join("disc"), dir.path().join("mined"));
    ok(&["discretize", "--schema", s(&toy("schema.toml")), "--spec", s(&toy("spec.toml")), "--out", s(&disc)]);
    ok(&[
        "mine", "--schema", s(&disc.join("schema.toml")), "--method", "none",
        "--ms", "0.3", "--mt", "0.3", "--mc", "0.6", "--tc", "0.6", "--out", s(&mined),
    ]);
    let mmer = load_mmer(&SchemaConfig::from_path(disc.join("schema.toml")).unwrap()).unwrap();
    let (source, sd) = encode(&mmer.source);
    let (target, td) = encode(&mmer.target);
    let relation = (0..source.len())
        .map(|x| (0..target.len()).map(|y| mmer.relation.row(x).contains(y)).collect())
        .collect();
    let raw = RawMmer { source, target, relation };
    let t = Thresholds::parse("0.3", "0.3", "0.6", "0.6").unwrap();
    let want: BTreeSet<(Intension, Intension)> = oracle_rules(&raw, &t).into_keys().collect();

    let got: BTreeSet<(Intension, Intension)> = fs::read_to_string(mined.join("rules.jsonl"))
        .unwrap()
        .lines()
        .map(|l| {
            let r: serde_json::Value = serde_json::from_str(l).unwrap();
            (decode(&r["lhs"], &mmer.source, &sd), decode(&r["rhs"], &mmer.target, &td))
        })
        .collect();
    assert_eq!(got.len(), 40);
    assert_eq!(got, want);
}

#[test]
fn reports_replay_to_identical_rules() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&[
        "mine", "--schema", s(&toy("schema.toml")), "--method", "ef", "--k1", "2", "--k2", "3",
        "--ms", "0.2", "--mt", "0.2", "--mc", "0.5", "--tc", "0.4", "--out", s(&a), "--threads", "4",
    ]);
    ok(&["mine", "--from-report", s(&a.join("report.json")), "--out", s(&b), "--threads", "1"]);
    let rules = fs::read(a.join("rules.jsonl")).unwrap();
    assert!(!rules.is_empty());
    assert_eq!(rules, fs::read(b.join("rules.jsonl")).unwrap());
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["plan"]["k2"], 3);
    assert_eq!(report["inputs"].as_array().unwrap().len(), 4);
    assert_eq!(report["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn single_cell_sweep_matches_mine() {
    let dir = tempfile::tempdir().unwrap();
    let schema = toy("schema.toml");
    let common = ["--ms", "0.2", "--mt", "0.25", "--mc", "0.5", "--tc", "0.5"];
    let mut sweep = vec!["sweep", "--schema", s(&schema), "--method", "ew", "--k1", "3", "--k2", "2"];
    sweep.extend(common);
    let sweep_dir = dir.path().join("sweep");
    sweep.extend(["--out", s(&sweep_dir)]);
    ok(&sweep);
    let mut mine = vec!["mine", "--schema", s(&schema), "--method", "ew", "--k1", "3", "--k2", "2"];
    mine.extend(common);
    let mine_dir = dir.path().join("mine");
    mine.extend(["--out", s(&mine_dir)]);
    ok(&mine);

    let grid = fs::read_to_string(sweep_dir.join("grid.csv")).unwrap();
    let lines: Vec<&str> = grid.lines().collect();
    assert_eq!(lines[0], "method,k1,k2,source_candidates,target_candidates,rules");
    assert_eq!(lines.len(), 2);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(mine_dir.join("report.json")).unwrap()).unwrap();
    let c = &report["counts"];
    let expected = format!("equal_width,3,2,{},{},{}", c["source_candidates"], c["target_candidates"], c["rules"]);
    assert_eq!(lines[1], expected);
}

#[test]
fn sweep_grid_is_ordered_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let mut grids = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(threads);
        ok(&[
            "sweep", "--schema", s(&toy("schema.toml")), "--method", "frequency,width,none", "--k1", "1..4",
            "--k2", "2..5", "--ms", "0.2", "--mt", "0.2", "--mc", "0.5", "--tc", "0.5", "--out", s(&out),
            "--threads", threads,
        ]);
        grids.push(fs::read(out.join("grid.csv")).unwrap());
    }
    assert_eq!(grids[0], grids[1]);
    let text = String::from_utf8(grids.pop().unwrap()).unwrap();
    let keys: Vec<(String, Option<usize>, Option<usize>)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().ok(), f[2].parse().ok())
        })
        .collect();
    assert_eq!(keys.len(), 2 * 16 + 1);
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(keys.last().unwrap(), &("none".to_string(), None, None));
}

#[test]
fn stats_summarizes_the_dataset() {
    let out = gar(&["stats", "--schema", s(&toy("schema.toml"))]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["source"]["objects"], 10);
    assert_eq!(v["relation_pairs"], 43);
}
