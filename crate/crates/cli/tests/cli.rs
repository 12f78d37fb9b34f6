use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tetralab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_lines(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

#[test]
fn tables_in_star_notation() {
    let o = run(&["verify", "tables", "--emit", "star"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
    assert_eq!(lines[0], "0*** | *1** | **0* | ***1");
    assert_eq!(lines[1], "01*0 | 011* | 0*00 | 00*1");
    assert_eq!(lines[3], "0*11 | 11*1 | *001 | 1*01");
    assert_eq!(lines[4], "***0 | **1* | *0** | 1***");
    assert_eq!(lines[7], "*110 | *011 | 10*1 | 11*0");
}

#[test]
fn quick_checks_emit_one_report_each() {
    for id in ["ybe-corr", "ybe-poly", "simplex-components", "coloring-determinism", "properties", "codes"] {
        let o = run(&["verify", id]);
        assert_eq!(o.status.code(), Some(0), "{id}");
        let v = json_lines(&o);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0]["check"], id);
        assert_eq!(v[0]["status"], "pass");
        assert!(String::from_utf8_lossy(&o.stderr).contains(&format!("PASS {id}")));
    }
}

#[test]
fn tetrahedron_entries_are_two() {
    let o = run(&["verify", "tetrahedron", "--threads", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    let h = v["histogram"].as_object().unwrap();
    assert_eq!(h.len(), 1);
    assert_eq!(h["2"], 8192);
}

#[test]
fn calibration_exits_zero_as_a_finding() {
    let o = run(&["verify", "calibrate"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["status"], "finding");
    assert_eq!(v["counts"]["matching"], 0);
}

#[test]
fn multivalued_lift_fails_with_witness() {
    let o = run(&["verify", "recursion-image"]);
    assert_eq!(o.status.code(), Some(1));
    let v = &json_lines(&o)[0];
    assert_eq!(v["holds"], false);
    assert_eq!(v["counts"]["support"], 128);
    assert_eq!(v["witness"]["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn relate_on_the_small_torus() {
    let o = run(&["verify", "relate", "--size", "2x2x2", "--dirs", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["counts"]["kappa"], 2);
    assert_eq!(v["counts"]["c"], 1);
}

#[test]
fn partition_json() {
    let o = run(&["partition", "--size", "2x2x2", "--method", "spin", "--out", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["z"]["24"], 2);
    let total: i64 = v["z"].as_object().unwrap().values().map(|c| c.as_i64().unwrap()).sum();
    assert_eq!(total, 256);

    let o = run(&["partition", "--method", "edge"]);
    assert_eq!(json_lines(&o)[0]["admissible"], 1024);
}

#[test]
fn out_file() {
    let dir = std::env::temp_dir().join(format!("tetralab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.jsonl");
    let o = run(&["verify", "codes", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(v["counts"]["min_distance"], 2);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn codes_subcommands() {
    let o = run(&["codes", "coil", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o)[0]["induced"], true);

    let o = run(&["codes", "coil", "--n", "3", "--cycle", "000,100,110,010,011,001"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_lines(&o)[0]["defect"]["Chord"][0], "000");

    let dir = std::env::temp_dir().join(format!("tetralab-words-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let words = dir.join("words.txt");
    std::fs::write(&words, "0000\n1111\n").unwrap();
    let o = run(&["codes", "distance", "--words", words.to_str().unwrap()]);
    assert_eq!(json_lines(&o)[0]["min_distance"], 4);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "partition", "--size", "2x2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "relate", "--dirs", "3,2,1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["partition", "--size", "5x5x5"]).status.code(), Some(2));
}
