use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use torsionlab::field::parse_rational;
use torsionlab::fixtures::FIXTURE_NAMES;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn torsionlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsionlab")).args(args).output().expect("binary runs")
}

fn run_with(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_torsionlab"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is one JSON object"))
        .collect()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn torsion_of(name: &str) -> (i32, Vec<Value>) {
    let out = torsionlab(&["torsion", path(&fixture(name))]);
    (out.status.code().unwrap(), records(&out))
}

#[test]
fn times_two_complex_has_torsion_one_half() {
    let (code, recs) = torsion_of("times_two.json");
    assert_eq!(code, 0);
    assert_eq!(recs[0]["record"], "header");
    assert_eq!(recs[1]["torsion"], "1/2");
    assert_eq!(recs[1]["chain_bases"].as_array().unwrap().len(), 2);
}

#[test]
fn identity_complex_has_torsion_one() {
    let (code, recs) = torsion_of("identity.json");
    assert_eq!(code, 0);
    assert_eq!(recs[1]["torsion"], "1");
}

#[test]
fn float_field_flag_changes_the_arithmetic() {
    let out = torsionlab(&["torsion", "--field", "float", path(&fixture("times_two.json"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(records(&out)[1]["torsion"], 0.5);
}

#[test]
fn broken_square_exits_3_naming_the_degree() {
    let out = torsionlab(&["torsion", path(&fixture("broken_square.json"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree 1"));
}

#[test]
fn malformed_json_exits_2() {
    let out = torsionlab(&["torsion", path(&fixture("malformed.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_and_bad_flags_exit_1() {
    assert_eq!(torsionlab(&["torsion", "/nonexistent/complex.json"]).status.code(), Some(1));
    let out = torsionlab(&["verify", path(&fixture("quad_sp4_genus2.json")), "--suite", "everything"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn quad_fixture_passes_every_suite() {
    let out = torsionlab(&["verify", path(&fixture("quad_sp4_genus2.json")), "--suite", "all", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    let checks: Vec<&Value> = recs.iter().filter(|r| r["record"] == "check").collect();
    for suite in ["invariance", "main-theorem", "symplectic"] {
        assert!(checks.iter().any(|c| c["suite"] == suite), "{suite} ran");
    }
    assert!(checks.iter().all(|c| c["pass"] == true));
    let main = checks.iter().find(|c| c["suite"] == "main-theorem").unwrap();
    assert_eq!(main["lhs"], main["rhs"]);
    assert_eq!(main["field"], "quad:2");
    assert_eq!(recs.last().unwrap()["pass"], true);
}

#[test]
fn trivial_representation_is_reducible_exit_5() {
    let out = torsionlab(&["verify", path(&fixture("trivial_sp4_genus2.json")), "--suite", "main-theorem"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn perturbed_relator_exits_4() {
    let mut rep: Value = serde_json::from_str(&std::fs::read_to_string(fixture("commutator_sp4_genus2.json")).unwrap()).unwrap();
    let entry = &mut rep["generators"]["a1"]["entries"][0][0];
    let nudged = parse_rational(entry.as_str().unwrap()).unwrap() + parse_rational("1/1000").unwrap();
    *entry = Value::String(nudged.to_string());
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("perturbed.json");
    std::fs::write(&file, rep.to_string()).unwrap();
    let out = torsionlab(&["verify", path(&file), "--suite", "invariance"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn float_fixture_meets_the_gap() {
    let out = torsionlab(&["verify", path(&fixture("float_sp4_genus2.json")), "--suite", "main-theorem"]);
    assert_eq!(out.status.code(), Some(0));
    let check = records(&out).into_iter().find(|r| r["record"] == "check").unwrap();
    assert!(check["relative_gap"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn same_seed_gives_identical_reports_at_any_thread_count() {
    let files = [fixture("commutator_sp4_genus2.json"), fixture("float_sp4_genus2.json")];
    let mut args = vec!["verify", "--suite", "all", "--samples", "5", "--seed", "11"];
    args.extend(files.iter().map(|f| path(f)));
    let one = run_with(&args, &[("TORSIONLAB_THREADS", "1")]);
    let four = run_with(&args, &[("TORSIONLAB_THREADS", "4")]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let recs = records(&one);
    assert_eq!(recs[0]["seed"], 11);
    let summaries: Vec<&str> =
        recs.iter().filter(|r| r["record"] == "summary").map(|r| r["fixture"].as_str().unwrap()).collect();
    assert_eq!(summaries, ["commutator_sp4_genus2", "float_sp4_genus2"]);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.jsonl");
    let out = torsionlab(&["torsion", path(&fixture("times_two.json")), "--out", path(&target)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&target).unwrap().contains("\"torsion\":\"1/2\""));
}

fn thurston(track: &str, a: &str, b: &str, extra: &[&str]) -> Output {
    let (t, x, y) = (fixture(track), fixture(a), fixture(b));
    let mut args = vec!["thurston", path(&t), path(&x), path(&y)];
    args.extend_from_slice(extra);
    torsionlab(&args)
}

#[test]
fn thurston_single_switch_is_one_half() {
    let out = thurston("single_switch.json", "left.json", "right.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(records(&out)[1]["value"], "1/2");
    let wp = thurston("single_switch.json", "left.json", "right.json", &["--form", "wp"]);
    assert_eq!(records(&wp)[1]["value"], "-8");
}

#[test]
fn thurston_equal_cocycles_vanish() {
    let out = thurston("three_switch.json", "admissible.json", "admissible.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(records(&out)[1]["value"], "0");
}

#[test]
fn inadmissible_cocycle_exits_6() {
    let out = thurston("three_switch.json", "admissible.json", "inadmissible.json", &[]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn fixture_command_emits_loadable_representations() {
    let dir = tempfile::tempdir().unwrap();
    for name in FIXTURE_NAMES.iter().filter(|n| n.starts_with("commutator_so")) {
        let out = torsionlab(&["fixture", name, "--seed", "2"]);
        assert_eq!(out.status.code(), Some(0));
        let file = dir.path().join(format!("{name}.json"));
        std::fs::write(&file, &out.stdout).unwrap();
        let verified = torsionlab(&["verify", path(&file), "--suite", "main-theorem"]);
        assert_eq!(verified.status.code(), Some(0), "{name}");
    }
    assert_eq!(torsionlab(&["fixture", "octagon"]).status.code(), Some(1));
}
