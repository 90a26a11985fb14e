use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::RngCore;
use serde_json::Value;
use tracelab::freegroup::{approx_midpoint_fd, PerturbOptions};
use tracelab::linalg::rng_from_seed;
use tracelab::{Tolerance, UnitaryTuple};

const BIN: &str = env!("CARGO_BIN_EXE_tracelab");

struct Run {
    out: Output,
    report: Option<Value>,
}

impl Run {
    fn code(&self) -> i32 {
        self.out.status.code().expect("exit code")
    }

    fn stdout(&self) -> String {
        String::from_utf8_lossy(&self.out.stdout).into_owned()
    }

    fn report(&self) -> &Value {
        self.report.as_ref().expect("report written")
    }

    fn gate(&self, name: &str) -> &Value {
        self.report()["gates"]
            .as_array()
            .unwrap()
            .iter()
            .find(|g| g["name"] == name)
            .unwrap_or_else(|| panic!("no gate {name}"))
    }
}

fn run(dir: &Path, args: &[&str]) -> Run {
    let report_path = dir.join(format!("{}.report.json", args[0]));
    let _ = std::fs::remove_file(&report_path);
    let out = Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(&report_path)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    let report = std::fs::read_to_string(&report_path).ok().map(|t| serde_json::from_str(&t).unwrap());
    Run { out, report }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), &["gen-check", "--n", "6"]);
    assert_eq!(r.code(), 0);
    let cases = r.report()["result"]["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 6);
    assert!(cases.iter().all(|c| c["dim"] == 36));
}

#[test]
fn et_gap_prints_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    for (table, expected) in [("s3", "1.5"), ("s3.table", "1.5"), ("z2", "2"), ("z3", "1.5")] {
        let r = run(dir.path(), &["et-gap", "--table", table]);
        assert_eq!(r.code(), 0);
        assert_eq!(r.stdout().trim(), expected);
    }
    let r = run(dir.path(), &["et-gap", "--table", "q8"]);
    assert_eq!(r.code(), 2);
    assert!(r.report.is_none());
}

#[test]
fn et_gap_reads_table_files() {
    let dir = tempfile::tempdir().unwrap();
    let table = tracelab::CharacterTable::bundled("z4").unwrap();
    let file = dir.path().join("mine.json");
    std::fs::write(&file, tracelab::io::to_json(&table).unwrap()).unwrap();
    let r = run(dir.path(), &["et-gap", "--table", path_str(&file)]);
    assert_eq!(r.code(), 0);
    assert_eq!(r.stdout().trim(), "2");
}

#[test]
fn et_bound_exit_status_follows_gates() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), &["et-bound", "--table", "z2"]);
    assert_eq!(r.code(), 0);
    assert_eq!(r.report()["result"]["violations"], 0);

    // The single-class bound is violated on S3; the summed bound is not.
    let r = run(dir.path(), &["et-bound", "--table", "s3"]);
    assert_eq!(r.code(), 1);
    assert_eq!(r.gate("bound_violations")["pass"], false);
    assert_eq!(r.gate("summed_bound_violations")["pass"], true);
    assert_eq!(r.gate("decomposition_roundtrip")["pass"], true);
}

#[test]
fn midpoint_f2_matches_library_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), &["midpoint-f2", "--eps", "0.05", "--seed", "7"]);
    assert_eq!(r.code(), 0);
    let report = &r.report()["result"]["report"];
    let sup = report["moment_report"]["sup_delta"].as_f64().unwrap();
    assert_eq!(r.report()["result"]["dim"], 6);
    assert_eq!(report["certificate"].as_array().unwrap().len(), 36);

    let mut rng = rng_from_seed(7);
    let a = UnitaryTuple::haar(2, 3, rng.next_u64());
    let b = UnitaryTuple::haar(2, 3, rng.next_u64());
    let opts = PerturbOptions { max_tries: 32, radius: 4, tol: Tolerance::default() };
    let (_, lib) = approx_midpoint_fd(&a, &b, 0.05, 7, &opts).unwrap();
    assert_eq!(sup, lib.moment_report.sup_delta);
    assert!(sup <= 4.0 * 0.05 + 1e-8);
    assert_eq!(r.report()["config"]["common"]["seed"], 7);
}

#[test]
fn saved_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mid = d.join("mid.json");
    let rep = d.join("rep.json");
    let ch = d.join("ch.json");
    assert_eq!(run(d, &["midpoint-f2", "--save", path_str(&mid)]).code(), 0);
    assert_eq!(run(d, &["mnmn-build", "--n", "3", "--d", "2", "--save-rep", path_str(&rep)]).code(), 0);
    assert_eq!(run(d, &["channel", "--input", path_str(&rep), "--save", path_str(&ch)]).code(), 0);
    for p in [&mid, &rep, &ch] {
        let r = run(d, &["roundtrip", "--input", path_str(p)]);
        assert_eq!(r.code(), 0);
        assert_eq!(r.stdout().trim(), "true");
    }
    let r = run(d, &["channel-verify", "--input", path_str(&ch)]);
    assert_eq!(r.code(), 0);
    let r = run(d, &["mnmn-verify", "--input", path_str(&rep), "--compare", path_str(&rep), "--require-surjective"]);
    assert_eq!(r.code(), 0);
    assert_eq!(r.report()["result"]["moments"]["sup_delta"], 0.0);
    assert_eq!(r.report()["result"]["algebra_dim"], 36);
}

#[test]
fn unreadable_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"kind\": \"matrix\", \"dim\": 2").unwrap();
    assert_eq!(run(dir.path(), &["roundtrip", "--input", path_str(&bad)]).code(), 2);
    assert_eq!(run(dir.path(), &["roundtrip", "--input", "missing.json"]).code(), 2);
    assert_eq!(run(dir.path(), &["channel-verify", "--input", path_str(&bad)]).code(), 2);
    assert_eq!(run(dir.path(), &["gen-check", "--tol-rank=-1"]).code(), 2);
    assert_eq!(run(dir.path(), &["gen-check", "--n", "many"]).code(), 2);
}

#[test]
fn wrong_kind_of_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mid = dir.path().join("mid.json");
    assert_eq!(run(dir.path(), &["midpoint-f2", "--save", path_str(&mid)]).code(), 0);
    assert_eq!(run(dir.path(), &["channel-verify", "--input", path_str(&mid)]).code(), 2);
}

#[test]
fn precondition_violations_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["mnmn-perturb", "--n", "3", "--d", "2"]).code(), 3);
    assert_eq!(run(dir.path(), &["mnmn-perturb", "--n", "4", "--d", "3", "--eps", "0.3"]).code(), 3);
    assert_eq!(run(dir.path(), &["gen-check", "--n", "1"]).code(), 3);
}

#[test]
fn gate_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // A single unitary of dimension 3 generates a commutative algebra.
    let r = run(dir.path(), &["factor-check", "--d", "1", "--k", "3"]);
    assert_eq!(r.code(), 1);
    assert_eq!(r.gate("factor")["pass"], false);
    let r = run(dir.path(), &["surjective-check", "--d", "1", "--k", "3"]);
    assert_eq!(r.code(), 1);
    let r = run(dir.path(), &["surjective-check", "--d", "2", "--k", "3"]);
    assert_eq!(r.code(), 0);
}

#[test]
fn amplify_both_input_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let r = run(d, &["amplify", "--eps", "0.1"]);
    assert_eq!(r.code(), 0);
    assert_eq!(r.report()["result"]["k"], 8);
    let mid = d.join("mid.json");
    assert_eq!(run(d, &["midpoint-f2", "--save", path_str(&mid)]).code(), 0);
    let r = run(d, &["amplify", "--input", path_str(&mid), "--m", "3"]);
    assert_eq!(r.code(), 0);
    assert_eq!(r.report()["result"]["kind"], "unitaries");
}

#[test]
fn midpoint_channel_default_route() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), &["midpoint-channel", "--eps", "0.03"]);
    assert_eq!(r.code(), 0);
    assert_eq!(r.report()["result"]["report"]["route"], "finite-dimensional");
    assert!(r.gate("midpoint_distance")["value"].as_f64().unwrap() <= 0.06);
}

#[test]
fn report_location() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("reports");
    std::fs::create_dir(&out_dir).unwrap();
    let status = Command::new(BIN)
        .args(["et-gap", "--table", "z3"])
        .env("TRACELAB_OUT_DIR", &out_dir)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("et-gap.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "et-gap");
    assert_eq!(report["gates"][0]["name"], "gap_positive");

    let status = Command::new(BIN)
        .args(["et-gap", "--table", "z3"])
        .env_remove("TRACELAB_OUT_DIR")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(PathBuf::from(dir.path()).join("et-gap.json").exists());
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        ["midpoint-f2", "--seed", "3"].as_slice(),
        ["channel", "--seed", "5"].as_slice(),
        ["et-bound", "--table", "z6", "--seed", "2"].as_slice(),
    ] {
        let first = run(dir.path(), args);
        let a = std::fs::read(dir.path().join(format!("{}.report.json", args[0]))).unwrap();
        let second = run(dir.path(), args);
        let b = std::fs::read(dir.path().join(format!("{}.report.json", args[0]))).unwrap();
        assert_eq!(first.code(), second.code());
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn custom_word_lists() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let rep = d.join("rep.json");
    assert_eq!(run(d, &["mnmn-build", "--n", "2", "--d", "1", "--save-rep", path_str(&rep)]).code(), 0);
    let words = d.join("words.txt");
    std::fs::write(&words, "e.1.1\ne.1.2 f.2.1\n").unwrap();
    let r = run(d, &["mnmn-verify", "--input", path_str(&rep), "--words", path_str(&words)]);
    assert_eq!(r.code(), 0);
    let moments = r.report()["result"]["moments"].as_array().unwrap();
    assert_eq!(moments.len(), 2);
    assert_eq!(moments[0]["word"], "e.1.1");
    assert!((moments[0]["value"][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    // A 1-dimensional corner leaves only a phase: |φ(e12 f21)| = 1/2.
    let v = &moments[1]["value"];
    let abs = v[0].as_f64().unwrap().hypot(v[1].as_f64().unwrap());
    assert!((abs - 0.5).abs() < 1e-12);

    let group_words = d.join("group.txt");
    std::fs::write(&group_words, tracelab::words::format_word_list(&tracelab::words::ball(2, 2))).unwrap();
    let r = run(d, &["midpoint-f2", "--words", path_str(&group_words)]);
    assert_eq!(r.code(), 0);
    let custom = &r.report()["result"]["custom_words"];
    assert_eq!(custom["words"].as_array().unwrap().len(), 17);
    assert!(custom["sup_delta"].as_f64().unwrap() <= 2.0 * 0.05 + 1e-8);
}
