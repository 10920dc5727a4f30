use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const I1: &str = r#"{"machines": 1, "jobs": [{"id": 0, "release": 0, "deadline": 2, "processing": 2}]}"#;
const THREE_BIN_BP: &str = r#"{"volume": 3, "items": [1, 2, 2, 3], "bins": 3}"#;

fn i2(m: usize) -> String {
    format!(
        r#"{{"machines": {m}, "jobs": [
            {{"id": 0, "release": 0, "deadline": 3, "processing": 2}},
            {{"id": 1, "release": 1, "deadline": 3, "processing": 2}}]}}"#
    )
}

fn five_units() -> String {
    let jobs: Vec<String> = (0..5)
        .map(|id| format!(r#"{{"id": {id}, "release": 0, "deadline": 1, "processing": 1}}"#))
        .collect();
    format!(r#"{{"machines": 1, "jobs": [{}]}}"#, jobs.join(","))
}

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Self {
            dir: TempDir::new().unwrap(),
        }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn ics(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ics"))
        .args(args)
        .env_remove("SCHED_BUDGET")
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn analyze_reports_profile_and_bounds() {
    let sb = Sandbox::new();
    let out = ics(&["analyze", p(&sb.file("i1.json", I1)), "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["profile"]["height"], 1);
    assert_eq!(v["profile"]["slack"], 0);
    assert_eq!(v["profile"]["looseness"], "1");
    assert_eq!(v["bounds"]["slack"]["value"], 1);

    let out = ics(&["analyze", p(&sb.file("i2.json", &i2(1))), "--json"]);
    let v = json(&out);
    assert_eq!(v["profile"]["height"], 2);
    assert_eq!(v["profile"]["looseness"], "3/2");
    assert_eq!(v["profile"]["slack"], 1);

    let text = ics(&["analyze", p(&sb.path("i2.json"))]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("lambda=3/2 sigma=1 h=2"));
}

#[test]
fn malformed_input_exits_2() {
    let sb = Sandbox::new();
    assert_eq!(code(&ics(&["analyze", p(&sb.file("bad.json", "{not json"))])), 2);
    assert_eq!(code(&ics(&["analyze", p(&sb.path("missing.json"))])), 2);
    let extra = r#"{"machines": 1, "jobs": [], "color": "red"}"#;
    assert_eq!(code(&ics(&["decide", p(&sb.file("extra.json", extra))])), 2);
    let no_machines = r#"{"machines": 0, "jobs": []}"#;
    let out = ics(&["decide", p(&sb.file("m0.json", no_machines))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("machines"));
    assert_eq!(code(&ics(&["frobnicate"])), 2);
}

#[test]
fn decide_exit_codes_and_witness() {
    let sb = Sandbox::new();
    let out = ics(&[
        "decide",
        p(&sb.file("i1.json", I1)),
        "--driver",
        "plain",
        "--witness",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["answer"], "feasible");
    assert_eq!(v["schedule"], serde_json::json!([{"job": 0, "machine": 1, "start": 0}]));

    let out = ics(&[
        "decide",
        p(&sb.file("five.json", &five_units())),
        "--driver",
        "slack",
        "--json",
    ]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["stats"]["dp_invoked"], false);
    assert_eq!(v["stats"]["precheck_rejected"], true);
    assert_eq!(
        v["bounds"]["precheck"],
        serde_json::json!({"verdict": "reject", "height": 5, "bound": 1})
    );

    let i2_1 = sb.file("i2.json", &i2(1));
    for driver in ["plain", "looseness", "slack"] {
        let out = ics(&["decide", p(&i2_1), "--driver", driver, "--witness", "--json"]);
        assert_eq!(code(&out), 1);
        assert!(json(&out).get("schedule").is_none());
    }
    let out = ics(&[
        "decide",
        p(&sb.file("i2m2.json", &i2(2))),
        "--strategy",
        "table",
        "--witness",
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("job 1 on machine"));
}

#[test]
fn budget_errors_exit_2() {
    let sb = Sandbox::new();
    let path = sb.file("i2.json", &i2(2));
    let out = ics(&["decide", p(&path), "--budget", "3"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget exceeded"));

    let out = Command::new(env!("CARGO_BIN_EXE_ics"))
        .args(["decide", p(&path), "--json"])
        .env("SCHED_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["answer"], "error");
}

#[test]
fn reduce_then_minimize_three_bins() {
    let sb = Sandbox::new();
    let bp = sb.file("bp.json", THREE_BIN_BP);
    let inst = sb.path("reduced.json");
    let out = ics(&["reduce", p(&bp), "--c", "1", "--out", p(&inst)]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("A=8 B=96"), "{text}");
    assert!(text.contains("all properties hold"), "{text}");
    let reduced: Value = serde_json::from_str(&fs::read_to_string(&inst).unwrap()).unwrap();
    assert_eq!(reduced["jobs"].as_array().unwrap().len(), 12);
    assert_eq!(
        reduced["jobs"][0],
        serde_json::json!({"id": 0, "release": 0, "deadline": 104, "processing": 97})
    );

    let out = ics(&["minimize", p(&inst), "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["minimum_machines"], 3);
    assert_eq!(v["bounds"]["machine_lower_bound"]["value"], 3);

    let out = ics(&["decide", p(&inst), "--witness"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn reduce_edge_cases() {
    let sb = Sandbox::new();
    let trivial = sb.file("trivial.json", r#"{"volume": 100, "items": [1, 2], "bins": 2}"#);
    let out = ics(&["reduce", p(&trivial), "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["reduction"]["trivial"], true);
    assert_eq!(v["instance"]["jobs"].as_array().unwrap().len(), 1);
    assert!(v["reduction"]["summary"].as_str().unwrap().contains("trivial"));

    let huge = sb.file(
        "huge.json",
        r#"{"volume": 1, "items": [1099511627776, 1099511627776], "bins": 2}"#,
    );
    assert_eq!(code(&ics(&["reduce", p(&huge), "--c", "20"])), 2);
    let one = sb.file("one.json", r#"{"volume": 1, "items": [1], "bins": 1}"#);
    assert_eq!(code(&ics(&["reduce", p(&one)])), 2);
}

#[test]
fn minimize_small_instances() {
    let sb = Sandbox::new();
    let v = json(&ics(&["minimize", p(&sb.file("i2.json", &i2(1))), "--json"]));
    assert_eq!(v["minimum_machines"], 2);
    let v = json(&ics(&["minimize", p(&sb.file("i1.json", I1)), "--json"]));
    assert_eq!(v["minimum_machines"], 1);
    let out = ics(&["minimize", p(&sb.file("five.json", &five_units())), "--max", "4"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn generate_is_deterministic_and_round_trips() {
    let sb = Sandbox::new();
    let a = sb.path("a.json");
    let b = sb.path("b.json");
    for out in [&a, &b] {
        let res = ics(&[
            "generate",
            "--seed",
            "42",
            "--n",
            "7",
            "--m",
            "2",
            "--style",
            "slack:2",
            "--out",
            p(out),
        ]);
        assert_eq!(code(&res), 0);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());

    let generated: Value = serde_json::from_str(&text).unwrap();
    let analyzed = json(&ics(&["analyze", p(&a), "--json"]));
    assert!(analyzed["profile"]["slack"].as_i64().unwrap() <= 2);
    assert_eq!(analyzed["profile"]["n"], 7);

    // Rewriting the parsed document yields the same content.
    let again = sb.file("c.json", &serde_json::to_string(&generated).unwrap());
    let reparsed = json(&ics(&["analyze", p(&again), "--json"]));
    assert_eq!(analyzed["profile"], reparsed["profile"]);

    let loose = ics(&[
        "generate",
        "--seed",
        "1",
        "--n",
        "9",
        "--m",
        "1",
        "--style",
        "looseness:3/2",
        "--json",
    ]);
    let v = json(&loose);
    let lambda = v["profile"]["looseness"].as_str().unwrap();
    let (num, den) = lambda.split_once('/').unwrap_or((lambda, "1"));
    let (num, den): (i64, i64) = (num.parse().unwrap(), den.parse().unwrap());
    assert!(2 * num <= 3 * den, "looseness {lambda}");

    assert_eq!(
        code(&ics(&[
            "generate",
            "--seed",
            "1",
            "--n",
            "3",
            "--m",
            "1",
            "--style",
            "looseness:1/2"
        ])),
        2
    );
    assert_eq!(
        code(&ics(&[
            "generate", "--seed", "1", "--n", "3", "--m", "1", "--style", "wobbly"
        ])),
        2
    );
}

#[test]
fn generate_to_stdout_prints_the_instance() {
    let out = ics(&["generate", "--seed", "5", "--n", "3", "--m", "2"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["machines"], 2);
    assert_eq!(v["jobs"].as_array().unwrap().len(), 3);
}

#[test]
fn crosscheck_agrees() {
    let out = ics(&["crosscheck", "--seed", "11", "--count", "200", "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["crosscheck"]["mismatches"], 0);
    assert_eq!(v["crosscheck"]["bound_violations"], 0);

    let out = ics(&["crosscheck", "--count", "0"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 mismatches"));

    assert_eq!(code(&ics(&["crosscheck", "--n-max", "9", "--count", "1"])), 2);
}
