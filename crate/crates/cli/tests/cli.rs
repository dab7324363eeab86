use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn vortexlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vortexlab"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .env("VORTEXLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let end = text.rfind("\n}").map(|i| i + 2).unwrap_or(text.len());
    serde_json::from_str(&text[..end]).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn write(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    fs::write(&path, value.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

fn point(z: (f64, f64)) -> Value {
    json!({"re": z.0, "im": z.1})
}

/// Tracks at −2−i, 3+4i (twice) and four at ν e^{iν}.
fn spiral_family(scales: &[f64]) -> Value {
    let fixed = |z: (f64, f64)| Value::Array(scales.iter().map(|_| point(z)).collect());
    let spiral = Value::Array(scales.iter().map(|&nu| point((nu * nu.cos(), nu * nu.sin()))).collect());
    json!({
        "scales": scales,
        "tracks": [fixed((-2.0, -1.0)), fixed((3.0, 4.0)), fixed((3.0, 4.0)), spiral, spiral, spiral, spiral],
    })
}

#[test]
fn index_and_maslov_arithmetic() {
    let dir = TempDir::new().unwrap();
    let out = vortexlab(dir.path(), &["index", "--dimM", "2", "--dimG", "1", "--chern", "7"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["fredholm_index"], 14);

    let out = vortexlab(dir.path(), &["maslov", "--family", "zd-id", "--d", "2", "--n", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["maslov_index"], 12);
    let out = vortexlab(dir.path(), &["maslov", "--family", "diag", "--degrees", "1,-3,2"]);
    assert_eq!(stdout_json(&out)["maslov_index"], 0);
    let out = vortexlab(dir.path(), &["maslov", "--family", "zd-id", "--d", "-2", "--n", "2"]);
    assert_eq!(stdout_json(&out)["maslov_index"], -8);
    let out = vortexlab(dir.path(), &["maslov", "--family", "const", "--n", "2"]);
    assert_eq!(stdout_json(&out)["maslov_index"], 0);

    let out = vortexlab(dir.path(), &["index", "--dimM", "3", "--dimG", "1", "--chern", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn maslov_of_a_loop_file() {
    let dir = TempDir::new().unwrap();
    let samples: Vec<Value> = (0..16)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
            json!([point((t.cos(), t.sin()))])
        })
        .collect();
    let path = write(dir.path(), "loop.json", &json!({"dim": 1, "samples": samples}));
    let out = vortexlab(dir.path(), &["maslov", "--loop", &path]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["maslov_index"], 2);

    let bad = write(dir.path(), "bad.json", &json!({"dim": 1, "samples": [[point((2.0, 0.0))], [point((2.0, 0.0))]]}));
    assert_eq!(vortexlab(dir.path(), &["maslov", "--loop", &bad]).status.code(), Some(2));
}

#[test]
fn weighted_checks() {
    let dir = TempDir::new().unwrap();
    let out = vortexlab(dir.path(), &["hardy", "--fn", "const"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["ok"], true);
    assert_eq!(report["lhs"], 0.0);

    let out = vortexlab(dir.path(), &["hardy", "--fn", "bracket", "--p", "4", "--lambda", "0.5"]);
    assert_eq!(stdout_json(&out)["constant"], 4.0);
    assert_eq!(vortexlab(dir.path(), &["hardy", "--p", "1.5"]).status.code(), Some(2));

    let out = vortexlab(dir.path(), &["kernel", "--d", "3"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["ok"], true);
    assert_eq!(report["index"], report["expected_index"]);
    assert!(dir.path().join("kernel.json").exists());
}

#[test]
fn solve_writes_summary_and_fields() {
    let dir = TempDir::new().unwrap();
    let zeros = write(dir.path(), "z.json", &json!({"zeros": [{"re": 0.0, "im": 0.0, "mult": 1}]}));
    let out = vortexlab(dir.path(), &["solve", "--zeros", &zeros, "--grid", "512"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    let ratio = summary["energy_over_pi"].as_f64().unwrap();
    assert!((0.98..=1.02).contains(&ratio), "{ratio}");
    assert!(summary["decay_slope"].as_f64().unwrap() <= -3.5);
    let csv = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(csv.starts_with("x,y,h,re_f,im_f,phi,psi,e_w\n"));
    assert!(csv.lines().count() > 1000);

    let empty = write(dir.path(), "empty.json", &json!({"zeros": []}));
    let out = vortexlab(dir.path(), &["solve", "--zeros", &empty]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["energy"], 0.0);
}

#[test]
fn solve_exit_codes() {
    let dir = TempDir::new().unwrap();
    let cluster = json!({"zeros": [
        {"re": 0.0, "im": 0.0, "mult": 2}, {"re": 0.6, "im": 0.0, "mult": 1}, {"re": 0.3, "im": 0.5, "mult": 1}
    ]});
    let zeros = write(dir.path(), "z.json", &cluster);
    assert_eq!(vortexlab(dir.path(), &["solve", "--zeros", &zeros, "--grid", "64"]).status.code(), Some(3));
    let bad = write(dir.path(), "bad.json", &json!({"zeros": [{"re": 0.0, "im": 0.0, "mult": 0}]}));
    assert_eq!(vortexlab(dir.path(), &["solve", "--zeros", &bad]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(vortexlab(dir.path(), &["solve", "--zeros", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn degrees_recovers_the_configuration() {
    let dir = TempDir::new().unwrap();
    let zeros = write(
        dir.path(),
        "z.json",
        &json!({"zeros": [{"re": -2.0, "im": -1.0, "mult": 1}, {"re": 3.0, "im": 4.0, "mult": 2}]}),
    );
    let out = vortexlab(dir.path(), &["degrees", "--zeros", &zeros, "--grid", "512"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let found = stdout_json(&out);
    let mults: Vec<u64> = found["zeros"].as_array().unwrap().iter().map(|z| z["mult"].as_u64().unwrap()).collect();
    assert_eq!(mults, [1, 2]);
}

#[test]
fn tree_extraction() {
    let dir = TempDir::new().unwrap();
    let scales: Vec<f64> = (1..=10).map(|k| 10.0 * k as f64).collect();
    let family = write(dir.path(), "family.json", &spiral_family(&scales));
    let out = vortexlab(dir.path(), &["tree", "--family", &family]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let tree: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("tree.json")).unwrap()).unwrap();
    let mut degrees: Vec<u64> = tree["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["type"] == "T1")
        .map(|v| v["config"]["zeros"].as_array().unwrap().iter().map(|z| z["mult"].as_u64().unwrap()).sum())
        .collect();
    degrees.sort();
    assert_eq!(degrees, [3, 4]);
    for name in ["reparams.json", "extraction.json", "convergence.json"] {
        assert!(dir.path().join(name).exists());
    }

    // byte-identical on re-run
    let first = fs::read(dir.path().join("tree.json")).unwrap();
    vortexlab(dir.path(), &["tree", "--family", &family]);
    assert_eq!(first, fs::read(dir.path().join("tree.json")).unwrap());

    let stationary = json!({"scales": [1, 2, 3, 4], "tracks": [vec![point((1.0, 1.0)); 4]]});
    let path = write(dir.path(), "stationary.json", &stationary);
    assert!(vortexlab(dir.path(), &["tree", "--family", &path]).status.success());
    let tree: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("tree.json")).unwrap()).unwrap();
    assert_eq!(tree["vertices"].as_array().unwrap().len(), 1);

    let short = write(dir.path(), "short.json", &spiral_family(&[10.0, 20.0, 30.0]));
    assert_eq!(vortexlab(dir.path(), &["tree", "--family", &short]).status.code(), Some(4));
    let broken = write(dir.path(), "broken.json", &json!({"scales": [2, 1, 3, 4], "tracks": [vec![point((0.0, 0.0)); 4]]}));
    assert_eq!(vortexlab(dir.path(), &["tree", "--family", &broken]).status.code(), Some(2));
}

#[test]
fn check_reports_verdicts() {
    let dir = TempDir::new().unwrap();
    let scales: Vec<f64> = (0..6).map(|k| 1e3 * 4f64.powi(k)).collect();
    let family = write(dir.path(), "family.json", &spiral_family(&scales));
    let out = vortexlab(dir.path(), &["tree", "--family", &family]);
    assert!(out.status.success());
    let tree = dir.path().join("tree.json");
    let maps = dir.path().join("reparams.json");
    let args = ["check", "--family", &family, "--tree", tree.to_str().unwrap(), "--maps", maps.to_str().unwrap()];
    let out = vortexlab(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let other = write(dir.path(), "other.json", &spiral_family(&scales.iter().map(|s| s * 1.5).collect::<Vec<_>>()));
    let args = ["check", "--family", &other, "--tree", tree.to_str().unwrap(), "--maps", maps.to_str().unwrap()];
    assert_eq!(vortexlab(dir.path(), &args).status.code(), Some(1));
}

#[test]
fn selftest_runs_a_single_criterion() {
    let dir = TempDir::new().unwrap();
    let out = vortexlab(dir.path(), &["selftest", "--only", "11"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("PASS criterion 11"), "{text}");
    assert_eq!(vortexlab(dir.path(), &["selftest", "--only", "12"]).status.code(), Some(2));
}
