use std::path::PathBuf;
use std::process::{Command, Output};

fn superds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superds")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("superds-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn verify_derham_reports_binomial_dims() {
    let out = superds(&["verify", "derham", "--p", "3", "--s", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let dims = report["checks"].as_array().unwrap().iter().find(|c| c["id"] == "derham:cohomology-dims").unwrap();
    assert_eq!(dims["computed"], "[1, 2, 1]");
    assert_eq!(report["parameters"]["s"], 2);
}

#[test]
fn verify_gl_passes_and_is_byte_identical() {
    let args = ["verify", "gl", "--m", "1", "--n", "1", "--i", "1", "--j", "2", "--p", "3", "--seed", "5"];
    let a = superds(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, superds(&args).stdout);
    let md = superds(&["verify", "gl", "--m", "1", "--n", "1", "--format", "md"]);
    assert!(String::from_utf8_lossy(&md.stdout).contains("| check | source |"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(superds(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(superds(&["verify", "gl", "--p", "3"]).status.code(), Some(2));
    assert_eq!(superds(&["verify", "derham", "--p", "4"]).status.code(), Some(2));
    assert_eq!(superds(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(superds(&["ds", "/definitely/missing.json"]).status.code(), Some(2));
}

#[test]
fn wrong_golden_data_fails_with_exit_one() {
    let dir = scratch("golden");
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/golden");
    for f in std::fs::read_dir(&src).unwrap() {
        let f = f.unwrap();
        std::fs::copy(f.path(), dir.join(f.file_name())).unwrap();
    }
    let path = dir.join("gl_rank_one.golden");
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("conj | planted-wrong | | t[i,i] | -t[j,i]\n");
    std::fs::write(&path, text).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_superds"))
        .args(["verify", "gl", "--m", "1", "--n", "1"])
        .env("SUPERDS_GOLDEN_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let bad: Vec<&serde_json::Value> = report["checks"].as_array().unwrap().iter().filter(|c| c["verdict"] != "pass").collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0]["id"], "conj:planted-wrong");
}

#[test]
fn ds_of_module_file() {
    let dir = scratch("ds");
    let path = dir.join("m.json");
    std::fs::write(&path, r#"{"p":5,"parity":[0,1,0],"x":[[0,0,0],[1,0,0],[0,0,0]]}"#).unwrap();
    let out = superds(&["ds", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ds"], serde_json::json!({"even": 1, "odd": 0}));
}

#[test]
fn inject_check_witness_and_cap() {
    let dir = scratch("inject");
    let path = dir.join("m.json");
    // z1 g_i = w_i, z2 acting by the companion matrix of t^2 + 1 over F_3.
    std::fs::write(&path, r#"{"p":3,"parity":[0,0,1,1],"actions":[[[0,0,0,0],[0,0,0,0],[1,0,0,0],[0,1,0,0]],[[0,0,0,0],[0,0,0,0],[0,1,0,0],[2,0,0,0]]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let out = superds(&["inject", "check", p]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["injective"], false);
    assert_eq!(v["witness"]["outcome"], "witness");
    assert_eq!(v["witness"]["degree"], 2);
    let capped = superds(&["inject", "check", p, "--max-ext", "1"]);
    assert_eq!(capped.status.code(), Some(1));
    assert_eq!(json(&capped)["witness"]["outcome"], "inconclusive");
}

#[test]
fn lie_and_weights() {
    let q = json(&superds(&["lie", "dsquotient", "--m", "2", "--n", "2", "--i", "1", "--j", "3"]));
    assert_eq!(q["g_x"], serde_json::json!({"even": 2, "odd": 2}));
    let max = json(&superds(&["lie", "dsquotient", "--n", "2"]));
    assert_eq!(max["dim_centralizer"], max["dim_bracket_image"]);
    let l = json(&superds(&["weights", "leq", "--n", "2", "--mu", "1,1", "--lambda", "0,0"]));
    assert_eq!((l["leq"].clone(), l["ell"].clone()), (serde_json::json!(true), serde_json::json!(1)));
    let i = json(&superds(&["weights", "interval", "--mu", "1,1", "--lambda", "0,0", "--dominant"]));
    assert_eq!(i["interval"], serde_json::json!([[0, 0], [1, 1]]));
    assert_eq!(superds(&["weights", "leq", "--n", "3", "--mu", "1,1", "--lambda", "0,0"]).status.code(), Some(2));
    let neg = json(&superds(&["weights", "leq", "--mu", "-1,0,2", "--lambda", "0,0,0"]));
    assert_eq!(neg["mu"], serde_json::json!([-1, 0, 2]));
}
