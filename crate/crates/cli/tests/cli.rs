//! End-to-end runs of the `bdfdoc` binary: outputs, exit codes, config
//! files and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bdfdoc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdfdoc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json_report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON report")
}

/// Data rows of a CSV report (comment lines dropped).
fn csv_rows(o: &Output) -> Vec<String> {
    stdout(o).lines().filter(|l| !l.starts_with('#')).skip(1).map(str::to_string).collect()
}

#[test]
fn kernels_print_table_rows() {
    let o = bdfdoc(&["kernels", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(csv_rows(&o), vec!["4,25/12,-23/12,13/12,-1/4,,true"]);
    let o = bdfdoc(&["kernels", "--k", "2", "--format", "json"]);
    let r = json_report(&o);
    assert_eq!(r["results"][0]["kernels"], serde_json::json!(["3/2", "-1/2"]));
    assert_eq!(r["pass"], true);
}

#[test]
fn unsupported_order_is_a_usage_error() {
    let o = bdfdoc(&["kernels", "--k", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unsupported order"));
    assert_eq!(bdfdoc(&["starting", "--k", "2"]).status.code(), Some(2));
    assert_eq!(bdfdoc(&["kernels", "--bogus"]).status.code(), Some(2));
    assert_eq!(bdfdoc(&["converge", "--taus", "0.1,0.2"]).status.code(), Some(2));
    assert_eq!(bdfdoc(&["stability", "--preset", "dissipative_decay", "--beta", "0.5"]).status.code(), Some(2));
    assert_eq!(bdfdoc(&["converge", "--epsilon=-1"]).status.code(), Some(2));
}

#[test]
fn reports_embed_version_seed_and_config() {
    let o = bdfdoc(&["spectral", "--k", "3", "--m-list", "20", "--trials", "50", "--seed", "99"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json_report(&o);
    assert!(r["version"].as_str().unwrap().starts_with('v'));
    assert_eq!(r["seed"], 99);
    assert_eq!(r["config"]["m_list"], serde_json::json!([20]));
    assert_eq!(r["results"][0]["k"], 3);
    assert!(r["results"][0]["lambda_min_by_m"]["20"].is_number());
}

#[test]
fn certify_reports_per_m_eigenvalues() {
    let o = bdfdoc(&["certify", "--j-max", "60", "--m-list", "50,100", "--trials", "200", "--n-max", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json_report(&o);
    let checks = r["results"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3 * 8);
    assert!(checks.iter().all(|c| c["pass"] == true));
    for d in r["results"]["details"].as_array().unwrap() {
        let by_m = d["spectral"]["lambda_min_by_m"].as_object().unwrap();
        assert_eq!(by_m.keys().collect::<Vec<_>>(), vec!["100", "50"]);
    }
}

#[test]
fn tampered_kernel_fails_decay_certificate() {
    let o = bdfdoc(&[
        "certify",
        "--k",
        "3",
        "--flip-kernel-sign",
        "2",
        "--j-max",
        "40",
        "--m-list",
        "20",
        "--trials",
        "20",
        "--n-max",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let r = json_report(&o);
    let failed: Vec<&str> = r["results"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"decay"), "{failed:?}");
    assert!(stderr(&o).contains("decay"));
}

#[test]
fn scalar_convergence_orders() {
    for k in ["1", "3"] {
        let o = bdfdoc(&["converge", "--k", k, "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let r = json_report(&o);
        let mean = r["results"]["reports"][0]["mean_order"].as_f64().unwrap();
        assert!((mean - k.parse::<f64>().unwrap()).abs() <= 0.2, "k = {k}: {mean}");
    }
}

#[test]
fn pde_convergence_order_four() {
    let o = bdfdoc(&["converge", "--k", "4", "--mode", "pde", "--m", "1024", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json_report(&o);
    let report = &r["results"]["reports"][0];
    assert!((report["mean_order"].as_f64().unwrap() - 4.0).abs() <= 0.2);
    assert_eq!(report["spatial_check"]["pass"], true);
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let path = dir.path().join(name);
        let o = bdfdoc(&[
            "converge",
            "--k",
            "2,3",
            "--mode",
            "pde",
            "--m",
            "64",
            "--jobs",
            jobs,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv", "2");
    let b = run("b.csv", "2");
    let c = run("c.csv", "1");
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(String::from_utf8(a).unwrap().lines().any(|l| l.starts_with("3,6.2500000000000003e-3,")));
}

#[test]
fn stability_campaigns() {
    let o = bdfdoc(&["stability", "--k", "5", "--preset", "dissipative_decay"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 101);
    assert!(rows[5].starts_with("5,5,") && !rows[5].ends_with(','));

    let o = bdfdoc(&["stability", "--k", "3", "--preset", "oscillating_beta", "--mode", "scalar", "--tau-factor", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("# note: k=3: pass"));

    let o =
        bdfdoc(&["stability", "--k", "3", "--preset", "oscillating_beta", "--mode", "scalar", "--tau-factor", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("hypotheses unmet"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_file_with_command_line_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "campaign.toml",
        "seed = 7\nformat = \"json\"\n\n[converge]\nk = [2]\nmode = \"scalar\"\ntaus = [0.1, 0.05, 0.025]\n",
    );
    let o = bdfdoc(&["--config", &cfg, "converge"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json_report(&o);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["config"]["k"], serde_json::json!([2]));
    assert_eq!(r["config"]["taus"], serde_json::json!([0.1, 0.05, 0.025]));

    let o = bdfdoc(&["--config", &cfg, "converge", "--k", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(csv_rows(&o).iter().all(|l| l.starts_with("3,")));

    let bad = write(dir.path(), "bad.toml", "[converge]\nstep = 0.1\n");
    assert_eq!(bdfdoc(&["--config", &bad, "converge"]).status.code(), Some(2));
    let json_cfg = write(dir.path(), "c.json", r#"{"kernels": {"k": [5]}}"#);
    let o = bdfdoc(&["--config", &json_cfg, "kernels"]);
    assert_eq!(csv_rows(&o), vec!["5,137/60,-163/60,137/60,-21/20,1/5,true"]);
}

#[test]
fn doc_dump_matches_closed_form() {
    let o = bdfdoc(&["doc", "--k", "3", "--count", "3", "--n", "30", "--j-max", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&o);
    assert_eq!(rows[0], "3,0,6/11,5.4545454545454541e-1,5.4545454545454541e-1");
    assert!(rows[1].starts_with("3,1,42/121,"));
}

#[test]
fn starting_constants() {
    let o = bdfdoc(&["starting", "--k", "3", "--n-max", "60"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json_report(&o);
    assert_eq!(r["results"][0]["constant"]["certified"], "11/7");
    assert_eq!(r["results"][0]["cumulative"]["bound"], "55/48");
}
