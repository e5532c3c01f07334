use std::path::PathBuf;
use std::process::{Command, Output};

fn fdw(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fdw"));
    c.args(args).env_remove("FDW_SEED");
    if let Some(s) = env_seed {
        c.env("FDW_SEED", s);
    }
    c.output().expect("binary runs")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fdw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SPEC: &str = r#"{
  "config": {"na_t": 3, "na_r": 2, "nb_t": 3, "nb_r": 2, "ne": 5, "rho": 1.0},
  "geometry": {"r": 5.0, "path_loss_exp": 3.5},
  "sweep": {"axis": "x", "start": -5, "stop": 5, "step": 5},
  "runs": 3,
  "schemes": ["proposed", "mf", "zf", "oneway"],
  "seed": 4
}"#;

#[test]
fn sdof_table_for_paper_examples() {
    let o = fdw(&["sdof", "-a", "5,2,4,3,5", "-a", "4,6,8,2,5", "-a", "7,4,7,4,2"], None);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("na_t,na_r,nb_t,nb_r,ne,case"));
    assert!(lines[1].starts_with("5,2,4,3,5,A(i)a,0,0,0,0,0,1,2,1,"));
    assert!(lines[2].starts_with("4,6,8,2,5,B,0,0,1,2,0,4,0,0,"));
    assert!(lines[3].starts_with("7,4,7,4,2,D,1,4,1,4,2,0,0,0,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn sdof_json_output() {
    let o = fdw(&["sdof", "-a", "3,2,3,2,5", "--json"], None);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["constructive"]["ds_a"], 1);
    assert_eq!(v[0]["constructive"]["ds_b"], 1);
}

#[test]
fn sweep_writes_reproducible_csv() {
    let spec = scratch("spec.json", SPEC);
    let a = fdw(&["sweep", spec.to_str().unwrap()], None);
    let b = fdw(&["sweep", spec.to_str().unwrap()], None);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(
        text.lines().next().unwrap(),
        "scheme,axis,value,rho,alpha,mean_rs_a,mean_rs_b,mean_rs_sum,runs,seed"
    );
    assert_eq!(text.lines().count(), 1 + 3 * 4);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",3,4")));

    let out = spec.with_file_name("out.csv");
    let c = fdw(&["sweep", spec.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert!(c.status.success());
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn env_seed_and_runs_override() {
    let spec = scratch("spec2.json", SPEC);
    let o = fdw(&["sweep", spec.to_str().unwrap(), "--runs", "2"], Some("17"));
    assert!(o.status.success());
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",2,17")));
    let bad = fdw(&["sweep", spec.to_str().unwrap()], Some("minus one"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn config_errors_exit_with_two() {
    let broken = scratch("broken.json", r#"{"config": {"na_t": 3}}"#);
    assert_eq!(fdw(&["sweep", broken.to_str().unwrap()], None).status.code(), Some(2));
    let unordered = scratch(
        "unordered.json",
        &SPEC.replace(r#""start": -5, "stop": 5"#, r#""start": 5, "stop": -5"#),
    );
    assert_eq!(fdw(&["sweep", unordered.to_str().unwrap()], None).status.code(), Some(2));
    assert_eq!(fdw(&["sweep", "/nonexistent/spec.json"], None).status.code(), Some(2));
    assert_eq!(fdw(&["sdof", "-a", "1,2,3"], None).status.code(), Some(2));
    assert_eq!(fdw(&["slope", "-a", "3,2,3,2,5", "--grid", "60:50:10"], None).status.code(), Some(2));
}

#[test]
fn slope_of_default_scenario() {
    let o = fdw(&["slope", "-a", "3,2,3,2,5"], None);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("sdof (1, 1) slopes "), "{text}");
    let nums: Vec<f64> = text.split_whitespace().rev().take(2).map(|x| x.parse().unwrap()).collect();
    assert!(nums.iter().all(|s| (s - 1.0).abs() <= 0.15));
}

#[test]
fn gsvd_self_test() {
    let o = fdw(&["gsvd-check", "--pairs", "200"], None);
    assert!(o.status.success());
    assert!(stdout(&o).trim_end().ends_with("dims 200/200 ok"));
}
