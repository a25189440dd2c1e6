use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gp-excited"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env("GP_EXCITED_THREADS", "2")
        .output()
        .expect("binary runs")
}

#[test]
fn missing_config_exits_2_and_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.conf");
    let out = run(dir.path(), &["solve2d", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.conf"));
}

#[test]
fn out_of_range_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "q = 1.5\n").unwrap();
    let out = run(dir.path(), &["solve2d", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`q`"));
    assert_eq!(run(dir.path(), &["no-such-command"]).status.code(), Some(2));
}

#[test]
fn constants_csv_is_deterministic_and_manifested() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["constants", "--q-list", "2.1,2.5"];
    let (ra, rb) = (run(a.path(), &args), run(b.path(), &args));
    assert!(ra.status.success());
    assert_eq!(ra.stdout, rb.stdout);
    let csv = std::fs::read_to_string(a.path().join("constants.csv")).unwrap();
    assert!(csv.starts_with("q,u0,norm2_sq,a_q_star,tau_q,c_tilde_q,grad_sq,pohozaev_res,decay_c,decay_rate\n"));
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().last().unwrap().starts_with("# common_decay_bound"));
    let manifest = std::fs::read_to_string(a.path().join("constants.manifest")).unwrap();
    assert!(manifest.contains("threads = 2"));
    assert!(manifest.contains("artifact = constants.csv sha256="));
}

#[test]
fn solve_then_asymptotics_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = run(dir.path(), &["sweep", "--q", "2.2,2.1,2.05"]);
    assert!(sweep.status.success(), "{}", String::from_utf8_lossy(&sweep.stderr));
    let table = std::fs::read_to_string(dir.path().join("sweep/asymptotics.csv")).unwrap();
    let again = run(&dir.path().join("post"), &["asymptotics", "--reports", dir.path().join("sweep").to_str().unwrap()]);
    assert!(again.status.success());
    assert!(String::from_utf8_lossy(&again.stdout).starts_with(&table));
    assert_eq!(table.lines().count(), 4);
    let missing = run(dir.path(), &["asymptotics", "--reports", dir.path().join("nothing").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn path_energy_emits_summary_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["path-energy", "--samples", "8"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("segment,param,t,energy,mass,grad_sq\n"));
    assert_eq!(csv.lines().filter(|l| l.starts_with('g')).count(), 24);
    assert!(csv.lines().last().unwrap().starts_with("# t_star="));
}
