use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_associated-clt"))
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

const CLT_CONFIG: &str = r#"
kind = "clt-rate"
n_grid = [64, 256, 1024]
replicates = 3000
batches = 3
master_seed = 99

[model]
family = "geometric"
rho = 0.5
k = 20
innovation = { kind = "centered-exponential", rate = 1.0 }
"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn rerun_from_summary_is_bit_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "clt.toml", CLT_CONFIG);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run(&["clt-rate", "--config", &cfg, "--out", a.to_str().unwrap(), "--threads", "1"]);
    let summary = a.join("clt-rate.summary.json");
    run(&[
        "clt-rate",
        "--config",
        summary.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
        "--threads",
        "4",
    ]);
    let csv_a = std::fs::read(a.join("clt-rate.csv")).unwrap();
    let csv_b = std::fs::read(b.join("clt-rate.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    let text = String::from_utf8(csv_a).unwrap();
    assert!(text.starts_with("n,statistic,stderr,theory\n"));
    assert_eq!(text.lines().count(), 4);

    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&summary).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["master_seed"], 99);
    assert_eq!(json["resolved_config"]["q"], 3.0);
    assert!(json["resolved_config"]["theta"].as_f64().is_some());
    assert!(json["slopes"]["fitted"].as_f64().is_some());
}

#[test]
fn seed_flag_changes_the_draws() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "clt.toml", CLT_CONFIG);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run(&["clt-rate", "--config", &cfg, "--out", a.to_str().unwrap(), "--replicates", "600"]);
    run(&["clt-rate", "--config", &cfg, "--out", b.to_str().unwrap(), "--replicates", "600", "--seed", "5"]);
    assert_ne!(
        std::fs::read(a.join("clt-rate.csv")).unwrap(),
        std::fs::read(b.join("clt-rate.csv")).unwrap()
    );
}

#[test]
fn rates_table_without_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("r");
    run(&["rates", "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(out.join("rates-table.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,theta,exponent,regime,alpha_star,optimizer_exponent"));
    assert_eq!(lines.count(), 30 * 4);
    assert!(text.contains("\n3,1,0.15789473684210525,high-q,"));
}

#[test]
fn moddev_on_theta_one_model_cites_e8() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "md.toml",
        r#"
kind = "moddev"
lambda = 0.5
replicates = 4000000

[model]
family = "geometric"
rho = 0.5
k = 48
innovation = { kind = "centered-exponential", rate = 1.0 }
"#,
    );
    for sub in ["moddev", "validate"] {
        let out = bin().args([sub, "--config", &cfg]).output().unwrap();
        assert_eq!(out.status.code(), Some(2));
        let report: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        let violations = report["error"]["violations"].as_array().unwrap();
        assert!(violations.iter().any(|v| v["constraint"] == "E8"));
    }
}

#[test]
fn mismatched_subcommand_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "clt.toml", CLT_CONFIG);
    let out = bin().args(["frolov", "--config", &cfg]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["coupling"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
