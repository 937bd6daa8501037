use std::path::PathBuf;
use std::process::{Command, Output};

const SMALL: [&str; 8] = ["--def-order", "2", "--u-window", "1", "--tensor-cap", "5", "--seed", "7"];

fn ggm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggm")).args(args).output().expect("run ggm")
}

fn verify_small(model: &str, extra: &[&str]) -> Output {
    let mut args = vec!["verify", "--model", model, "--n", "2", "--no-stabilize"];
    args.extend_from_slice(&SMALL);
    args.extend_from_slice(extra);
    ggm(&args)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ggm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn verify_passes_and_emits_json() {
    let out = verify_small("d", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["engine", "spec", "checks", "labels", "matrices", "representatives"] {
        assert!(v.get(key).is_some(), "missing {}", key);
    }
    assert_eq!(v["timings"], serde_json::json!({}));
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        if c["mandatory"].as_bool().unwrap() {
            assert!(matches!(c["status"].as_str().unwrap(), "pass" | "mod-boundary"), "{}", c);
        }
    }
    assert_eq!(v["spec"]["caps"]["k_max"], 2);
    assert_eq!(v["spec"]["seed"], 7);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let a = verify_small("aorb", &[]);
    let b = verify_small("aorb", &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn timings_are_opt_in() {
    let out = verify_small("d", &["--timings"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!v["timings"].as_object().unwrap().is_empty());
}

#[test]
fn markdown_format() {
    let out = verify_small("d", &["--format", "md"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with('#'));
    assert!(text.contains("d:mixed-complex"));
}

#[test]
fn insufficient_weight_cap_is_undecided() {
    let out = verify_small("d", &["--weight-cap", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_4() {
    assert_eq!(ggm(&["verify", "--n", "1"]).status.code(), Some(4));
    assert_eq!(ggm(&["verify", "--bogus"]).status.code(), Some(4));
    assert_eq!(ggm(&["verify", "--model", "e8"]).status.code(), Some(4));
    assert_eq!(ggm(&["verify", "--config", "/nonexistent/ggm.conf"]).status.code(), Some(4));
}

#[test]
fn config_file_and_out_path() {
    let conf = scratch("run.conf");
    let report = scratch("report.json");
    std::fs::write(
        &conf,
        format!("# small run\nmodel = d\nn = 2\ndef_order = 2\nu-window = 1\ntensor-cap = 5\nout = {}\n", report.display()),
    )
    .unwrap();
    let out = ggm(&["verify", "--config", conf.to_str().unwrap(), "--no-stabilize", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["spec"]["models"][0], "d");
    assert_eq!(v["spec"]["caps"]["u_max"], 1);
    let direct = verify_small("d", &[]);
    assert_eq!(direct.stdout, std::fs::read(&report).unwrap());
}

#[test]
fn dump_chains_lists_labels() {
    let out = ggm(&["dump-chains", "--model", "aorb", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for label in ["# alpha_0", "# alpha_2", "# beta"] {
        assert!(text.lines().any(|l| l == label || l.starts_with(label)), "missing {}", label);
    }
}

#[test]
fn caps_default_overrides_config_caps() {
    let conf = scratch("caps.conf");
    std::fs::write(&conf, "model = d\nweight-cap = 1\n").unwrap();
    let path = conf.to_str().unwrap();
    let args = ["dump-chains", "--config", path];
    assert_eq!(ggm(&args).status.code(), Some(0));
    let undecided = ggm(&["verify", "--config", path, "--no-stabilize", "--def-order", "2", "--u-window", "1"]);
    assert_eq!(undecided.status.code(), Some(3));
    let reset = ggm(&["verify", "--config", path, "--caps", "default", "--no-stabilize", "--def-order", "2", "--u-window", "1"]);
    assert_eq!(reset.status.code(), Some(0), "{}", String::from_utf8_lossy(&reset.stderr));
    let v: serde_json::Value = serde_json::from_slice(&reset.stdout).unwrap();
    assert_eq!(v["spec"]["caps"]["weight_cap"], 12);
    assert_eq!(v["spec"]["caps"]["k_max"], 2);
}
