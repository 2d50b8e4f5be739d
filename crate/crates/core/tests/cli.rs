use std::process::{Command, Output};

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_padic-stark"));
    c.args(args).env_remove("PADIC_STARK_PREC");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn ideal_filtration_of_elementary_group() {
    let o = run(&["ideal-filtration", "--group", "3,3", "--n", "2"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["invariants"], serde_json::json!([3, 3, 3]));
}

#[test]
fn exit_codes_by_failure_class() {
    assert_eq!(run(&["verify-iq", "--disc", "-23", "--prime", "3"], &[]).status.code(), Some(0));
    assert_eq!(run(&["nonsense"], &[]).status.code(), Some(2));
    assert_eq!(run(&["gamma", "--prime", "7", "--at", "1/3", "--prec", "400"], &[]).status.code(), Some(3));
    assert_eq!(run(&["verify-iq", "--disc", "-23", "--prime", "5"], &[]).status.code(), Some(4));
    assert_eq!(run(&["refined-check", "--modulus", "4", "--s", "2", "--t", "3", "--calibration", "x"], &[]).status.code(), Some(5));
    // the stated U_p eigenvalue sign does not hold
    assert_eq!(run(&["eisenstein-check", "--chi-modulus", "3", "--prime", "7"], &[]).status.code(), Some(1));
}

#[test]
fn precision_from_env_and_flag() {
    let from_env = json(&run(&["gamma", "--prime", "5", "--at", "1/3"], &[("PADIC_STARK_PREC", "4")]));
    assert_eq!(from_env["prec"], 4);
    let flag_wins = json(&run(&["gamma", "--prime", "5", "--at", "1/3", "--prec", "6"], &[("PADIC_STARK_PREC", "4")]));
    assert_eq!(flag_wins["prec"], 6);
}

#[test]
fn config_file_and_deterministic_output() {
    let dir = std::env::temp_dir().join(format!("padic-stark-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "prec = 7\n").unwrap();
    let args = ["gross-koblitz", "--config", cfg.to_str().unwrap(), "--prime", "7", "--n", "4", "--a", "1"];
    let a = run(&args, &[]);
    let b = run(&args, &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["instance"]["prec"], 7);
    std::fs::write(&cfg, "prec = 7\nunknown = 1\n").unwrap();
    assert_eq!(run(&args, &[]).status.code(), Some(5));
    std::fs::remove_dir_all(&dir).ok();
}
