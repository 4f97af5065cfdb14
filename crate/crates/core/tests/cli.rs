use std::process::{Command, Output};

fn seminf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seminf")).args(args).output().expect("spawn seminf")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn exit_codes() {
    assert_eq!(seminf(&["--help"]).status.code(), Some(0));
    assert_eq!(seminf(&["--version"]).status.code(), Some(0));
    assert_eq!(seminf(&[]).status.code(), Some(2));
    assert_eq!(seminf(&["character", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(seminf(&["character", "--root-datum", "G2"]).status.code(), Some(2));
    assert_eq!(seminf(&["semiinf", "--root-datum", "A2"]).status.code(), Some(2));
    assert_eq!(seminf(&["verify-formula", "--level", "-3/2"]).status.code(), Some(2));
    assert_eq!(seminf(&["uq-dims", "--debug-corrupt", "sign"]).status.code(), Some(2));
    assert_eq!(seminf(&["qcoh", "--lambda", "-1"]).status.code(), Some(2));
    assert_eq!(seminf(&["kl-labels", "--level", "1/2"]).status.code(), Some(2));
    assert_eq!(seminf(&["uq-dims", "--ell", "4"]).status.code(), Some(2));
    assert_eq!(seminf(&["qcoh", "--ell", "3"]).status.code(), Some(2));
    let boundary = seminf(&["verify-formula", "--lambda", "3", "--depth", "2"]);
    assert_eq!(boundary.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&boundary.stderr).contains("too small"));
    let fail = seminf(&["qcoh", "--debug-corrupt", "differential"]);
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(json(&fail)["verdict"], "fail");
}

#[test]
fn report_shape() {
    let out = seminf(&["uq-dims", "--root-datum", "A2", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["task"], "uq-dims");
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["timing"]["recorded"], false);
    assert_eq!(v["conventions_digest"].as_str().unwrap().len(), 64);
    assert!(v["config"].get("out").is_none());
    let heights: Vec<u64> = v["data"]["by_height"].as_array().unwrap().iter().map(|r| r["kd"].as_u64().unwrap()).collect();
    assert_eq!(heights, [1, 2, 4, 6]);
    let timed = json(&seminf(&["uq-dims", "--timing"]));
    assert_eq!(timed["timing"]["recorded"], true);
}

#[test]
fn csv_small_quantum_group() {
    let out = seminf(&["uq-dims", "--ell", "3", "--depth", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "degree,free,kd,small,lusztig\n0,1,1,1,1\n1,1,1,1,1\n2,1,1,1,1\n3,1,1,0,1\n");
}

#[test]
fn out_file_and_config_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "root_datum = \"A2\"\nlambda = \"0..1\"\nenergy = 2\ndepth = 2\n").unwrap();
    let mut reports = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("r{i}.json"));
        let out = seminf(&["character", "--config", cfg.to_str().unwrap(), "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
        reports.push(std::fs::read(path).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let v: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    assert_eq!(v["config"]["root_datum"], "A2");
    assert_eq!(v["config"]["lambdas"].as_array().unwrap().len(), 4);
    let flag_wins = json(&seminf(&["character", "--config", cfg.to_str().unwrap(), "--energy", "1"]));
    assert_eq!(flag_wins["config"]["energy"], 1);
}

#[test]
fn seed_does_not_change_results() {
    let args = |seed: &'static str| ["semiinf", "--lambda", "1", "--energy", "2", "--depth", "2", "--format", "csv", "--seed", seed];
    assert_eq!(seminf(&args("0")).stdout, seminf(&args("99")).stdout);
}
