use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cfuav(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cfuav"));
    cmd.args(args).env_remove("CFUAV_PLOTTER");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        &["cdf-se", "--set", "warp=9", "--out", out][..],
        &["cdf-se", "--set", "rho=1.5", "--out", out],
        &["cdf-se", "--set", "rho", "--out", out],
        &["cdf-he", "--variants", "cf,mesh", "--out", out],
        &["cdf-se", "--realizations", "0", "--out", out],
        &["rho-sweep", "--rho-grid", "0,2", "--out", out],
        &["rho-sweep", "--sweep", "antennas", "--out", out],
        &["trajectory", "--schemes", "spiral", "--out", out],
        &["cdf-se", "--config", "/nonexistent/cfuav.cfg", "--out", out],
    ] {
        let o = cfuav(args, &[]);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none(), "nothing written on config errors");
}

#[test]
fn run_writes_tables_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.cfg");
    fs::write(&cfg, "# small scene\nL = 6\nse_draws = 100\n").unwrap();
    let out = dir.path().join("res");
    let o = cfuav(
        &["cdf-se", "--config", cfg.to_str().unwrap(), "--realizations", "5", "--seed", "11", "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("cdf-se.json")).unwrap()).unwrap();
    assert_eq!(side["kind"], "cdf-se");
    assert_eq!(side["seed"], 11);
    assert_eq!(side["realizations"], 5);
    assert_eq!(side["config"]["n_aps"], "6");
    assert!(side["git_describe"].is_string());
    assert!(side["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(side["files"][0], "cdf_se.csv");
    assert_eq!(fs::read_to_string(out.join("cdf_se.csv")).unwrap().lines().count(), 1 + 3 * 5);
}

#[test]
fn runtime_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let o = cfuav(&["complexity", "--out", blocker.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn validation_outcome_sets_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let small = ["--set", "L=4", "--set", "N=1", "--out", out.to_str().unwrap()];
    let ok = cfuav(&[&["validate", "--realizations", "100000"][..], &small].concat(), &[]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let table = fs::read_to_string(out.join("validation.csv")).unwrap();
    assert!(table.lines().skip(1).all(|l| l.ends_with(",true")), "{table}");

    // far too few draws for a 2% tolerance
    let bad = cfuav(&[&["validate", "--realizations", "20"][..], &small].concat(), &[]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));
}

#[test]
fn plot_hands_valid_requests_to_the_renderer() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = d.to_str().unwrap();
    assert_eq!(code(&cfuav(&["cdf-he", "--realizations", "3", "--out", out], &[])), 0);
    let csv = d.join("cdf_he.csv");
    let png = d.join("fig.png");
    let args = ["plot", "cdf", "--in", csv.to_str().unwrap(), "--out", png.to_str().unwrap()];

    // valid inputs but no renderer configured
    assert_eq!(code(&cfuav(&args, &[])), 2);

    let log = d.join("args.txt");
    let script = d.join("renderer.sh");
    fs::write(&script, format!("#!/bin/sh\necho \"$@\" > {}\n", log.display())).unwrap();
    Command::new("chmod").arg("+x").arg(&script).status().unwrap();
    let o = cfuav(&args, &[("CFUAV_PLOTTER", &script)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&log).unwrap().trim(), args.join(" "));

    let bad = d.join("bad.csv");
    fs::write(&bad, "variant,rho\ncf,0.1\n").unwrap();
    let o = cfuav(&["plot", "sweep", "--in", bad.to_str().unwrap(), "--out", "x.png"], &[("CFUAV_PLOTTER", &script)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("median_se"));

    let failing = d.join("fail.sh");
    fs::write(&failing, "#!/bin/sh\nexit 3\n").unwrap();
    Command::new("chmod").arg("+x").arg(&failing).status().unwrap();
    assert_eq!(code(&cfuav(&args, &[("CFUAV_PLOTTER", &failing)])), 1);
}
