use std::fs;
use std::process::{Command, Output};

fn kinkwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinkwave")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn speed_reports_sqrt2_for_model_b() {
    let o = kinkwave(&["speed", "--model", "modelB:r=2", "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["c2"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["existence"][0]["verdict"], "admissible");
    assert!(v["existence"][1]["verdict"].as_str().unwrap().starts_with("no wave"));
}

#[test]
fn profile_writes_csv_with_anchor_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.csv");
    let o = kinkwave(&["profile", "--model", "quadratic", "--nu", "0.5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# model: quadratic"));
    assert!(text.contains("# method: closed-form"));
    assert!(text.lines().any(|l| l == "0.000000000000,0.5,0.425"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4002);
}

#[test]
fn profile_methods_agree() {
    let run = |method: &str| {
        let o = kinkwave(&["profile", "--model", "modelC", "--method", method, "--samples", "201"]);
        assert!(o.status.success(), "{method}: {}", stderr(&o));
        stdout(&o)
    };
    let ode = run("ode");
    assert!(ode.contains("# method: ode"));
    let quad = run("quadrature");
    assert!(quad.contains("# method: quadrature"));
    let o = kinkwave(&["profile", "--model", "modelC", "--method", "closed-form"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("no closed form"), "{}", stderr(&o));
}

#[test]
fn linear_model_has_no_profile() {
    let o = kinkwave(&["profile", "--model", "linear"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("no heteroclinic traveling wave"), "{}", stderr(&o));
    let dir = tempfile::tempdir().unwrap();
    let o = kinkwave(&["sweep", "--model", "linear", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn wrong_speed_sign_is_reported() {
    let o = kinkwave(&["profile", "--model", "quadratic", "--c-sign", "-1"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("wrong sign"), "{}", stderr(&o));
}

#[test]
fn sweep_writes_one_csv_per_viscosity_and_a_script() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = kinkwave(&["sweep", "--model", "modelD", "--nu", "0.25,0.5,1", "--samples", "401", "--out-dir", d]);
    assert!(o.status.success(), "{}", stderr(&o));
    for nu in ["0.25", "0.5", "1"] {
        assert!(dir.path().join(format!("modelD_nu{nu}.csv")).exists());
    }
    let script = fs::read_to_string(dir.path().join("modelD.gp")).unwrap();
    assert!(script.contains("layout 1,2"));
    assert_eq!(script.matches("using 1:2").count(), 3);
}

#[test]
fn config_file_drives_a_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("profiles");
    fs::write(
        &cfg,
        format!(
            "[model]\nname = \"cubic\"\ngpp0 = 0.5\ngppp0 = 1\n\n[wave]\nnu = [0.5, 1.0]\n\n\
             [numeric]\nsamples = 301\n\n[output]\nout_dir = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = kinkwave(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("cubic_nu0.5.csv").exists() && out.join("cubic_nu1.csv").exists());
    assert!(out.join("cubic.gp").exists());
}

#[test]
fn bad_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[model]\nname = \"modelB\"\n\n[wave]\nspeed = 2\n").unwrap();
    let o = kinkwave(&["profile", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("speed"), "{}", stderr(&o));
}

#[test]
fn equilibria_lists_both_boundary_states() {
    let o = kinkwave(&["equilibria", "--model", "quadratic", "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let eq = v["equilibria"].as_array().unwrap();
    assert_eq!(eq.len(), 2);
    let stable = eq.iter().filter(|e| e["stability"] == "stable").count();
    assert_eq!(stable, 1);
}

#[test]
fn validate_single_model_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = kinkwave(&["validate", "--model", "modelB", "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}
