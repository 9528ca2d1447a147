use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const ECONOMY: &str = r#"
[economy]
private_rate = 0.06
social_rate = 0.02
death_rate = 0.04
technology = { kind = "cobb_douglas", level = 1.0, alpha = 0.3 }
"#;

const EQUAL_RATES: &str = r#"
[economy]
private_rate = 0.05
social_rate = 0.05
death_rate = 0.04
technology = { kind = "cobb_douglas", level = 1.0, alpha = 0.3 }
"#;

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new(scenario: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("scenario.toml"), scenario).unwrap();
        Self { dir }
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn run(&self, args: &[&str]) -> Output {
        let scenario = self.dir.path().join("scenario.toml");
        Command::new(env!("CARGO_BIN_EXE_growth"))
            .args(args)
            .arg("--scenario")
            .arg(&scenario)
            .arg("--out")
            .arg(self.out())
            .output()
            .unwrap()
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&std::fs::read_to_string(self.out().join(name)).unwrap()).unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn solve_writes_certified_policies_with_exact_headers() {
    let ws = Workspace::new(ECONOMY);
    let o = ws.run(&["solve"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = ws.json("manifest.json");
    assert_eq!(m["schema_version"], 1);
    let runs = m["details"]["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    for r in runs {
        assert_eq!(r["status"], "ok");
        let dir = ws.out().join(r["dir"].as_str().unwrap());
        let (header, rows) = read_csv(&dir.join("policy.csv"));
        assert_eq!(header, ["k", "sigma", "v", "w", "v_prime", "w_prime", "ie_residual", "de_residual"]);
        assert!(rows.iter().all(|row| row[6].abs() <= 1e-5 && row[7].abs() <= 1e-5));
        assert!(dir.join("verification.json").exists());
    }
}

#[test]
fn repeated_solves_are_byte_identical() {
    let a = Workspace::new(ECONOMY);
    let b = Workspace::new(ECONOMY);
    assert_eq!(code(&a.run(&["solve", "--threads", "2"])), 0);
    assert_eq!(code(&b.run(&["solve"])), 0);
    for run in ["run_00", "run_01", "run_02"] {
        for file in ["policy.csv", "valuepair.csv"] {
            let x = std::fs::read(a.out().join(run).join(file)).unwrap();
            let y = std::fs::read(b.out().join(run).join(file)).unwrap();
            assert!(x == y, "{run}/{file} differs");
        }
    }
}

#[test]
fn steady_states_outside_the_interval_give_partial_success() {
    let ws = Workspace::new(&format!("{ECONOMY}\n[runs]\nselect = \"list\"\nk_bar = [12.0, 30.0]\n"));
    assert_eq!(code(&ws.run(&["solve"])), 2);
    let runs = ws.json("manifest.json")["details"]["runs"].clone();
    assert_eq!(runs[0]["status"], "ok");
    assert_eq!(runs[1]["status"], "inadmissible");
    assert!(!ws.out().join("run_01/policy.csv").exists());

    let none = Workspace::new(&format!("{ECONOMY}\n[runs]\nselect = \"list\"\nk_bar = [5.0, 30.0]\n"));
    assert_eq!(code(&none.run(&["solve"])), 1);
}

#[test]
fn equal_rates_solve_once_at_the_modified_golden_rule() {
    let ws = Workspace::new(EQUAL_RATES);
    assert_eq!(code(&ws.run(&["solve"])), 0);
    let runs = ws.json("manifest.json")["details"]["runs"].clone();
    assert_eq!(runs.as_array().unwrap().len(), 1);
    let kb = runs[0]["k_bar"].as_f64().unwrap();
    assert!((0.3 * kb.powf(-0.7) - 0.05).abs() < 1e-12);
}

#[test]
fn verify_flags_a_perturbed_policy() {
    let ws = Workspace::new(&format!("{ECONOMY}\n[runs]\nfractions = [0.5]\n"));
    assert_eq!(code(&ws.run(&["solve"])), 0);
    assert_eq!(code(&ws.run(&["verify"])), 0);
    assert_eq!(ws.json("verify_report.json")["outcome"], "all_pass");

    let path = ws.out().join("run_00/valuepair.csv");
    let (header, rows) = read_csv(&path);
    let mut w = csv::Writer::from_path(&path).unwrap();
    w.write_record(&header).unwrap();
    for row in rows {
        let mut row = row;
        row[1] *= 1.05;
        row[2] *= 1.05;
        w.write_record(row.iter().map(|x| format!("{x:.16e}"))).unwrap();
    }
    w.flush().unwrap();

    assert_eq!(code(&ws.run(&["verify"])), 1);
    let report = ws.json("run_00/verify_report.json");
    assert_eq!(report["pass"], false);
    let failing: Vec<&str> = report["failing"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(failing.contains(&"ie_residual"), "{failing:?}");
}

#[test]
fn verify_without_artifacts_is_a_hard_failure() {
    let ws = Workspace::new(ECONOMY);
    let o = ws.run(&["verify"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing artifact"));
}

#[test]
fn failed_certificates_withhold_the_policy_unless_overridden() {
    let strict = format!("{ECONOMY}\n[runs]\nfractions = [0.5]\n[verify]\nie_tol = 1e-30\n");
    let ws = Workspace::new(&strict);
    assert_eq!(code(&ws.run(&["solve"])), 1);
    let run = ws.json("manifest.json")["details"]["runs"][0].clone();
    assert_eq!(run["status"], "unverified");
    assert_eq!(run["written"], false);
    assert!(!ws.out().join("run_00/policy.csv").exists());
    assert!(ws.out().join("run_00/verification.json").exists());

    assert_eq!(code(&ws.run(&["solve", "--allow-unverified"])), 1);
    assert!(ws.out().join("run_00/policy.csv").exists());
}

#[test]
fn scenario_errors_name_the_line() {
    let ws = Workspace::new(&ECONOMY.replace("death_rate = 0.04", "death_rate = \"often\""));
    let o = ws.run(&["solve"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 5"), "{err}");
}

#[test]
fn simulation_from_the_steady_state_is_constant() {
    let ws = Workspace::new(ECONOMY);
    let o = ws.run(&["simulate", "--k-bar", "12", "--k0", "12", "--horizon", "20"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&ws.out().join("trajectory.csv"));
    assert_eq!(header, ["t", "K", "C", "W", "psi", "residual_autonomous"]);
    for row in &rows {
        assert_eq!(row[1..5], rows[0][1..5]);
    }
}

#[test]
fn simulation_approaches_the_steady_state_monotonically() {
    let ws = Workspace::new(&format!("{ECONOMY}\n[runs]\nfractions = [0.5]\n[simulate]\nhorizon = 400.0\n"));
    assert_eq!(code(&ws.run(&["simulate"])), 0);
    let (_, rows) = read_csv(&ws.out().join("trajectory.csv"));
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    let d = &ws.json("simulate_manifest.json")["details"];
    let (terminal, limit) = (d["psi_terminal"].as_f64().unwrap(), d["psi_limit"].as_f64().unwrap());
    assert!((terminal - limit).abs() < 1e-6, "{terminal} vs {limit}");
    assert!(d["max_residual_autonomous"].as_f64().unwrap() < 1e-6);
}

#[test]
fn egalitarian_fiscal_schedule_is_age_independent() {
    let ws = Workspace::new(&format!("{ECONOMY}\n[runs]\nfractions = [0.5]\n[fiscal]\nrule = \"egalitarian\"\n"));
    assert_eq!(code(&ws.run(&["fiscal"])), 0);
    let (header, rows) = read_csv(&ws.out().join("tax_surface.csv"));
    assert_eq!(header, ["n", "t", "eta"]);
    let mut by_time = std::collections::BTreeMap::<u64, Vec<f64>>::new();
    for r in rows {
        by_time.entry(r[1].to_bits()).or_default().push(r[2]);
    }
    assert!(by_time.values().all(|etas| etas.iter().all(|&x| x == etas[0])));
    let s = &ws.json("fiscal_summary.json")["details"];
    assert!((s["n_tilde"].as_f64().unwrap() - 15.27).abs() < 5e-3);
    assert_eq!(s["n_tilde_certificate"]["certified"], true);
    assert!(s["k_m"].as_f64().is_some());
    assert_eq!(s["b"].as_array().unwrap().len(), 6);
}

#[test]
fn equal_rates_need_no_tax() {
    let ws = Workspace::new(EQUAL_RATES);
    assert_eq!(code(&ws.run(&["fiscal"])), 0);
    let (_, rows) = read_csv(&ws.out().join("tax_surface.csv"));
    assert!(rows.iter().all(|r| r[2] == 0.0));
}

#[test]
fn sweep_rows_are_sorted_and_flag_the_selection() {
    let ws = Workspace::new(&format!("{ECONOMY}\n[sweep]\npoints = 8\n"));
    assert_eq!(code(&ws.run(&["sweep"])), 0);
    let mut r = csv::Reader::from_path(ws.out().join("surface.csv")).unwrap();
    let recs: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    let k: Vec<f64> = recs.iter().map(|x| x[0].parse().unwrap()).collect();
    assert!(k.windows(2).all(|w| w[1] > w[0]));
    let lrp: Vec<&csv::StringRecord> = recs.iter().filter(|x| &x[3] == "1").collect();
    assert_eq!(lrp.len(), 1);
    let fp: f64 = lrp[0][4].parse().unwrap();
    assert!((fp - 0.02 * 0.10 / 0.06).abs() < 1e-12);
    for x in &recs {
        let stability: f64 = x[9].parse().unwrap();
        match &x[2] {
            "ok" => assert!(stability < 0.0 && x[7].parse::<f64>().unwrap() > 0.0),
            "inadmissible" => assert!(stability > 0.0),
            _ => {}
        }
    }
}

#[test]
fn oracle_runs_without_a_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_growth")).args(["oracle", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("oracle.json")).unwrap()).unwrap();
    assert!(v["details"]["de_slope_relative_error"].as_f64().unwrap() < 1e-6);
}
