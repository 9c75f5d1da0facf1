use std::process::{Command, Output};

use serde_json::Value;

fn riccati(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riccati")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report(o: &Output) -> Vec<Value> {
    serde_json::from_slice::<Value>(&o.stdout).expect("json report").as_array().unwrap().clone()
}

#[test]
fn print_examples() {
    let o = riccati(&["print", "chain", "3", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "u3 + 4*u*u2 + 3*u1^2 + 6*u^2*u1 + u^4");
    assert_eq!(stdout(&riccati(&["print", "chain", "0", "1"])).trim(), "u");
    assert_eq!(stdout(&riccati(&["print", "lenard-j", "2"])).trim(), "u2 + 3*u^2");
    assert_eq!(stdout(&riccati(&["print", "kdv-gradients", "3"])).trim(), "u2 + 1/2*u^2");
    assert_eq!(stdout(&riccati(&["print", "pii-hierarchy", "1"])).trim(), "v2 - 2*v^3 - x*v - beta");
    assert!(stdout(&riccati(&["print", "chain", "2", "k"])).contains("k^2*u^3"));
    assert!(stdout(&riccati(&["print", "f-xvi-template"])).contains("E"));
}

#[test]
fn print_usage_errors() {
    assert_eq!(riccati(&["print", "chain"]).status.code(), Some(2));
    assert_eq!(riccati(&["print", "lenard-j", "0"]).status.code(), Some(2));
    assert_eq!(riccati(&["print", "nothing"]).status.code(), Some(2));
    assert_eq!(riccati(&["print", "chain", "2", "(("]).status.code(), Some(2));
}

#[test]
fn integrate_hill_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hill.csv");
    let o = riccati(&["integrate", "hill", "--v", "trig:1;0.3,0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y0,y1");
    assert_eq!(lines.len(), 513);
    let last_x: f64 = lines[512].split(',').next().unwrap().parse().unwrap();
    assert!((last_x - std::f64::consts::TAU).abs() < 1e-12);
}

#[test]
fn integrate_truncates_at_a_pole() {
    let o = riccati(&["integrate", "pii", "--alpha", "0", "--ics", "0,1", "--domain", "0,10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let trailer = text.lines().last().unwrap();
    assert!(trailer.starts_with("# truncated at x="), "{trailer}");
    let x: f64 = trailer.trim_start_matches("# truncated at x=").parse().unwrap();
    assert!((x - 1.736).abs() < 0.01, "{x}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("pole"));
}

#[test]
fn integrate_usage_errors() {
    assert_eq!(riccati(&["integrate", "hill", "--v", "cosine"]).status.code(), Some(2));
    assert_eq!(riccati(&["integrate", "hill", "--domain", "3,1"]).status.code(), Some(2));
    assert_eq!(riccati(&["integrate", "hill", "--ics", "1,2,3"]).status.code(), Some(2));
    assert_eq!(riccati(&["integrate", "y2 + z*y"]).status.code(), Some(2));
}

#[test]
fn integrate_numerical_failure() {
    // y' = y^2 from y = 1 blows up at x = 1
    assert_eq!(riccati(&["integrate", "y1 - y^2", "--ics", "1", "--domain", "0,0"]).status.code(), Some(2));
    let o = riccati(&["integrate", "y1 - y^2", "--ics", "1", "--domain", "0,2", "--grid", "11"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# truncated at x="));
}

#[test]
fn verify_chain_identities() {
    let o = riccati(&["verify", "chain-identities"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r.len(), 5);
    for e in &r {
        assert_eq!(e["pass"], true);
        assert_eq!(e["max_abs_residual"], 0.0);
        for key in ["check", "params", "grid", "max_abs_residual", "rms_residual", "tolerance", "pass", "notes"] {
            assert!(e.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn verify_pinney_is_deterministic() {
    let args = ["verify", "pinney", "--v", "trig:1;0.3,0", "--seed", "7"];
    let a = riccati(&args);
    let b = riccati(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert!(r[0]["max_abs_residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(r[0]["params"]["seed"], "7");
    let c = riccati(&["verify", "pinney", "--v", "trig:1;0.3,0", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_sd_pii_records_the_discrepancy() {
    let o = riccati(&["verify", "sd-pii", "--alpha", "0", "--ics", "0,1", "--domain", "0,2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert!(r.iter().all(|e| e["pass"] == true));
    let notes: Vec<String> = r.iter().flat_map(|e| e["notes"].as_array().unwrap().clone()).map(|n| n.to_string()).collect();
    assert!(notes.iter().any(|n| n.contains("x/2")));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(riccati(&["verify", "no-such-check"]).status.code(), Some(2));
    assert_eq!(riccati(&["verify", "lax", "--tol", "zero"]).status.code(), Some(2));
    assert_eq!(riccati(&["verify"]).status.code(), Some(2));
    // the doubling construction leaves a defect for k != 1
    let o = riccati(&["verify", "riccati2", "--k", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    // psi(0) = 0 leaves no Airy-seeded Riccati solution to start from
    let o = riccati(&["verify", "pii-airy", "--ics", "0,1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    // a failed recovery still reports which run it belongs to
    let o = riccati(&["verify", "sd-pii", "--ics", "50,0", "--domain", "0,1"]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&o);
    let rec = r.iter().find(|e| e["params"]["part"] == "recovery").unwrap();
    assert_eq!(rec["pass"], false);
    assert_eq!(rec["params"]["ics"], "50,0");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# pinney settings\nseed = 3\ngrid = 64\n").unwrap();
    let o = riccati(&["verify", "pinney", "--config", cfg.to_str().unwrap(), "--grid", "80"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r[0]["params"]["seed"], "3");
    assert_eq!(r[0]["grid"]["n"], 80);
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(riccati(&["verify", "pinney", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_all_passes_in_name_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = riccati(&["verify", "all", "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out).unwrap();
    let r: Vec<Value> = serde_json::from_str::<Value>(&text).unwrap().as_array().unwrap().clone();
    let failing: Vec<&Value> = r.iter().filter(|e| e["pass"] != true).collect();
    assert!(failing.is_empty(), "{failing:#?}");
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<&str> = r.iter().map(|e| e["check"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    for check in riccati_cli::checks::names() {
        assert!(names.contains(&check), "{check} missing");
    }
}
