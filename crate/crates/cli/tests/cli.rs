use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kk-spectra"));
    c.env_remove("KK_SPECTRA_OUT");
    c
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_prints_the_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--list"], dir.path());
    assert!(o.status.success());
    let names: Vec<_> = stdout(&o).lines().map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    assert!(names.len() >= 8);
    for n in ["voltage-c6", "landau-k3", "ricci-crosscheck", "collapse-sequence", "holonomy-continuity", "delta-v-bump", "quotient-submetry", "mosco-probe"] {
        assert!(names.iter().any(|x| x == n), "{n} missing");
    }
}

#[test]
fn tag_filters_the_list() {
    let dir = tempfile::tempdir().unwrap();
    let all = stdout(&run(&["--list"], dir.path())).lines().count();
    let o = run(&["--list", "--tag", "convergence"], dir.path());
    let sub = stdout(&o);
    assert!(o.status.success());
    assert!(sub.lines().count() > 0 && sub.lines().count() < all);
    assert!(sub.lines().all(|l| l.contains("convergence")));
    let o = run(&["--list", "--tag", "no-such-tag"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
}

#[test]
fn builtin_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["voltage-c6", "--out", "res"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let d = dir.path().join("res/voltage-c6");
    for f in ["spectrum.csv", "checks.csv", "sectors.csv", "result.json", "spectrum.svg"] {
        assert!(d.join(f).is_file(), "{f}");
    }
    let csv = fs::read_to_string(d.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("scenario,i,j,lambda,residual"));
    assert_eq!(csv.lines().count(), 7);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("result.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    let leftovers = fs::read_dir(&d).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with(".tmp")).count();
    assert_eq!(leftovers, 0);
}

#[test]
fn landau_table_reports_three_lowest_states() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["landau-k3", "--out", "res"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let table = fs::read_to_string(dir.path().join("res/landau-k3/levels.csv")).unwrap();
    let row: Vec<_> = table.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "3");
    assert_eq!(row[4], "3");
}

#[test]
fn malformed_configs_are_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.toml"), "scenario = \"voltage-c6\"\nunknown = 1\n").unwrap();
    fs::write(dir.path().join("b.json"), r#"{"scenario": "voltage-c6", "params": {"alpha": 1.0}}"#).unwrap();
    fs::write(dir.path().join("c.toml"), "scenario = [\n").unwrap();
    fs::write(dir.path().join("d.yaml"), "scenario: voltage-c6\n").unwrap();
    fs::write(dir.path().join("e.json"), r#"{"scenario": "voltage-c6", "tolerances": {"bogus": 1.0}}"#).unwrap();
    for f in ["a.toml", "b.json", "c.toml", "d.yaml", "e.json", "missing.toml"] {
        assert_eq!(run(&["--config", f], dir.path()).status.code(), Some(2), "{f}");
    }
    assert_eq!(run(&["no-such-scenario"], dir.path()).status.code(), Some(2));
    assert!(!dir.path().join("kk-out").exists());
}

#[test]
fn failed_assertions_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "scenario = \"holonomy-continuity\"\nname = \"strict\"\n[tolerances]\ngap-ratio = 2.5\n";
    fs::write(dir.path().join("s.toml"), cfg).unwrap();
    let o = run(&["--config", "s.toml", "--out", "res"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL strict"));
    assert!(dir.path().join("res/strict/checks.csv").is_file());
}

#[test]
fn config_output_and_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "{\"scenario\": \"casimir-table\", \"output\": {\"dir\": \"mine\", \"plots\": false}}";
    fs::write(dir.path().join("c.json"), cfg).unwrap();
    assert!(run(&["--config", "c.json"], dir.path()).status.success());
    assert!(dir.path().join("mine/casimir.csv").is_file());
    assert!(!dir.path().join("mine/discrete.svg").exists());
    let o = bin().args(["casimir-table", "--out", "ignored"]).env("KK_SPECTRA_OUT", "from-env").current_dir(dir.path()).output().unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("from-env/casimir-table/checks.csv").is_file());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["voltage-random", "quotient-submetry", "holonomy-continuity", "mosco-probe"];
    let mut args: Vec<&str> = names.to_vec();
    args.extend(["--seed", "99", "--jobs", "1", "--out", "one"]);
    assert!(run(&args, dir.path()).status.success());
    let mut args: Vec<&str> = names.to_vec();
    args.extend(["--seed", "99", "--jobs", "4", "--out", "two"]);
    assert!(run(&args, dir.path()).status.success());
    for n in names {
        for f in ["spectrum.csv", "checks.csv"] {
            let a = fs::read(dir.path().join("one").join(n).join(f)).unwrap();
            let b = fs::read(dir.path().join("two").join(n).join(f)).unwrap();
            assert_eq!(a, b, "{n}/{f}");
        }
    }
    assert!(run(&["voltage-random", "--seed", "100", "--out", "three"], dir.path()).status.success());
    let a = fs::read(dir.path().join("one/voltage-random/spectrum.csv")).unwrap();
    let c = fs::read(dir.path().join("three/voltage-random/spectrum.csv")).unwrap();
    assert_ne!(a, c);
}
