use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coopsense::montecarlo::analytic_rates;
use coopsense_cli::{ExperimentSpec, CSV_HEADER};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_coopsense"));
    c.env_remove("COOPSENSE_OUT_DIR");
    c
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("specs")
        .join(format!("{name}.json"))
}

fn small_spec() -> serde_json::Value {
    serde_json::json!({
        "name": "small",
        "sweep": { "axis": "snr_db", "values": [-6.0, -3.0, 0.0] },
        "schemes": [
            { "kind": "fixed" },
            { "kind": "two_step" },
            { "kind": "gamma_double_prime", "weights": [1.0, 0.5, 0.25] }
        ],
        "scenario": {
            "detector": { "samples": 8, "gamma": 24.0 },
            "noise": { "spread_sd": 1.0, "sample_count": 100 },
            "reference": { "segments": 3, "samples_per_segment": 100 },
            "fusion": { "sus": 4, "votes": 2, "prior_h0": 0.5, "report_error": 0.001 },
            "snr_db": -10.0,
            "trials": 2000,
            "seed": 17,
            "truth": "paired"
        }
    })
}

fn write_spec(dir: &Path, value: &serde_json::Value) -> PathBuf {
    let path = dir.join("spec.json");
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bundled_specs_validate() {
    for name in ["fig2", "fig3", "fig4"] {
        let o = bin().arg("validate").arg(bundled(name)).output().unwrap();
        assert!(o.status.success(), "{name}: {}", stderr(&o));
    }
}

#[test]
fn missing_trials_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = small_spec();
    spec["scenario"].as_object_mut().unwrap().remove("trials");
    let path = write_spec(dir.path(), &spec);
    for cmd in ["validate", "run"] {
        let o = bin()
            .arg(cmd)
            .arg(&path)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(!o.status.success());
        assert!(stderr(&o).contains("trials"), "{}", stderr(&o));
    }
    assert!(!dir.path().join("small.csv").exists());
}

#[test]
fn invalid_fields_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, serde_json::Value, &str); 4] = [
        ("/scenario/fusion/sus", 0.into(), "scenario.fusion.sus"),
        ("/scenario/fusion/votes", 7.into(), "scenario.fusion.votes"),
        ("/scenario/trials", 0.into(), "scenario.trials"),
        ("/sweep/values", serde_json::json!([]), "sweep.values"),
    ];
    for (pointer, value, field) in cases {
        let mut spec = small_spec();
        *spec.pointer_mut(pointer).unwrap() = value;
        let path = write_spec(dir.path(), &spec);
        let o = bin().arg("validate").arg(&path).output().unwrap();
        assert!(!o.status.success());
        assert!(stderr(&o).contains(field), "{field}: {}", stderr(&o));
    }
}

#[test]
fn weight_length_mismatch_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = small_spec();
    spec["scenario"]["reference"]["segments"] = 4.into();
    let path = write_spec(dir.path(), &spec);
    let o = bin().arg("validate").arg(&path).output().unwrap();
    assert!(!o.status.success());
    assert!(stderr(&o).contains("schemes.weights"), "{}", stderr(&o));
}

#[test]
fn run_writes_a_complete_table() {
    let dir = tempfile::tempdir().unwrap();
    let spec_json = small_spec();
    let path = write_spec(dir.path(), &spec_json);
    let out = dir.path().join("nested").join("result.csv");
    let o = bin()
        .arg("run")
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("9 rows"));

    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);

    let spec: ExperimentSpec = serde_json::from_value(spec_json).unwrap();
    for row in &rows {
        assert_eq!(row.len(), 17);
        for cell in &row[2..11] {
            let v: f64 = cell.parse().unwrap();
            assert!((0.0..=1.0).contains(&v));
        }
        let sweep: f64 = row[0].parse().unwrap();
        let analytic = analytic_rates(&spec.scenario_at(sweep).unwrap()).unwrap();
        assert_eq!(row[11].parse::<f64>().unwrap(), analytic.pd.value());
        assert_eq!(row[12].parse::<f64>().unwrap(), analytic.pf.value());
        assert_eq!(row[13].parse::<f64>().unwrap(), analytic.cooperative.qe);
        assert_eq!(row[15], "2000");
        assert_eq!(row[16], "17");
    }
    let leftovers = std::fs::read_dir(out.parent().unwrap()).unwrap().count();
    assert_eq!(leftovers, 1);
}

#[test]
fn output_directory_from_environment_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), &small_spec());
    let env_dir = dir.path().join("env_out");
    let run = |seed: &str, workers: &str| {
        let o = bin()
            .env("COOPSENSE_OUT_DIR", &env_dir)
            .args(["run"])
            .arg(&path)
            .args(["--seed", seed, "--workers", workers, "--trials", "500"])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(env_dir.join("small.csv")).unwrap()
    };
    let a = run("5", "1");
    let b = run("5", "3");
    let c = run("6", "1");
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(String::from_utf8_lossy(&a).contains(",500,5\n"));
}

#[test]
fn optimize_n_reports_both_conventions() {
    let o = bin()
        .args([
            "optimize-n",
            "--k",
            "6",
            "--pf",
            "0.01",
            "--pd",
            "0.6",
            "--alpha",
            "0.5",
        ])
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    let opt = coopsense::fusion::optimize_vote_count(
        6,
        coopsense::Probability::new(0.01).unwrap(),
        coopsense::Probability::new(0.6).unwrap(),
        coopsense::Probability::new(0.5).unwrap(),
    )
    .unwrap();
    assert!(text.contains(&format!("n* = {}", opt.votes)));
    assert!(text.contains(&format!("N* = K - n* = {}", opt.n_star)));

    let bad = bin()
        .args([
            "optimize-n",
            "--k",
            "6",
            "--pf",
            "1.5",
            "--pd",
            "0.6",
            "--alpha",
            "0.5",
        ])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(stderr(&bad).contains("pf"));
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = small_spec();
    spec["scenario"]["trails"] = 10.into();
    let path = write_spec(dir.path(), &spec);
    let o = bin().arg("validate").arg(&path).output().unwrap();
    assert!(!o.status.success());
    assert!(stderr(&o).contains("trails"));
}
