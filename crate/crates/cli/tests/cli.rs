use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pauliblad::io::ModelFile;
use pauliblad::learning::{DecayDataset, FitResult};
use pauliblad::mitigation::pec_overhead;
use pauliblad::random_channels::{analytic_mean_min_rate, analytic_prob_negative};
use pauliblad::twirl::hadamard_channel;
use pauliblad::{PauliChannel, PseudoLindblad};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pauliblad"));
    c.env_remove("PAULIBLAD_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn analyze_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let identity = write(dir.path(), "id.json", &PauliChannel::identity(2).to_json());
    let o = run(&["analyze", identity.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("classification: Markovian"));

    let (had, _) = hadamard_channel(0.05).unwrap();
    let had = write(dir.path(), "had.json", &had.to_json());
    let o = run(&["analyze", had.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(10));
    let text = stdout(&o);
    assert!(text.contains("classification: NonMarkovianReal"));
    assert!(text.contains("witnesses: Y\n"));

    let family = PauliChannel::new(1, vec![0.1, 0.0, 0.8, 0.1]).unwrap();
    let family = write(dir.path(), "family.json", &family.to_json());
    let o = run(&["analyze", family.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(11));
    assert!(stdout(&o).contains("ComplexRates"));

    let bad = write(dir.path(), "bad.json", "{\"format\": \"pauliblad/v1\", \"n\": 1}");
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed"));
    assert_eq!(run(&["analyze", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn analyze_json_report_parses() {
    let dir = tempfile::tempdir().unwrap();
    let g = PseudoLindblad::from_labels(&[("XX", 0.01), ("ZI", -0.002)]).unwrap();
    let path = write(dir.path(), "g.json", &g.to_json());
    let o = run(&["analyze", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(10));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["classification"], "NonMarkovianReal");
    assert_eq!(v["lambda_min"].as_f64(), Some(-0.002));
    assert_eq!(v["lambda_min_pauli"], "ZI");
    assert_eq!(v["cptp"], false);
}

#[test]
fn random_scan_smoke() {
    let o = run(&["random-scan", "--n", "3", "--r", "0.05", "--trials", "1000"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(header.len(), rows[0].len());
    assert!(rows[0].iter().all(|c| !c.is_empty() && c != "NaN"));
    let col = |name: &str| rows[0][header.iter().position(|h| h == name).unwrap()].parse::<f64>().unwrap();
    assert_eq!(col("p_neg_analytic"), analytic_prob_negative(3, 0.05));
    assert_eq!(col("mean_min_analytic"), analytic_mean_min_rate(3, 0.05));

    let again = run(&["random-scan", "--n", "3", "--r", "0.05", "--trials", "1000"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn random_scan_grid_order_and_threads() {
    let args = ["random-scan", "--n", "1,2", "--r", "0.01:0.03:0.01", "--trials", "500", "--seed", "9"];
    let one = bin().args(args).args(["--threads", "1"]).output().unwrap();
    let four = bin().args(args).env("PAULIBLAD_THREADS", "4").output().unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let (_, rows) = csv_rows(&stdout(&one));
    let keys: Vec<(String, f64)> = rows.iter().map(|r| (r[0].clone(), r[1].parse().unwrap())).collect();
    assert_eq!(keys.len(), 6);
    assert_eq!(keys[0].0, "1");
    assert_eq!(keys[3].0, "2");
    assert!((keys[2].1 - 0.03).abs() < 1e-15);
}

#[test]
fn gate_scan_zz_t1_rows() {
    let o = run(&["gate-scan", "--variant", "zz-t1", "--dkappa", "0:1:0.05"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 21);
    let zz = header.iter().position(|h| h == "re_lambda_ZZ").unwrap();
    for r in &rows {
        assert!(r[zz].parse::<f64>().unwrap() <= 0.0, "lambda_ZZ = {}", r[zz]);
    }
}

#[test]
fn gate_scan_variants_and_errors() {
    let o = run(&["gate-scan", "--variant", "hadamard", "--p", "0.05,0.25"]);
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header.last().unwrap(), "classification");
    assert_eq!(rows[0].last().unwrap(), "NonMarkovianReal");
    assert_eq!(rows[1].last().unwrap(), "Singular");

    let o = run(&["gate-scan", "--variant", "xpi", "--dx", "0.01,0.02", "--dz", "-0.01:0.01:0.01", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
    assert_eq!(v[0]["noise"]["variant"], "x-pi");

    assert!(!run(&["gate-scan", "--variant", "zz-t1", "--dx", "0.1"]).status.success());
    assert!(!run(&["gate-scan", "--variant", "hadamard", "--p", "0.7"]).status.success());
}

#[test]
fn mitigate_invert_total_gamma_is_pec_overhead() {
    let dir = tempfile::tempdir().unwrap();
    let g = PseudoLindblad::from_labels(&[("XI", 0.02), ("ZZ", 0.01), ("IY", 0.03)]).unwrap();
    let path = write(dir.path(), "g.json", &g.to_json());
    let o = run(&["mitigate", "--model", path.to_str().unwrap(), "--mode", "invert", "--shots", "5000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let gamma = v["total_gamma"].as_f64().unwrap();
    assert!((gamma - pec_overhead(&g)).abs() <= 1e-12 * gamma);
    assert_eq!(v["estimates"].as_array().unwrap().len(), 15);
    assert_eq!(v["terms"].as_array().unwrap().len(), 3);

    let o = run(&["mitigate", "--model", path.to_str().unwrap(), "--mode", "amplify"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mitigate_inverse_with_background_recovers_ideal() {
    let dir = tempfile::tempdir().unwrap();
    let g = PseudoLindblad::from_labels(&[("X", 0.03), ("Z", 0.05)]).unwrap();
    let path = write(dir.path(), "g.json", &g.to_json());
    let o = run(&[
        "mitigate", "--model", path.to_str().unwrap(), "--mode", "invert", "--background", "exact",
        "--observables", "X,Y,Z", "--shots", "40000", "--seed", "5",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for e in v["estimates"].as_array().unwrap() {
        let mean = e["mean"].as_f64().unwrap();
        let se = e["stderr"].as_f64().unwrap();
        assert!((mean - 1.0).abs() < 4.0 * se + 1e-12, "{e}");
    }
}

#[test]
fn learn_demo_default() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&["learn-demo", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("learn.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let fits = v["fits"].as_array().unwrap();
    assert_eq!(fits.len(), 3);
    for f in fits {
        let rec: pauliblad::learning::FitRecord = serde_json::from_value(f.clone()).unwrap();
        let fit = FitResult::try_from(rec).unwrap();
        assert!(fit.holdout_mae.is_finite());
    }
    assert_eq!(v["mae_ordering"].as_array().unwrap().len(), 3);
    let truth: pauliblad::io::GeneratorFile = serde_json::from_value(v["truth"].clone()).unwrap();
    assert_eq!(PseudoLindblad::try_from(truth).unwrap(), pauliblad::learning::builtin_truth(4).unwrap());
    let ds = DecayDataset::from_json(&std::fs::read_to_string(out.join("dataset.json")).unwrap()).unwrap();
    assert_eq!(ds.n, 4);
}

#[test]
fn learn_demo_truth_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = PseudoLindblad::from_labels(&[("XI", 0.01), ("IZ", 0.02), ("YY", 0.005)]).unwrap();
    let path = write(dir.path(), "truth.json", &g.to_json());
    let o = run(&["learn-demo", "--n", "2", "--truth", path.to_str().unwrap(), "--strategies", "unconstrained"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["fits"].as_array().unwrap().len(), 1);
    let o = run(&["learn-demo", "--n", "3", "--truth", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn outputs_round_trip_through_library_parsers() {
    let dir = tempfile::tempdir().unwrap();
    let g = PseudoLindblad::from_labels(&[("XI", 0.02), ("ZZ", -0.004)]).unwrap();
    let path = write(dir.path(), "g.json", &g.to_json());
    let reparsed = ModelFile::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(reparsed, ModelFile::Generator(g));

    let out = dir.path().join("m");
    let o = run(&["mitigate", "--model", path.to_str().unwrap(), "--mode", "amplify", "--alpha", "1.5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out.join("mitigate.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["format"], "pauliblad/v1");
    assert_eq!(v["mode"]["kind"], "amplify");
    assert!(v["pea_overhead"].as_f64().unwrap() > 1.0);
}
