use std::path::Path;
use std::process::{Command, Output};

fn bandsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandsel"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = bandsel(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn synth(dir: &Path, preset: &str) -> (String, String) {
    let d = dir.to_str().unwrap();
    ok(&["synth", "--preset", preset, "--seed", "3", "--out", d]);
    (format!("{d}/cube.raw"), format!("{d}/labels.raw"))
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn without_timing(path: &Path) -> serde_json::Value {
    let mut v = read_json(path);
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

#[test]
fn select_writes_k_line_trace_with_planted_band_first() {
    let tmp = tempfile::tempdir().unwrap();
    let (cube, labels) = synth(tmp.path(), "informative");
    let out = tmp.path().join("sel");
    let stdout = ok(&["select", "--cube", &cube, "--labels", &labels, "--method", "mim", "--k", "3", "--out", out.to_str().unwrap()]);
    let trace = std::fs::read_to_string(out.join("trace.txt")).unwrap();
    assert_eq!(trace.lines().count(), 3);
    assert_eq!(trace.lines().next(), Some("2"));
    assert_eq!(stdout, trace);
    let json = read_json(&out.join("trace.json"));
    assert_eq!(json["steps"].as_array().unwrap().len(), 3);
    assert_eq!(json["method"], "mim");
}

#[test]
fn usage_errors_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let (cube, labels) = synth(tmp.path(), "informative");
    let out = bandsel(&["select", "--cube", &cube, "--labels", &labels, "--method", "bogus", "--k", "2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let out = bandsel(&["classify", "--cube", &cube, "--method", "mim", "--k", "2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--labels"));

    let missing = tmp.path().join("nope.raw");
    let out = bandsel(&["classify", "--cube", &cube, "--labels", missing.to_str().unwrap(), "--all-bands"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--labels"));

    let out = bandsel(&["select", "--cube", &cube, "--labels", &labels, "--method", "mim", "--k", "99"]);
    assert!(!out.status.success());
}

#[test]
fn classify_all_bands_on_separable_cube() {
    let tmp = tempfile::tempdir().unwrap();
    let (cube, labels) = synth(tmp.path(), "separable");
    let out = tmp.path().join("run");
    ok(&["classify", "--cube", &cube, "--labels", &labels, "--all-bands", "--out", out.to_str().unwrap()]);
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["metrics"]["oa"].as_f64(), Some(1.0));
    assert_eq!(report["method"], "all");
    assert_eq!(report["k"], 6);
    let map = std::fs::read(out.join("map.ppm")).unwrap();
    assert!(map.starts_with(b"P6\n12 12\n255\n"));
    let model = read_json(&out.join("model.json"));
    assert_eq!(model["format"], "bandsel-svm");
}

#[test]
fn classify_is_reproducible_and_accepts_traces() {
    let tmp = tempfile::tempdir().unwrap();
    let (cube, labels) = synth(tmp.path(), "xor");
    let run = |name: &str, extra: &[&str]| {
        let out = tmp.path().join(name);
        let mut args = vec!["classify", "--cube", &cube, "--labels", &labels, "--train-frac", "0.25", "--seed", "11"];
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--out", out.to_str().unwrap()]);
        ok(&args);
        out
    };
    let a = run("a", &["--method", "mrms", "--k", "2"]);
    let b = run("b", &["--method", "mrms", "--k", "2"]);
    assert_eq!(without_timing(&a.join("report.json")), without_timing(&b.join("report.json")));
    assert_eq!(std::fs::read(a.join("map.ppm")).unwrap(), std::fs::read(b.join("map.ppm")).unwrap());
    assert_eq!(read_json(&a.join("report.json"))["selected_bands"], serde_json::json!([3, 4]));

    let trace = a.join("trace.txt");
    let c = run("c", &["--trace", trace.to_str().unwrap()]);
    let (mut ra, mut rc) = (without_timing(&a.join("report.json")), without_timing(&c.join("report.json")));
    ra.as_object_mut().unwrap().remove("method");
    rc.as_object_mut().unwrap().remove("method");
    assert_eq!(ra, rc);
}

#[test]
fn sweep_csv_matches_cell_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let (cube, labels) = synth(tmp.path(), "redundancy");
    let out = tmp.path().join("sweep");
    ok(&["sweep", "--cube", &cube, "--labels", &labels, "--methods", "mim", "--k-list", "1,2", "--out", out.to_str().unwrap()]);
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("method,k,fraction,seed,oa,aa,kappa,specificity"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 2);
    for row in &rows {
        let report = read_json(&out.join(format!("report_{}_k{}.json", row[0], row[1])));
        let m = &report["metrics"];
        for (col, key) in [(4, "oa"), (5, "aa"), (6, "kappa"), (7, "specificity")] {
            assert_eq!(row[col].parse::<f64>().unwrap(), m[key].as_f64().unwrap());
        }
        assert_eq!(row[2].parse::<f64>().unwrap(), report["split"]["fraction"].as_f64().unwrap());
    }

    // A standalone classify of the same cell produces the same report.
    let single = tmp.path().join("single");
    ok(&["classify", "--cube", &cube, "--labels", &labels, "--method", "mim", "--k", "2", "--out", single.to_str().unwrap()]);
    let mut a = without_timing(&single.join("report.json"));
    let mut b = without_timing(&out.join("report_mim_k2.json"));
    a.as_object_mut().unwrap().remove("dataset");
    b.as_object_mut().unwrap().remove("dataset");
    assert_eq!(a, b);
    assert!(out.join("trace_mim.txt").exists());
}

#[test]
fn environment_variables_mirror_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let (cube, labels) = synth(tmp.path(), "informative");
    let out = Command::new(env!("CARGO_BIN_EXE_bandsel"))
        .args(["select", "--k", "1"])
        .env("BANDSEL_CUBE", &cube)
        .env("BANDSEL_LABELS", &labels)
        .env("BANDSEL_METHOD", "mrmr")
        .env("BANDSEL_OUT", tmp.path().join("env"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "2\n");
}

#[test]
fn csv_labels_are_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let (cube, _) = synth(tmp.path(), "informative");
    let raster = tmp.path().join("labels.raw");
    let bytes = std::fs::read(raster).unwrap();
    let mut csv = String::from("row,col,label\n");
    for (i, pair) in bytes.chunks(2).enumerate() {
        csv.push_str(&format!("{},{},{}\n", i / 12, i % 12, u16::from_le_bytes([pair[0], pair[1]])));
    }
    let path = tmp.path().join("labels.csv");
    std::fs::write(&path, csv).unwrap();
    let stdout = ok(&["select", "--cube", &cube, "--labels", path.to_str().unwrap(), "--method", "mim", "--k", "1", "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(stdout, "2\n");
}
