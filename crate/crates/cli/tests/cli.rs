use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sublin(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sublin"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("SUBLIN_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) {
    let o = sublin(out, args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Header and rows of a CSV file; empty fields become NaN.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|f| {
                    if f.is_empty() {
                        f64::NAN
                    } else {
                        f.parse().unwrap()
                    }
                })
                .collect()
        })
        .collect();
    (header, rows)
}

#[test]
fn homoclinic_family_shares_extinction_time() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "homoclinic",
            "--lambda",
            "1",
            "--p",
            "1/2",
            "--a-list",
            "1,5/4,3/2,7/4,2",
        ],
    );
    let (header, rows) = read_csv(&dir.path().join("homoclinic.csv"));
    assert_eq!(
        header,
        [
            "index",
            "lambda",
            "a",
            "p",
            "u_h",
            "t_h",
            "extinction_time",
            "t_h_quadrature"
        ]
    );
    assert_eq!(rows.len(), 5);
    let two_pi = 2.0 * std::f64::consts::PI;
    for r in &rows {
        assert!((r[5] - two_pi).abs() < 1e-14);
        assert!((r[7] - two_pi).abs() < 1e-9);
    }
    let expected = [16.0 / 9.0, 4.0, 49.0 / 9.0, 64.0 / 9.0];
    for (k, want) in [0, 2, 3, 4].into_iter().zip(expected) {
        let doc = read_json(&dir.path().join(format!("homoclinic_{k:03}.json")));
        let sup = doc["metadata"]["sup_norm"].as_f64().unwrap();
        assert!((sup - want).abs() < 1e-12 * want, "{k}: {sup}");
    }
    assert!(dir.path().join("homoclinic_004.csv").exists());
    assert!(!dir.path().join("homoclinic_005.csv").exists());
}

#[test]
fn single_weight_gives_one_profile() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["homoclinic", "--a", "2"]);
    assert_eq!(read_csv(&dir.path().join("homoclinic.csv")).1.len(), 1);
    assert!(!dir.path().join("homoclinic_001.json").exists());
}

#[test]
fn nested_loops_shrink_with_lambda() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "homoclinic",
            "--a",
            "2",
            "--p",
            "2/3",
            "--lambda-grid",
            "1:2:6",
        ],
    );
    let (_, rows) = read_csv(&dir.path().join("homoclinic.csv"));
    assert_eq!(rows.len(), 6);
    assert!(rows
        .windows(2)
        .all(|w| w[1][4] < w[0][4] && w[1][5] < w[0][5]));
}

#[test]
fn bifurcation_table() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["bifurcation", "--p", "1/2", "--L", "pi"]);
    let (_, th) = read_csv(&dir.path().join("thresholds.csv"));
    for r in &th {
        assert_eq!(r[2], 16.0 * r[0] * r[0]);
    }
    let (header, rows) = read_csv(&dir.path().join("bifurcation.csv"));
    assert_eq!(
        &header[..5],
        [
            "lambda",
            "classical_sup",
            "degenerate_sup",
            "flagged",
            "slack_1"
        ]
    );
    let classical: Vec<&Vec<f64>> = rows.iter().filter(|r| !r[1].is_nan()).collect();
    assert!(classical.len() > 10);
    assert!(classical.windows(2).all(|w| w[1][1] < w[0][1]));
    // blow-up near sigma_1 is flagged
    assert_eq!(classical[0][3], 1.0);
    assert_eq!(classical.last().unwrap()[3], 0.0);
    // degenerate branch exactly from Sigma_1 on
    for r in &rows {
        assert_eq!(r[2].is_nan(), r[0] < 16.0);
        assert!(r[1].is_nan() || r[2].is_nan());
    }
}

#[test]
fn time_map_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "timemap", "--a", "1", "--lambda", "1", "--p", "1/2", "--points", "40",
        ],
    );
    let (header, rows) = read_csv(&dir.path().join("timemap.csv"));
    assert_eq!(header, ["c", "c_over_u_h", "t"]);
    assert_eq!(rows.len(), 40);
    assert!(rows.windows(2).all(|w| w[1][2] < w[0][2]));
    assert!(rows[0][2] < 2.0 * std::f64::consts::PI);
    let (_, psi) = read_csv(&dir.path().join("psi.csv"));
    assert!(psi.windows(2).all(|w| w[1][1] > w[0][1]));
}

#[test]
fn two_bump_solution() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "multibump",
            "--a",
            "2",
            "--lambda",
            "1",
            "--L",
            "8pi",
            "--centers",
            "2pi,6pi",
        ],
    );
    let (header, rows) = read_csv(&dir.path().join("multibump.csv"));
    assert_eq!(header, ["x", "u"]);
    assert!(rows.iter().all(|r| r[1] >= 0.0));
    let doc = read_json(&dir.path().join("multibump.json"));
    assert_eq!(doc["metadata"]["bump_count"], 2);
    assert_eq!(doc["kind"]["type"], "multibump");
    let sup = doc["metadata"]["sup_norm"].as_f64().unwrap();
    assert!((sup - 64.0 / 9.0).abs() < 1e-12);
}

#[test]
fn signed_bumps() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "multibump",
            "--a",
            "2",
            "--L",
            "8pi",
            "--centers",
            "2pi,6pi",
            "--signs",
            "1,-1",
        ],
    );
    let doc = read_json(&dir.path().join("multibump.json"));
    assert_eq!(doc["kind"]["type"], "signed_multibump");
    let segs = doc["segments"].as_array().unwrap();
    assert!(segs.iter().any(|s| s["sign"] == -1));
}

#[test]
fn chaos_manifest_counts_blocks() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["chaos", "--symbols", "1,0,1,1"]);
    let m = read_json(&dir.path().join("chaos_manifest.json"));
    let blocks = m["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 4);
    assert_eq!(blocks.iter().filter(|b| b["symbol"] != 0).count(), 3);
    assert_eq!(blocks.iter().filter(|b| b["symbol"] == 0).count(), 1);
    assert_eq!(m["lambda"].as_f64().unwrap(), 16.0);
    assert_eq!(m["window"]["symbols"], serde_json::json!([1, 0, 1, 1]));
    let (header, rows) = read_csv(&dir.path().join("chaos.csv"));
    assert_eq!(header, ["x", "u"]);
    assert!((rows.last().unwrap()[0] - 4.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn profile_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["classical", "--lambda", "4", "--grid-n", "1025"],
    );
    let doc = read_json(&dir.path().join("classical.json"));
    for key in ["lambda", "a", "p", "L"] {
        assert!(doc["params"][key].is_number(), "{key}");
    }
    assert_eq!(doc["kind"]["type"], "classical");
    assert_eq!(doc["segments"][0]["type"], "arc");
    let n = doc["grid"]["nodes"].as_array().unwrap().len();
    assert_eq!(doc["grid"]["values"].as_array().unwrap().len(), n);
    assert_eq!(doc["grid"]["slopes"].as_array().unwrap().len(), n);
    let meta = &doc["metadata"];
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert!(meta["tolerances"]["tol"].is_number());
    assert!(meta["residual"]["observed_order"].as_f64().unwrap() >= 1.8);
    let (_, rows) = read_csv(&dir.path().join("classical.csv"));
    assert_eq!(rows.len(), n);
}

#[test]
fn regularized_branches() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["regularized", "--eps-list", "1e-2,1e-3", "--points", "6"],
    );
    for tag in ["1e-2", "1e-3"] {
        let (header, rows) = read_csv(&dir.path().join(format!("branch_eps_{tag}.csv")));
        assert_eq!(header, ["eps", "lam", "slope", "sup_norm", "w_norm"]);
        assert_eq!(rows.len(), 6);
        assert!(rows
            .windows(2)
            .all(|w| w[1][3] < w[0][3] && w[1][4] > w[0][4]));
    }
    let summary = read_json(&dir.path().join("regularized.json"));
    assert_eq!(summary["branches"].as_array().unwrap().len(), 2);
}

#[test]
fn orbit_conserves_energy() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["orbit", "--a", "2", "--stop-at-zero", "--samples", "101"],
    );
    let (header, rows) = read_csv(&dir.path().join("orbit.csv"));
    assert_eq!(header, ["t", "u", "v", "E"]);
    assert_eq!(rows.len(), 101);
    let e0 = rows[0][3];
    assert!(rows
        .iter()
        .all(|r| (r[3] - e0).abs() <= 1e-8 * e0.abs().max(1.0)));
    assert!(rows.last().unwrap()[1].abs() < 1e-9);
}

#[test]
fn identical_runs_are_byte_identical() {
    for args in [
        &["chaos", "--random", "12", "--seed", "42"][..],
        &[
            "multibump",
            "--L",
            "8pi",
            "--centers",
            "2pi,6pi",
            "--grid-n",
            "1025",
        ][..],
        &["bifurcation", "--j-max", "2"][..],
        &["regularized", "--points", "4"][..],
    ] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        ok(a.path(), args);
        ok(b.path(), args);
        let mut names: Vec<_> = fs::read_dir(a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            assert_eq!(
                fs::read(a.path().join(&name)).unwrap(),
                fs::read(b.path().join(&name)).unwrap(),
                "{name:?}"
            );
        }
    }
}

#[test]
fn seed_changes_random_window() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ok(a.path(), &["chaos", "--random", "24", "--seed", "1"]);
    ok(b.path(), &["chaos", "--random", "24", "--seed", "2"]);
    let wa = read_json(&a.path().join("chaos_manifest.json"))["window"].clone();
    let wb = read_json(&b.path().join("chaos_manifest.json"))["window"].clone();
    assert_ne!(wa, wb);
}

#[test]
fn randomized_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["check", "--cases", "16", "--seed", "3"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let code = |args: &[&str]| sublin(&out, args).status.code().unwrap();
    // validation
    assert_eq!(code(&["classical", "--p", "1.5"]), 2);
    assert_eq!(code(&["classical", "--lambda", "0.5"]), 2);
    assert_eq!(
        code(&["multibump", "--centers", "1,1.1", "--lambda", "100"]),
        2
    );
    assert_eq!(code(&["chaos", "--symbols", "2"]), 2);
    assert_eq!(code(&["classical", "--grid-n", "5"]), 2);
    assert_eq!(code(&["nonsense"]), 2);
    // verification: the trajectory starts inside the non-uniqueness ball
    assert_eq!(code(&["orbit", "--u0", "0", "--v0", "0"]), 3);
    assert!(!out.exists(), "failed runs write nothing");
    // I/O: the output directory is a file
    let file = dir.path().join("file");
    fs::write(&file, "x").unwrap();
    assert_eq!(sublin(&file, &["homoclinic"]).status.code(), Some(4));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sublin"))
        .args(["homoclinic", "--a", "2"])
        .env("SUBLIN_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("homoclinic.csv").exists());
}
