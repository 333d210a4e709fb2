use gauss_neumann::fem2d::Mesh;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn gnl(args: &[&str]) -> Output {
    gnl_env(args, &[])
}

fn gnl_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gnl"));
    cmd.args(args).env_remove("GNL_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("gnl runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn sweep_two_radii() {
    let out = gnl(&["sweep", "--m", "2", "--R", "1,2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("R,mu1,mu1_minus_1,residual\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    let mu: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(mu[1] < mu[0]);
    for row in &rows {
        let [r, mu1, minus, residual] = [0, 1, 2, 3].map(|k| row[k].parse::<f64>().unwrap());
        assert!(r > 0.0 && residual < 1e-7);
        assert!((mu1 - 1.0 - minus).abs() < 1e-10);
        // twelve significant digits in plain decimal notation
        assert_eq!(row[1].chars().filter(char::is_ascii_digit).count(), 12, "{}", row[1]);
    }
}

#[test]
fn sweep_rows_ascend_and_large_ball_approaches_one() {
    let out = gnl(&["sweep", "--m", "3", "--R", "8,2,4"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    let radii: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(radii, vec![2.0, 4.0, 8.0]);
    let last: f64 = rows[2][2].parse().unwrap();
    assert!(last.abs() < 1e-6, "{last}");
}

#[test]
fn sweep_default_range_and_json() {
    let out = gnl(&["sweep", "--m", "2", "--from", "0.5", "--to", "1.5", "--step", "0.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["R"].as_f64(), Some(1.5));
    assert!(rows[0]["mu1"].as_f64().unwrap() > rows[1]["mu1"].as_f64().unwrap());
}

#[test]
fn sweep_usage_errors() {
    for args in [
        vec!["sweep", "--from", "2", "--to", "1"],
        vec!["sweep", "--step", "0"],
        vec!["sweep", "--R", "1", "--from", "0.5"],
        vec!["sweep", "--R", "-1"],
        vec!["sweep", "--tol", "0"],
        vec!["sweep", "--bogus"],
    ] {
        let out = gnl(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn sweep_residual_above_tolerance_fails_but_still_reports() {
    let out = gnl(&["sweep", "--R", "1", "--tol", "1e-16"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(csv_rows(&stdout(&out)).len(), 1);
    assert!(stderr(&out).contains("residual"));
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let args = ["sweep", "--m", "3", "--from", "0.5", "--to", "3", "--step", "0.25"];
    let one = gnl_env(&args, &[("GNL_THREADS", "1")]);
    let four = gnl_env(&args, &[("GNL_THREADS", "4")]);
    let default = gnl(&args);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, default.stdout);
    let lemmas_a = gnl_env(&["lemmas", "--seed", "7"], &[("GNL_THREADS", "1")]);
    let lemmas_b = gnl_env(&["lemmas", "--seed", "7"], &[("GNL_THREADS", "3")]);
    assert_eq!(lemmas_a.stdout, lemmas_b.stdout);
    let bad = gnl_env(&args, &[("GNL_THREADS", "zero")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = gnl(&["sweep", "--R", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, stdout(&gnl(&["sweep", "--R", "1"])));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1, "no temporary files left behind");
}

#[test]
fn ball_spectrum_entries() {
    let out = gnl(&["spectrum", "--domain", "ball", "--m", "2", "--R", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let s = json(&out);
    assert_eq!(s["m"], 2);
    assert_eq!(s["domain"]["kind"], "ball");
    let entries = s["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 6);
    assert_eq!(entries[0]["mu"].as_f64(), Some(0.0));
    assert_eq!(entries[1]["mult"], 2);
    assert_eq!(entries[1]["l"], 1);
    let out = gnl(&["spectrum", "--domain", "ball", "--m", "3", "--R", "1.5", "--count", "3"]);
    assert_eq!(json(&out)["entries"][1]["mult"], 3);
}

#[test]
fn annulus_spectrum_has_requested_entries() {
    let out = gnl(&["spectrum", "--domain", "annulus", "--m", "3", "--r1", "0.5", "--r2", "1.2", "--count", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let s = json(&out);
    let mus: Vec<f64> = s["entries"].as_array().unwrap().iter().map(|e| e["mu"].as_f64().unwrap()).collect();
    assert_eq!(mus.len(), 8);
    assert!(mus.windows(2).all(|w| w[0] < w[1]), "{mus:?}");
    let csv = gnl(&["spectrum", "--domain", "annulus", "--m", "3", "--r1", "0.5", "--r2", "1.2", "--count", "8", "--format", "csv"]);
    let text = stdout(&csv);
    assert!(text.starts_with("mu,l,n,mult\n"));
    assert_eq!(csv_rows(&text).len(), 8);
}

#[test]
fn planar_spectrum_and_mesh_output() {
    let dir = tempfile::tempdir().unwrap();
    let mesh_path = dir.path().join("mesh.txt");
    let out = gnl(&[
        "spectrum", "--domain", "ellipse", "--a", "1.2", "--b", "0.8", "--h", "0.1", "--count", "4", "--mesh-out",
        mesh_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let s = json(&out);
    let entries = s["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    assert!(entries[0]["mu"].as_f64().unwrap().abs() < 1e-8);
    assert!(entries[1]["l"].is_null());
    let mesh = Mesh::from_text(&std::fs::read_to_string(&mesh_path).unwrap()).unwrap();
    mesh.validate().unwrap();
    assert!(mesh.symmetry_defect() < 1e-12);
}

#[test]
fn domain_file_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "ball.json", r#"{"kind": "ball", "radius": 1.0}"#);
    let from_file = gnl(&["spectrum", "--m", "2", "--domain-file", &good]);
    let from_flags = gnl(&["spectrum", "--m", "2", "--domain", "ball", "--R", "1"]);
    assert_eq!(from_file.stdout, from_flags.stdout);

    let cases = [
        (r#"{"kind": "polygon", "vertices": [[1, 0], [0, 1], [-1, "x"]]}"#, "vertices[2][1]"),
        (r#"{"kind": "annulus", "inner": 0.5}"#, "outer"),
        (r#"{"kind": "ellipse", "a": 1, "b": 2, "c": 3}"#, "c"),
        (r#"{"kind": "torus"}"#, "kind"),
        (r#"{"radius": 1}"#, "kind"),
        ("not json", "domain JSON"),
    ];
    for (k, (text, needle)) in cases.iter().enumerate() {
        let path = write(dir.path(), &format!("bad{k}.json"), text);
        let out = gnl(&["verify", "--m", "2", "--domain-file", &path]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(stderr(&out).contains(needle), "{text}: {}", stderr(&out));
    }
    let missing = gnl(&["verify", "--domain", "annulus", "--r1", "0.5"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("--r2"));
}

#[test]
fn verify_ball_reports_equality() {
    let out = gnl(&["verify", "--domain", "ball", "--m", "3", "--R", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["inequality"]["equality"], true);
    assert_eq!(r["passed"], true);
    assert_eq!(r["backend"], "radial");
    for key in ["domain", "matched_radius", "spectrum", "chain", "orthogonalization", "exploration", "trial"] {
        assert!(!r[key].is_null(), "{key}");
    }
}

#[test]
fn verify_annulus_strict() {
    let out = gnl(&["verify", "--domain", "annulus", "--m", "3", "--r1", "0.5", "--r2", "1.2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let q = &r["inequality"];
    assert!(q["margin"].as_f64().unwrap() > q["tolerance"].as_f64().unwrap());
    assert_eq!(q["equality"], false);
    let csv = gnl(&["verify", "--domain", "annulus", "--m", "3", "--r1", "0.5", "--r2", "1.2", "--format", "csv"]);
    let text = stdout(&csv);
    assert!(text.starts_with("step,index,left,right,slack,tolerance,satisfied\n"));
    assert!(text.lines().last().unwrap().starts_with("main_inequality,"));
    assert!(csv_rows(&text).iter().all(|row| row[6] == "true"));
}

#[test]
fn verify_planar_ellipse_with_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let mesh_path = dir.path().join("m.txt");
    let out = gnl(&["verify", "--domain", "ellipse", "--a", "1.5", "--b", "1", "--h", "0.08", "--mesh-out", mesh_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["backend"], "fem");
    let mus = r["spectrum"].as_array().unwrap();
    assert!(mus[0].as_f64().unwrap() < r["ball_mu1"].as_f64().unwrap());
    let mesh = Mesh::from_text(&std::fs::read_to_string(&mesh_path).unwrap()).unwrap();
    assert_eq!(r["mesh"]["nodes"].as_u64().unwrap() as usize, mesh.nodes.len());
    let radial_mesh = gnl(&["verify", "--domain", "ball", "--R", "1", "--mesh-out", mesh_path.to_str().unwrap()]);
    assert_eq!(radial_mesh.status.code(), Some(2));
}

#[test]
fn corrupted_spectrum_override_fails_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let inflated = write(dir.path(), "bad.json", "[1000.0, 1000.0, 1000.0]");
    let out = gnl(&["verify", "--domain", "annulus", "--m", "3", "--r1", "0.5", "--r2", "1.2", "--spectrum-override", &inflated]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["passed"], false);
    assert_eq!(r["inequality"]["satisfied"], false);
    assert!(stderr(&out).contains("verification failed"));

    let object = write(dir.path(), "obj.json", r#"{"spectrum": [1000.0, 1000.0, 1000.0]}"#);
    let out = gnl(&["verify", "--domain", "annulus", "--m", "3", "--r1", "0.5", "--r2", "1.2", "--spectrum-override", &object]);
    assert_eq!(out.status.code(), Some(1));

    let malformed = write(dir.path(), "mal.json", r#"{"mu": 3}"#);
    let out = gnl(&["verify", "--domain", "ball", "--m", "2", "--R", "1", "--spectrum-override", &malformed]);
    assert_eq!(out.status.code(), Some(2));
    let short = write(dir.path(), "short.json", "[2.0]");
    let out = gnl(&["verify", "--domain", "ball", "--m", "3", "--R", "1", "--spectrum-override", &short]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes_for_preconditions_and_solver_failures() {
    // not origin-symmetric
    let out = gnl(&["verify", "--domain", "polygon", "--vertices", "1,0;0,1;-1,0.2;0,-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("origin-symmetric"));
    // self-intersecting boundary: the mesher fails
    let out = gnl(&["verify", "--domain", "polygon", "--vertices", "1,0;-1,0.5;-1,-0.5;1,0.3;0,1;0,-1"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("solver failure"));
    // planar domains need m = 2
    let out = gnl(&["verify", "--domain", "ellipse", "--a", "1", "--b", "0.5", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lemma_grid_passes() {
    let out = gnl(&["lemmas"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("check,m,point,passed,slack,detail\n"));
    let rows = csv_rows(&text);
    let count = |check: &str| rows.iter().filter(|r| r[0] == check).count();
    // m ∈ {2, 3}, R ∈ {0.5, 1, ..., 4}
    assert_eq!(count("mu1_decreasing"), 2 * 7);
    assert_eq!(count("mu1_above_one"), 2 * 8);
    assert_eq!(count("profile_signs"), 2 * 8);
    assert_eq!(count("rearrangement"), 20);
    assert!(rows.iter().all(|r| r[3] == "true"));
}

#[test]
fn lemma_json_and_seeds() {
    let a = json(&gnl(&["lemmas", "--m", "2", "--R", "1,2", "--count", "5", "--format", "json", "--seed", "1"]));
    let records = a.as_array().unwrap();
    assert_eq!(records.len(), 1 + 2 + 2 + 5);
    assert!(records.iter().all(|r| r["passed"] == true));
    let b = json(&gnl(&["lemmas", "--m", "2", "--R", "1,2", "--count", "5", "--format", "json", "--seed", "2"]));
    assert_ne!(a, b);
    let c = json(&gnl(&["lemmas", "--m", "2", "--R", "1,2", "--count", "5", "--format", "json", "--seed", "1"]));
    assert_eq!(a, c);
}

#[test]
fn injected_increasing_h_is_recorded_as_failure() {
    let out = gnl(&["lemmas", "--inject-increasing", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let records = json(&out);
    let failed: Vec<&Value> = records.as_array().unwrap().iter().filter(|r| r["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["check"], "rearrangement");
    assert!(failed[0]["slack"].is_null());
    assert!(failed[0]["detail"].as_str().unwrap().contains("precondition"));
    assert!(stderr(&out).contains("1 of"));
}
