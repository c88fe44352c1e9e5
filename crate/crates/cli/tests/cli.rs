use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn tgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tgeom"))
        .args(args)
        .output()
        .unwrap()
}

fn path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn check_expectations_drive_exit_code() {
    let e = fixture("euclid3.json");
    assert_eq!(
        tgeom(&["check", "--geometry", &e, "--expect", "all-pass"])
            .status
            .code(),
        Some(0)
    );
    let m = fixture("minkowski4.json");
    assert_eq!(
        tgeom(&["check", "--geometry", &m, "--expect", "IV:fail"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        tgeom(&["check", "--geometry", &m, "--expect", "all-pass"])
            .status
            .code(),
        Some(1)
    );
    let d = fixture("distorted.json");
    assert_eq!(
        tgeom(&["check", "--geometry", &d, "--expect", "III:fail"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        tgeom(&["check", "--geometry", &d, "--expect", "III:pass"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn check_report_records_seed_and_verdicts() {
    let out = tgeom(&[
        "check",
        "--geometry",
        &fixture("tabulated5.json"),
        "--seed",
        "42",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 42);
    assert_eq!(report["geometry"], "tabulated");
    let conditions = report["conditions"].as_array().unwrap();
    let v = conditions
        .iter()
        .find(|c| c["condition_id"] == "V_continuity")
        .unwrap();
    assert_eq!(v["verdict"], "fail");
}

#[test]
fn check_probes_are_reported() {
    let m = fixture("minkowski4.json");
    let timelike = tgeom(&[
        "check",
        "--geometry",
        &m,
        "--probe",
        "1,0,0,0",
        "--expect",
        "degeneracy_probe:pass",
    ]);
    assert_eq!(timelike.status.code(), Some(0));
    let spacelike = tgeom(&[
        "check",
        "--geometry",
        &m,
        "--probe",
        "0,1,0,0",
        "--expect",
        "degeneracy_probe:fail",
    ]);
    assert_eq!(spacelike.status.code(), Some(0));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        tgeom(&["check", "--geometry", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    let e = fixture("euclid3.json");
    assert_eq!(
        tgeom(&["check", "--geometry", &e, "--expect", "IV"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        tgeom(&["check", "--geometry", &e, "--tol", "nonsense=1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        tgeom(&[
            "check",
            "--geometry",
            &e,
            "--expect",
            "degeneracy_probe:pass"
        ])
        .status
        .code(),
        Some(2)
    );
    let bad = path(&dir, "bad.json");
    fs::write(&bad, r#"{"kind":"euclidean"}"#).unwrap();
    assert_eq!(
        tgeom(&["check", "--geometry", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    // regime violation: mu_d^2 - 2d must exceed 2 sigma0
    assert_eq!(
        tgeom(&["tube-profile", "--d", "0.01", "--sigma0", "0.6"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn tube_profile_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "profile.csv");
    let status = tgeom(&[
        "tube-profile",
        "--d",
        "0.01",
        "--sigma0",
        "0.1",
        "--mu",
        "1",
        "--tau-points",
        "101",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ])
    .status;
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# tube-profile") && text.lines().next().unwrap().contains("seed=5"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 102);
    let num = |s: &str| s.parse::<f64>().unwrap();
    assert_eq!(num(&rows[0][1]), 0.0);
    assert_eq!(num(&rows[100][1]), 0.0);
    let closed_mid = num(&rows[50][2]);
    assert!((closed_mid - 0.015f64.sqrt()).abs() < 1e-12, "{closed_mid}");
    assert!((num(&rows[50][1]) - closed_mid).abs() < 1e-9);
    assert_eq!(rows[101][0], "summary");
    assert!(num(&rows[101][1]) < 1e-3);
    // 17 significant digits
    assert_eq!(rows[50][0], "5.0000000000000000e-1");
}

#[test]
fn undistorted_profile_is_zero() {
    let out = tgeom(&[
        "tube-profile",
        "--d",
        "0",
        "--sigma0",
        "0.1",
        "--tau-points",
        "11",
    ]);
    assert!(out.status.success());
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    for row in &rows[..11] {
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn chain_outputs_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "chain.csv");
    let status = tgeom(&[
        "chain",
        "--d",
        "0.01",
        "--sigma0",
        "0.1",
        "--links",
        "200",
        "--ensemble",
        "3",
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
    ])
    .status;
    assert!(status.success());
    let rows = data_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 201);
    assert_eq!(rows[0][5], "");
    assert_eq!(rows[200][5], "");
    let cosh: f64 = rows[1][5].parse().unwrap();
    assert!((cosh - 1.01 / 0.98).abs() < 1e-9);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(path(&dir, "chain.summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["seed"], 9);
    assert_eq!(summary["measure"], "reflected");
    assert_eq!(summary["ensemble"], 3);
    assert!((summary["cosh_theta_closed_form"].as_f64().unwrap() - 0.99 / 0.98).abs() < 1e-12);
    assert!((summary["theta_small_d"].as_f64().unwrap() - 0.02f64.sqrt()).abs() < 1e-12);
    assert!(summary["max_link_length_error"].as_f64().unwrap() < 1e-9);
    let rms = summary["transverse_rms_by_n"].as_object().unwrap();
    assert_eq!(rms.keys().count(), 9);
    assert!(rms.contains_key("200"));
}

#[test]
fn undistorted_chain_does_not_drift() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "c.csv");
    let summary = path(&dir, "s.json");
    let status = tgeom(&[
        "chain",
        "--d",
        "0",
        "--sigma0",
        "0.1",
        "--links",
        "64",
        "--ensemble",
        "4",
        "--out",
        out.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ])
    .status;
    assert!(status.success());
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(summary).unwrap()).unwrap();
    for v in s["transverse_rms_by_n"].as_object().unwrap().values() {
        assert_eq!(v.as_f64().unwrap(), 0.0);
    }
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = path(&dir, name);
        let status = tgeom(&[
            "chain",
            "--d",
            "0.01",
            "--sigma0",
            "0.1",
            "--links",
            "300",
            "--ensemble",
            "2",
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ])
        .status;
        assert!(status.success());
        (
            fs::read(&out).unwrap(),
            fs::read(out.with_file_name(format!("{}.summary.json", name.trim_end_matches(".csv"))))
                .unwrap(),
        )
    };
    assert_eq!(run("a.csv", "3"), run("b.csv", "3"));
    assert_ne!(run("c.csv", "3").0, run("d.csv", "4").0);

    let report = |seed: &str| {
        tgeom(&[
            "check",
            "--geometry",
            &fixture("distorted.json"),
            "--seed",
            seed,
        ])
        .stdout
    };
    assert_eq!(report("1"), report("1"));
}

#[test]
fn rest_frame_measure_reports_numeric_failure() {
    let out = tgeom(&[
        "chain",
        "--d",
        "0.01",
        "--sigma0",
        "0.1",
        "--links",
        "1000",
        "--measure",
        "rest-frame",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn scalar_products_and_expressions() {
    let m = fixture("minkowski4.json");
    let out = tgeom(&[
        "scalar",
        "--geometry",
        &m,
        "--v",
        "0,0,0,0;2,0,0,0",
        "--w",
        "1,1,0,0;4,1,0,0",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["vectors"]["scalar"], 6.0);
    assert_eq!(v["vectors"]["class_w"], "timelike");
    assert_eq!(v["vectors"]["parallel_same_direction"], true);

    let dir = tempfile::tempdir().unwrap();
    let expr = path(&dir, "expr.json");
    fs::write(
        &expr,
        r#"{"skeleton": [[0,0,0,0],[1,0,0,0]], "r": [3,0,0,0],
            "expr": {"op": "scalar", "p0": "P0", "p1": "P1", "q0": "P0", "q1": "R"}}"#,
    )
    .unwrap();
    let out = tgeom(&["scalar", "--geometry", &m, "--expr", expr.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["expr_value"], 3.0);

    assert_eq!(tgeom(&["scalar", "--geometry", &m]).status.code(), Some(2));
    assert_eq!(
        tgeom(&["scalar", "--geometry", &m, "--v", "0,0;1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn degeneracy_command() {
    let out = tgeom(&[
        "degeneracy",
        "--geometry",
        &fixture("euclid3.json"),
        "--p0",
        "0,0,0",
        "--dir",
        "0,0,0;0,1,1",
        "--a",
        "1.5",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["solution_count"], 1);
    assert_eq!(v["report"]["degenerate"], true);
    let bad = tgeom(&[
        "degeneracy",
        "--geometry",
        &fixture("euclid3.json"),
        "--p0",
        "0,0",
        "--dir",
        "0,0,0;0,1,1",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn plots_profile_and_chain() {
    let dir = tempfile::tempdir().unwrap();
    let profile = path(&dir, "p.csv");
    let chain = path(&dir, "c.csv");
    assert!(tgeom(&[
        "tube-profile",
        "--d",
        "0.01",
        "--sigma0",
        "0.1",
        "--tau-points",
        "21",
        "--out",
        profile.to_str().unwrap()
    ])
    .status
    .success());
    assert!(tgeom(&[
        "chain",
        "--d",
        "0.01",
        "--sigma0",
        "0.1",
        "--links",
        "50",
        "--out",
        chain.to_str().unwrap()
    ])
    .status
    .success());

    let svg = String::from_utf8(tgeom(&["plot", profile.to_str().unwrap()]).stdout).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polyline").count(), 2);

    let out = path(&dir, "c.svg");
    assert!(tgeom(&[
        "plot",
        chain.to_str().unwrap(),
        "--out",
        out.to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(
        fs::read_to_string(out).unwrap().matches("<circle").count(),
        51
    );
}

#[test]
fn plot_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = path(&dir, "empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(
        tgeom(&["plot", empty.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let header_only = path(&dir, "h.csv");
    fs::write(&header_only, "tau,r_numeric,r_closed_form\n").unwrap();
    assert_eq!(
        tgeom(&["plot", header_only.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let unknown = path(&dir, "u.csv");
    fs::write(&unknown, "a,b\n1,2\n").unwrap();
    assert_eq!(
        tgeom(&["plot", unknown.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let garbled = path(&dir, "g.csv");
    fs::write(&garbled, "tau,r_numeric,r_closed_form\n0.1,abc,0.2\n").unwrap();
    assert_eq!(
        tgeom(&["plot", garbled.to_str().unwrap()]).status.code(),
        Some(2)
    );
}
