use std::path::Path;
use std::process::Command;

use minimal_timelike::cli::{read_obj_vertices, run};
use serde_json::Value;

fn mtsurf(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(
        std::iter::once("mtsurf").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn gate(report: &Value, name: &str) -> (f64, bool) {
    let g = report["gates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|g| g["name"] == name)
        .unwrap_or_else(|| panic!("no gate {name}"));
    (
        g["value"].as_f64().unwrap_or(f64::INFINITY),
        g["pass"].as_bool().unwrap(),
    )
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_writes_the_closed_form_enneper() {
    let dir = tempfile::tempdir().unwrap();
    for (part, oracle) in [
        (
            "real",
            (|u: f64, v: f64| {
                [
                    -u * (u * u + 3.0 * v * v + 3.0) / 6.0,
                    -v * (3.0 * u * u + v * v - 3.0) / 6.0,
                    (u * u + v * v) / 2.0,
                ]
            }) as fn(f64, f64) -> [f64; 3],
        ),
        ("imag", |u, v| {
            [
                -v * (3.0 * u * u + v * v + 3.0) / 6.0,
                -u * (u * u + 3.0 * v * v - 3.0) / 6.0,
                u * v,
            ]
        }),
    ] {
        let out = dir.path().join(format!("enneper-{part}.obj"));
        let (code, stdout, stderr) = mtsurf(&[
            "generate",
            "--f",
            "1",
            "--g",
            "z",
            "--part",
            part,
            "--domain",
            "-1:1:-1:1",
            "--grid",
            "41x41",
            "--out",
            path_str(&out),
        ]);
        assert_eq!(code, 0, "{stderr}");
        let report = json(&stdout);
        assert_eq!(report["schema_version"], 1);
        // (±1, 0) lie on the lightlike locus u² − v² = 1
        assert_eq!(report["summary"]["invalid_count"], 2);
        let vertices = read_obj_vertices(&out).unwrap();
        assert_eq!(vertices.len(), 41 * 41);
        assert_eq!(vertices[20 * 41 + 20], [0.0; 3]);
        for (n, p) in vertices.iter().enumerate() {
            let (u, v) = (-1.0 + 0.05 * (n % 41) as f64, -1.0 + 0.05 * (n / 41) as f64);
            let q = oracle(u, v);
            assert!(
                (0..3).all(|c| (p[c] - q[c]).abs() < 1e-8),
                "{part} ({u},{v}): {p:?} vs {q:?}"
            );
        }
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2 * 40 * 40);
    }
}

#[test]
fn obj_vertices_round_trip_exactly() {
    use minimal_timelike::domain::{Grid, Rect};
    use minimal_timelike::weierstrass::SurfacePatch;
    let grid = Grid::new(Rect::new(-0.3, 0.7, -0.2, 0.4).unwrap(), 5, 4).unwrap();
    let patch = SurfacePatch::from_fn(grid, |u, v| [u.exp() / 3.0, (u * v).sin(), 1.0 / (1.1 + v)]);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.obj");
    minimal_timelike::cli::write_obj(&patch, &out).unwrap();
    let read = read_obj_vertices(&out).unwrap();
    let expected: Vec<_> = patch.points().iter().map(|p| p.unwrap()).collect();
    assert_eq!(read, expected);
}

#[test]
fn csv_export_feeds_verify() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("enneper.csv");
    let (code, _, stderr) = mtsurf(&[
        "generate",
        "--g",
        "z",
        "--domain",
        "-0.4:0.4:-0.4:0.4",
        "--grid",
        "17x17",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(code, 0, "{stderr}");
    let header = std::fs::read_to_string(&csv)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(header, "u,v,x1,x2,x3,E,F,G,L,M,N,K,H");
    let (code, stdout, stderr) = mtsurf(&["verify", "--csv", path_str(&csv), "--canonical"]);
    assert_eq!(code, 0, "{stderr}{stdout}");
    let report = json(&stdout);
    assert!(gate(&report, "max_abs_h").1);
    assert!(gate(&report, "canonical_coefficients").1);
}

#[test]
fn non_minimal_csv_fails_the_h_gate() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("graph.csv");
    let mut w = csv::Writer::from_path(&csv).unwrap();
    w.write_record(["u", "v", "x1", "x2", "x3"]).unwrap();
    for k in 0..11 {
        for i in 0..11 {
            let (u, v) = (-0.3 + 0.06 * i as f64, -0.3 + 0.06 * k as f64);
            w.write_record([u, v, u, v, u * u].map(|x| x.to_string())).unwrap();
        }
    }
    w.flush().unwrap();
    let (code, stdout, _) = mtsurf(&["verify", "--csv", path_str(&csv)]);
    assert_eq!(code, 1);
    let report = json(&stdout);
    let (h, pass) = gate(&report, "max_abs_h");
    assert!(!pass && h > 0.1, "{h}");
}

#[test]
fn verify_canonical_enneper_and_gauge_shift() {
    let (code, stdout, stderr) = mtsurf(&["verify", "--g", "z", "--canonical"]);
    assert_eq!(code, 0, "{stderr}");
    let plain = json(&stdout);
    for name in ["max_abs_h", "canonical_coefficients", "curvature_equation"] {
        assert!(gate(&plain, name).1, "{name}");
    }
    let (code, stdout, _) = mtsurf(&["verify", "--g", "z", "--canonical", "--gauge", "-1,0.25,-0.1"]);
    assert_eq!(code, 0);
    let shifted = json(&stdout);
    assert_eq!(shifted["passed"], plain["passed"]);
    assert!((gate(&shifted, "canonical_coefficients").0 - gate(&plain, "canonical_coefficients").0).abs() < 1e-9);

    // non-canonical data fails the shape gate
    let (code, stdout, _) = mtsurf(&["verify", "--f", "1", "--g", "2*z", "--canonical"]);
    assert_eq!(code, 1);
    assert!(!gate(&json(&stdout), "canonical_coefficients").1);
}

#[test]
fn canonicalize_reports() {
    let (code, stdout, stderr) = mtsurf(&["canonicalize", "--f", "2", "--g", "z+1", "--z0", "-1"]);
    assert_eq!(code, 0, "{stderr}");
    let r = json(&stdout);
    assert_eq!(r["map"]["kind"], "affine");
    let g_tilde = minimal_timelike::holofn::HoloExpr::parse(r["g_tilde"].as_str().unwrap()).unwrap();
    let w = minimal_timelike::algebra::SplitComplex::new(0.3, -0.2);
    assert!((g_tilde.eval(w).unwrap() - w.scale(0.5f64.sqrt())).magnitude() < 1e-12);

    let (code, stdout, _) = mtsurf(&["canonicalize", "--f", "1", "--g", "z"]);
    assert_eq!(code, 0);
    assert_eq!(json(&stdout)["identity"], true);

    let (code, _, stderr) = mtsurf(&["canonicalize", "--f", "1", "--g", "z^3"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("square root"), "{stderr}");

    let (code, stdout, stderr) = mtsurf(&[
        "canonicalize",
        "--f",
        "exp(z)",
        "--g",
        "exp(z)",
        "--domain",
        "-0.3:0.3:-0.3:0.3",
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert!(gate(&json(&stdout), "eq_residual").1);
}

#[test]
fn classify_reads_coefficient_json() {
    use minimal_timelike::classify::CubicParametrization;
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (CubicParametrization::enneper(), "EnneperNegative"),
        (
            CubicParametrization::enneper().transformed(&nalgebra::Matrix3::identity(), [0.0; 3], 2.0),
            "EnneperNegative",
        ),
    ];
    for (n, (cubic, verdict)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("c{n}.json"));
        std::fs::write(&path, cubic.to_json()).unwrap();
        let (code, stdout, stderr) = mtsurf(&["classify", path_str(&path)]);
        assert_eq!(code, 0, "{stderr}");
        let r = json(&stdout);
        assert_eq!(r["verdict"], *verdict);
        assert!((r["scale"].as_f64().unwrap() - (n + 1) as f64).abs() < 1e-8);
    }
    let graph = dir.path().join("graph.json");
    std::fs::write(
        &graph,
        r#"{"x1": {"(1,0)": 1.0}, "x2": {"(0,1)": 1.0}, "x3": {"(2,0)": 1.0}}"#,
    )
    .unwrap();
    let (code, stdout, _) = mtsurf(&["classify", path_str(&graph)]);
    assert_eq!(code, 0);
    assert_eq!(json(&stdout)["verdict"], "NotIsothermal");
    let (code, _, _) = mtsurf(&["classify", path_str(&dir.path().join("missing.json"))]);
    assert_eq!(code, 3);
}

#[test]
fn transform_reports_witness() {
    let (code, stdout, stderr) = mtsurf(&[
        "transform",
        "--g",
        "z",
        "--phi",
        "0.3",
        "--alpha",
        "0.2+0.1J",
        "--sign",
        "-",
    ]);
    assert_eq!(code, 0, "{stderr}");
    let r = json(&stdout);
    assert!(gate(&r, "witness").1 && gate(&r, "curvature_invariance").1);
    assert!((r["witness"]["B"][0][0].as_f64().unwrap() - 1.05 / 0.97).abs() < 1e-12);

    let (code, stdout, _) = mtsurf(&[
        "transform",
        "--g",
        "z",
        "--form",
        "inversion",
        "--domain",
        "0.2:0.4:-0.1:0.1",
    ]);
    assert_eq!(code, 0);
    assert!(gate(&json(&stdout), "curvature_invariance").1);

    // the derivative reading of the inversion does not preserve K
    let (code, stdout, _) = mtsurf(&[
        "transform",
        "--g",
        "z+z^2",
        "--form",
        "inversion-literal",
        "--domain",
        "0.2:0.4:-0.1:0.1",
    ]);
    assert_eq!(code, 1);
    assert!(!gate(&json(&stdout), "curvature_invariance").1);

    let (code, _, stderr) = mtsurf(&["transform", "--g", "z", "--alpha", "1.25+0.75J"]);
    assert_eq!(code, 2, "{stderr}");
}

#[test]
fn usage_and_parse_errors() {
    let (code, _, stderr) = mtsurf(&["generate", "--g", "z+*2", "--domain", "-1:1:-1:1", "--out", "/dev/null"]);
    assert_eq!(code, 3);
    assert!(stderr.contains("offset 2") && stderr.contains('^'), "{stderr}");
    assert_eq!(
        mtsurf(&["generate", "--g", "z", "--domain", "1:-1:-1:1", "--out", "/dev/null"]).0,
        3
    );
    assert_eq!(
        mtsurf(&[
            "generate",
            "--g",
            "z",
            "--domain",
            "-1:1:-1:1",
            "--grid",
            "2x9",
            "--out",
            "/dev/null"
        ])
        .0,
        3
    );
    assert_eq!(mtsurf(&["frobnicate"]).0, 3);
    assert_eq!(mtsurf(&["verify", "--g", "z", "--gauge", "2,0,0"]).0, 3);
    let (code, out, _) = mtsurf(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("canonicalize"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_mtsurf");
    let ok = Command::new(bin)
        .args(["canonicalize", "--f", "1", "--g", "z"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(std::str::from_utf8(&ok.stdout).unwrap())["schema_version"], 1);
    let bad = Command::new(bin)
        .args(["canonicalize", "--g", "sin(z)"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
}
