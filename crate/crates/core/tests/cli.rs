//! Command-line behaviour, file formats and animation frames.

use sandglass::cli::run;
use sandglass::io::{animate, read_obj};
use sandglass::snap::{snap_pair, SaddleOptions};
use sandglass::sweep::read_table;

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("sandglass").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn origami_prints_q3() {
    let (code, out, _) = call(&["origami", "--n", "3", "--q1", "1", "--q2", "3"]);
    assert_eq!(code, 0);
    let line = out.lines().find(|l| l.starts_with("Q3 = ")).unwrap();
    let q3: f64 = line[5..].parse().unwrap();
    assert!((q3 - 1.0).abs() < 1e-15);
    // 17 significant digits
    assert_eq!(line, "Q3 = 1.0000000000000000e0");
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["origami", "--n", "3", "--q1", "0.2", "--q2", "1"]).0, 1);
    let (code, _, err) = call(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
    let (code, _, err) = call(&["snap", "--q1", "0.7"]);
    assert_eq!(code, 2);
    assert!(err.contains("usage"));
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn sweep_shake_table() {
    let (code, out, _) = call(&["sweep-shake", "--n", "3"]);
    assert_eq!(code, 0);
    let (header, rows) = read_table(&out).unwrap();
    assert_eq!(header[0], "n");
    assert_eq!(rows.len(), 60);
    assert!(out.starts_with("# sandglass "));
    // byte-identical reruns
    assert_eq!(call(&["sweep-shake", "--n", "3"]).1, out);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# shaky design\nn = 3\nq1 = 0.27\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, from_file, _) = call(&["shaky", "--config", cfg]);
    assert_eq!(code, 0);
    let (_, direct, _) = call(&["shaky", "--n", "3", "--q1", "0.27"]);
    assert_eq!(from_file, direct);
    let (_, overridden, _) = call(&["shaky", "--config", cfg, "--n", "4"]);
    assert_eq!(overridden, call(&["shaky", "--n", "4", "--q1", "0.27"]).1);

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "n = 3\ncolour = red\n").unwrap();
    assert_eq!(call(&["shaky", "--config", bad.to_str().unwrap()]).0, 2);
}

#[test]
fn snap_writes_obj_triple() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("snap");
    let (code, out, _) = call(&["snap", "--n", "3", "--q1", "0.75", "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    for name in ["open.obj", "saddle.obj", "closed.obj"] {
        let text = std::fs::read_to_string(out_dir.join(name)).unwrap();
        assert!(text.starts_with("# sandglass "));
        let mesh = read_obj(&text).unwrap();
        assert_eq!(mesh.faces.len(), 24);
        mesh.check_closed().unwrap();
    }
}

#[test]
fn export_obj_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("closed.obj");
    let args = ["export-obj", "--n", "4", "--q1", "0.67", "--state", "closed", "--out", path.to_str().unwrap()];
    assert_eq!(call(&args).0, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let mesh = read_obj(&text).unwrap();
    let res = snap_pair(4, 0.67, &SaddleOptions::default()).unwrap();
    let expected = res.closed.mesh();
    assert_eq!(mesh.vertices, expected.vertices);
    assert_eq!(mesh.faces, expected.faces);
    assert_eq!(mesh.edges, expected.edges);
    // deterministic output
    call(&args);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn export_crease_counts() {
    let (code, svg, _) = call(&["export-crease", "--n", "3", "--q1", "0.27", "--state", "shaky"]);
    assert_eq!(code, 0);
    assert_eq!(svg.matches("class=\"crease ").count(), 18);
}

#[test]
fn animation_frames() {
    let res = snap_pair(3, 0.75, &SaddleOptions::default()).unwrap();
    let two = animate(&res, 2).unwrap();
    assert_eq!(two[0].vertices, res.open.mesh().vertices);
    assert_eq!(two[1].vertices, res.closed.mesh().vertices);
    assert!(animate(&res, 1).is_err());

    let frames = 41;
    let meshes = animate(&res, frames).unwrap();
    assert!(meshes.iter().all(|m| m.faces == meshes[0].faces));
    // the frame nearest the saddle lies within one sampling interval of it
    let path = res.path();
    let length: f64 = path.windows(2).map(|w| w[0].distance(&w[1])).sum();
    let spacing = length / (frames - 1) as f64;
    let saddle = sandglass::geometry::Mesh::sandglass(res.spec.skeleton(), &res.saddle.coords);
    let gap = meshes
        .iter()
        .map(|m| m.vertices.iter().zip(&saddle.vertices).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
        .fold(f64::MAX, f64::min);
    assert!(gap < 2.0 * spacing, "gap {gap} spacing {spacing}");

    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = call(&["animate", "--n", "3", "--q1", "0.75", "--frames", "5", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 5);
}
