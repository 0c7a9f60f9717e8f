//! End-to-end tests of the command-line pipeline and its file formats.

use std::path::{Path, PathBuf};
use std::process::Command;

use polsar::eval::parse_percentage_csv;
use polsar::io::{pnm, read_slc, read_t3};
use polsar::types::pauli_vector;

const SCENE_CFG: &str = "scene.width=50\n\
                         scene.height=60\n\
                         scene.looks=9\n\
                         scene.seed=2024\n\
                         scene.classes=3\n\
                         scene.class1.center=1.0,0.8,0.1,0.55,0.25,0,0,0,0\n\
                         scene.class1.rect=0,0,50,20\n\
                         scene.class2.center=0.5,0.5,0.5,0,0,0,0,0,0\n\
                         scene.class2.rect=0,20,50,20\n\
                         scene.class3.center=0.4,0.05,0.02,0,0,0,0,0,0\n\
                         scene.class3.rect=0,40,50,20\n";

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_polsar")
}

fn run_ok(args: &[&str]) {
    let out = Command::new(bin()).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "polsar {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn run_ok_stdout(args: &[&str]) -> String {
    let out = Command::new(bin()).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "polsar {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

struct Scene {
    _dir: tempfile::TempDir,
    base: PathBuf,
    t3: PathBuf,
    slc: PathBuf,
    truth: PathBuf,
    train: PathBuf,
}

fn synth_scene() -> Scene {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().to_path_buf();
    let cfg = base.join("scene.cfg");
    std::fs::write(&cfg, SCENE_CFG).unwrap();
    let scene = Scene {
        base: base.clone(),
        t3: base.join("t3"),
        slc: base.join("slc"),
        truth: base.join("truth.pgm"),
        train: base.join("train.pgm"),
        _dir: dir,
    };
    run_ok(&[
        "synth",
        "--config", cfg.to_str().unwrap(),
        "--t3-out", scene.t3.to_str().unwrap(),
        "--mask-out", scene.truth.to_str().unwrap(),
        "--slc-out", scene.slc.to_str().unwrap(),
        "--train-mask-out", scene.train.to_str().unwrap(),
        "--train-per-class", "80",
    ]);
    scene
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn filter_window_one_equals_per_pixel_outer_products() {
    let scene = synth_scene();
    let out_dir = scene.base.join("t3_w1");
    run_ok(&[
        "filter",
        "--mode", "boxcar",
        "--window", "1",
        "--input", path_str(&scene.slc),
        "--output", path_str(&out_dir),
    ]);
    let filtered = read_t3(&out_dir).unwrap();
    assert_eq!(filtered.looks(), 1);
    let slc = read_slc(&scene.slc).unwrap();
    for (m, s) in filtered.pixels().iter().zip(slc.samples()) {
        let expected = pauli_vector(s).outer();
        // Both routes pass through float32 planes; allow a quantization ulp.
        let diff = (*m - expected).frobenius_norm();
        assert!(
            diff <= 1e-6 * expected.frobenius_norm().max(1.0),
            "difference {diff:e}"
        );
    }
}

#[test]
fn evaluate_truth_against_itself_is_identity() {
    let scene = synth_scene();
    // A PGM map with label bytes is accepted as a prediction directly.
    let stdout = run_ok_stdout(&[
        "evaluate",
        "--truth", path_str(&scene.truth),
        "--predicted", path_str(&scene.truth),
    ]);
    let (names, rows, overall) = parse_percentage_csv(&stdout).unwrap();
    assert_eq!(names.len(), 3);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let expect = if i == j { 100.0 } else { 0.0 };
            assert_eq!(*v, expect, "row {i} col {j}");
        }
    }
    assert_eq!(overall, 100.0);
}

#[test]
fn full_wishart_pipeline_reaches_90_percent() {
    let scene = synth_scene();
    let model = scene.base.join("wishart.txt");
    let map = scene.base.join("map.ppm");
    let csv = scene.base.join("report.csv");
    run_ok(&[
        "train-wishart",
        "--input", path_str(&scene.t3),
        "--mask", path_str(&scene.train),
        "--model", path_str(&model),
    ]);
    run_ok(&[
        "classify-wishart",
        "--input", path_str(&scene.t3),
        "--model", path_str(&model),
        "--map", path_str(&map),
    ]);
    run_ok(&[
        "evaluate",
        "--truth", path_str(&scene.truth),
        "--predicted", path_str(&map),
        "--csv", path_str(&csv),
        "--names", "Urban,Vegetation,Water",
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let (names, _, overall) = parse_percentage_csv(&text).unwrap();
    assert_eq!(names, ["Urban", "Vegetation", "Water"]);
    assert!(overall >= 90.0, "overall accuracy {overall:.2} < 90");
}

#[test]
fn full_svm_pipeline_reaches_85_percent() {
    let scene = synth_scene();
    let model = scene.base.join("svm.txt");
    let map = scene.base.join("map.ppm");
    let csv = scene.base.join("report.csv");
    run_ok(&[
        "train-svm",
        "--input", path_str(&scene.t3),
        "--mask", path_str(&scene.train),
        "--model", path_str(&model),
    ]);
    run_ok(&[
        "classify-svm",
        "--input", path_str(&scene.t3),
        "--model", path_str(&model),
        "--map", path_str(&map),
    ]);
    run_ok(&[
        "evaluate",
        "--truth", path_str(&scene.truth),
        "--predicted", path_str(&map),
        "--csv", path_str(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let (_, _, overall) = parse_percentage_csv(&text).unwrap();
    assert!(overall >= 85.0, "overall accuracy {overall:.2} < 85");
}

#[test]
fn boxcar_then_lee_preserves_dimensions_and_looks() {
    let scene = synth_scene();
    let boxed = scene.base.join("t3_box");
    let leed = scene.base.join("t3_lee");
    run_ok(&[
        "filter",
        "--mode", "boxcar",
        "--window", "3",
        "--input", path_str(&scene.slc),
        "--output", path_str(&boxed),
    ]);
    run_ok(&[
        "filter",
        "--mode", "lee",
        "--window", "3",
        "--input", path_str(&boxed),
        "--output", path_str(&leed),
    ]);
    let a = read_t3(&boxed).unwrap();
    let b = read_t3(&leed).unwrap();
    assert_eq!(a.looks(), 9);
    assert_eq!(b.looks(), 9);
    assert_eq!(a.width(), b.width());
    assert_eq!(a.height(), b.height());
}

#[test]
fn decompose_writes_bounded_planes() {
    let scene = synth_scene();
    let haa = scene.base.join("haa");
    run_ok(&[
        "decompose",
        "--input", path_str(&scene.t3),
        "--output", path_str(&haa),
    ]);
    for (name, lo, hi) in [("H", 0.0, 1.0), ("A", 0.0, 1.0), ("alpha", 0.0, 90.0)] {
        let bytes = std::fs::read(haa.join(format!("{name}.f32"))).unwrap();
        assert_eq!(bytes.len(), 50 * 60 * 4);
        for chunk in bytes.chunks_exact(4) {
            let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
            assert!(
                (lo..=hi).contains(&(v as f64)),
                "{name} plane value {v} out of [{lo}, {hi}]"
            );
        }
    }
}

#[test]
fn malformed_plane_fails_with_single_line_diagnostic() {
    let scene = synth_scene();
    let victim = scene.t3.join("T22.f32");
    let bytes = std::fs::read(&victim).unwrap();
    std::fs::write(&victim, &bytes[..bytes.len() - 6]).unwrap();

    let model = scene.base.join("model.txt");
    let out = Command::new(bin())
        .args([
            "train-wishart",
            "--input", path_str(&scene.t3),
            "--mask", path_str(&scene.train),
            "--model", path_str(&model),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.trim_end().lines().count(), 1, "stderr: {stderr}");
    assert!(stderr.contains("T22.f32"), "stderr: {stderr}");
    assert!(stderr.contains("offset"), "stderr: {stderr}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "windows=3\n").unwrap();
    let out = Command::new(bin())
        .args(["filter", "--config", path_str(&cfg)])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unknown key"), "stderr: {stderr}");
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let scene = synth_scene();
    let out_a = scene.base.join("a");
    let out_b = scene.base.join("b");
    let cfg = scene.base.join("filter.cfg");
    std::fs::write(
        &cfg,
        format!(
            "input={}\noutput={}\nmode=boxcar\nwindow=3\n",
            path_str(&scene.slc),
            path_str(&out_a)
        ),
    )
    .unwrap();
    run_ok(&["filter", "--config", path_str(&cfg)]);
    // Same config, window overridden on the command line.
    run_ok(&[
        "filter",
        "--config", path_str(&cfg),
        "--window", "1",
        "--output", path_str(&out_b),
    ]);
    assert_eq!(read_t3(&out_a).unwrap().looks(), 9);
    assert_eq!(read_t3(&out_b).unwrap().looks(), 1);
}

#[test]
fn class_map_palette_is_stable() {
    let scene = synth_scene();
    let model = scene.base.join("wishart.txt");
    let map = scene.base.join("map.ppm");
    run_ok(&[
        "train-wishart",
        "--input", path_str(&scene.t3),
        "--mask", path_str(&scene.truth),
        "--model", path_str(&model),
    ]);
    run_ok(&[
        "classify-wishart",
        "--input", path_str(&scene.t3),
        "--model", path_str(&model),
        "--map", path_str(&map),
    ]);
    let bytes = std::fs::read(&map).unwrap();
    assert!(bytes.starts_with(b"P6"));
    let parsed = pnm::read_class_map(&map).unwrap();
    assert_eq!(parsed.classes().len(), 50 * 60);
    assert!(parsed.classes().iter().all(|&c| (1..=3).contains(&c)));
}
