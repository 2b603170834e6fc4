//! Drives the `scatterptych` binary: subcommands, output files, exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use scatterptych::formats::{read_manifest, read_stack, write_gray16_png};
use scatterptych::RealImage;

const PITCH: f64 = 6.5e-6;
const LAMBDA: f64 = 532e-9;
const DESK_DISTANCE: f64 = 50e-3 * 0.26 * 0.26;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scatterptych"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[allow(clippy::too_many_arguments)]
fn sim_config(
    dir: &Path,
    name: &str,
    grid: usize,
    distance: f64,
    radius: f64,
    scan: (usize, f64),
    object: &str,
    medium: &str,
) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let text = format!(
        r#"{{
  "grid": {{"width": {grid}, "height": {grid}, "pixel_pitch_m": {PITCH:e}}},
  "wavelength_m": {LAMBDA:e},
  "distance_m": {distance:e},
  "probe": {{"radius_m": {radius:e}}},
  "scan": {{"nx": {n}, "ny": {n}, "step_m": {step:e}}},
  "object": {object},
  "medium": {medium},
  "output_name": "{name}"
}}"#,
        n = scan.0,
        step = scan.1
    );
    fs::write(&path, text).unwrap();
    path
}

const TEXTURE: &str =
    r#"{"source": "phantom", "kind": "natural_texture", "seed": 11, "max_phase_rad": 0.5}"#;
const TARGET: &str =
    r#"{"source": "phantom", "kind": "resolution_target", "seed": 0, "size_pixels": 160}"#;
const NO_MEDIUM: &str = r#"{"kind": "none"}"#;

fn desk_config(dir: &Path, name: &str, object: &str, medium: &str) -> PathBuf {
    sim_config(
        dir,
        name,
        256,
        DESK_DISTANCE,
        40.0 * PITCH,
        (5, 12.0 * PITCH),
        object,
        medium,
    )
}

fn simulate(config: &Path, out: &Path) -> PathBuf {
    let o = run(&["simulate", "--config", p(config), "--out", p(out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let name = config.file_stem().unwrap().to_str().unwrap();
    out.join(format!("{name}.json"))
}

#[test]
fn simulate_full_size_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = sim_config(
        dir.path(),
        "full",
        512,
        50e-3,
        1e-3,
        (5, 300e-6),
        TEXTURE,
        NO_MEDIUM,
    );
    let o = run(&["simulate", "--config", p(&cfg), "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("patterns:     25"), "{text}");
    assert!(text.contains("overlap rate: 0.810"), "{text}");
    let manifest = read_manifest(&dir.path().join("full.json")).unwrap();
    assert_eq!(manifest.m, 25);
    assert_eq!(manifest.positions_m.len(), 25);
    let payload = fs::metadata(dir.path().join("full.f32")).unwrap().len();
    assert_eq!(payload, 25 * 512 * 512 * 4);
}

#[test]
fn single_position_config_gives_one_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = sim_config(
        dir.path(),
        "one",
        64,
        1e-3,
        12.0 * PITCH,
        (1, 4.0 * PITCH),
        TEXTURE,
        NO_MEDIUM,
    );
    let stack = read_stack(&simulate(&cfg, dir.path())).unwrap();
    assert_eq!(stack.len(), 1);
    assert_eq!(stack.positions(), &[(0.0, 0.0)]);
}

#[test]
fn simulate_twice_gives_identical_checksums() {
    let dir = tempfile::tempdir().unwrap();
    let medium = r#"{"kind": "dynamic", "contrast": 0.3, "grain_pixels": 2.0, "frames_averaged": 3, "seed": 5}"#;
    let cfg = sim_config(
        dir.path(),
        "noisy",
        64,
        1e-3,
        12.0 * PITCH,
        (3, 4.0 * PITCH),
        TEXTURE,
        medium,
    );
    let a = read_manifest(&simulate(&cfg, &dir.path().join("a"))).unwrap();
    let b = read_manifest(&simulate(&cfg, &dir.path().join("b"))).unwrap();
    assert_eq!(a.payload_sha256, b.payload_sha256);

    let o = run(&[
        "simulate",
        "--config",
        p(&cfg),
        "--out",
        p(&dir.path().join("c")),
        "--seed",
        "6",
    ]);
    assert!(o.status.success());
    let c = read_manifest(&dir.path().join("c/noisy.json")).unwrap();
    assert_ne!(a.payload_sha256, c.payload_sha256);
}

#[test]
fn reconstruct_noiseless_stack_converges() {
    let dir = tempfile::tempdir().unwrap();
    let stack = simulate(
        &desk_config(dir.path(), "clean", TEXTURE, NO_MEDIUM),
        dir.path(),
    );
    let out = dir.path().join("recon");
    let o = run(&[
        "reconstruct",
        "--stack",
        p(&stack),
        "--out",
        p(&out),
        "--probe-init",
        "aperture",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("converged:  true"));
    for f in [
        "object_amplitude.png",
        "object_phase.png",
        "probe_amplitude.png",
        "sse.csv",
        "summary.json",
    ] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let csv = fs::read_to_string(out.join("sse.csv")).unwrap();
    let last: f64 = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(last < 0.01);
    let img = image::open(out.join("object_amplitude.png")).unwrap();
    assert_eq!(img.color(), image::ColorType::L16);
}

#[test]
fn single_iteration_writes_one_sse_row_and_reports_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let stack = simulate(
        &desk_config(dir.path(), "clean", TEXTURE, NO_MEDIUM),
        dir.path(),
    );
    let out = dir.path().join("recon");
    let o = run(&[
        "reconstruct",
        "--stack",
        p(&stack),
        "--out",
        p(&out),
        "--max-iters",
        "1",
        "--epsilon",
        "1e-9",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let csv = fs::read_to_string(out.join("sse.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("1,"));
}

#[test]
fn crop_reconstructs_a_sub_window() {
    let dir = tempfile::tempdir().unwrap();
    let stack = simulate(
        &desk_config(dir.path(), "clean", TEXTURE, NO_MEDIUM),
        dir.path(),
    );
    let out = dir.path().join("recon");
    let o = run(&[
        "reconstruct",
        "--stack",
        p(&stack),
        "--out",
        p(&out),
        "--crop",
        "32,32,192,192",
        "--max-iters",
        "2",
    ]);
    assert!(
        matches!(o.status.code(), Some(0) | Some(3)),
        "{}",
        stderr(&o)
    );
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["width"], 192);
    let o = run(&[
        "reconstruct",
        "--stack",
        p(&stack),
        "--out",
        p(&out),
        "--crop",
        "200,0,100,100",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn corrupted_payload_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = sim_config(
        dir.path(),
        "s",
        64,
        1e-3,
        12.0 * PITCH,
        (3, 4.0 * PITCH),
        TEXTURE,
        NO_MEDIUM,
    );
    let stack = simulate(&cfg, dir.path());
    let payload = dir.path().join("s.f32");
    let mut bytes = fs::read(&payload).unwrap();
    bytes[100] ^= 0x40;
    fs::write(&payload, bytes).unwrap();
    let o = run(&[
        "reconstruct",
        "--stack",
        p(&stack),
        "--out",
        p(&dir.path().join("r")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).to_lowercase().contains("checksum"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["reconstruct"]).status.code(), Some(1));
    assert_eq!(run(&["overlap", "-1", "1e-4"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"grid": {"width": 0}}"#).unwrap();
    assert_eq!(
        run(&["simulate", "--config", p(&bad)]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_stack_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reconstruct", "--stack", p(&dir.path().join("nope.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn overlap_verdicts() {
    let o = run(&["overlap", "1e-3", "300e-6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("rate: 0.810") && text.contains("PASS"),
        "{text}"
    );
    let text = stdout(&run(&["overlap", "1e-3", "0"]));
    assert!(
        text.contains("rate: 1.000") && text.contains("WARN"),
        "{text}"
    );
    let text = stdout(&run(&["overlap", "1e-3", "1.5e-3"]));
    assert!(
        text.contains("rate: 0.144") && text.contains("WARN"),
        "{text}"
    );
}

fn metrics(image: &Path, region: &str) -> serde_json::Value {
    let o = run(&["metrics", p(image), "--region", region]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn metrics_on_synthetic_images() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.png");
    write_gray16_png(&flat, &RealImage::filled(16, 16, 0.25).unwrap(), 0.0, 1.0).unwrap();
    let r = metrics(&flat, "2,2,8,8");
    assert_eq!(r["std"], 0.0);
    assert!((r["mean"].as_f64().unwrap() - 0.25).abs() < 1e-4);

    let checker = dir.path().join("checker.png");
    let img = RealImage::from_fn(16, 16, |x, y| ((x + y) % 2) as f64).unwrap();
    write_gray16_png(&checker, &img, 0.0, 1.0).unwrap();
    let r = metrics(&checker, "0,0,16,16");
    assert_eq!(r["std"], 0.5);
    assert_eq!(r["mean"], 0.5);

    let o = run(&["metrics", p(&checker), "--region", "10,10,8,8"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn metrics_reports_geometry_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = sim_config(
        dir.path(),
        "full",
        512,
        50e-3,
        1e-3,
        (5, 300e-6),
        TEXTURE,
        NO_MEDIUM,
    );
    let img = dir.path().join("x.png");
    write_gray16_png(&img, &RealImage::filled(8, 8, 0.5).unwrap(), 0.0, 1.0).unwrap();
    let o = run(&[
        "metrics",
        p(&img),
        "--region",
        "0,0,4,4",
        "--config",
        p(&cfg),
        "--sse",
        "sse.csv",
    ]);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((r["fov_extent_m"][0].as_f64().unwrap() - 3.2e-3).abs() < 1e-12);
    assert!((r["overlap_rate"].as_f64().unwrap() - 0.8097).abs() < 1e-3);
    assert_eq!(r["sse_history"], "sse.csv");
}

#[test]
fn dynamic_medium_lowers_background_std() {
    let dir = tempfile::tempdir().unwrap();
    let stat = r#"{"kind": "static", "contrast": 0.2, "grain_pixels": 1.0, "seed": 1}"#;
    let dynm = r#"{"kind": "dynamic", "contrast": 0.2, "grain_pixels": 1.0, "frames_averaged": 4, "seed": 1}"#;
    let mut stds = Vec::new();
    for (name, medium) in [("static", stat), ("dynamic", dynm)] {
        let stack = simulate(&desk_config(dir.path(), name, TARGET, medium), dir.path());
        let out = dir.path().join(format!("{name}_recon"));
        let o = run(&[
            "reconstruct",
            "--stack",
            p(&stack),
            "--out",
            p(&out),
            "--probe-init",
            "aperture",
        ]);
        assert!(matches!(o.status.code(), Some(0) | Some(3)));
        let r = metrics(&out.join("object_amplitude.png"), "152,118,20,20");
        // each run's PNG has its own display gain; std / mean cancels it
        stds.push(r["std"].as_f64().unwrap() / r["mean"].as_f64().unwrap());
    }
    let ratio = stds[1] / stds[0];
    println!(
        "static {:.4}, dynamic {:.4}, ratio {ratio:.3}",
        stds[0], stds[1]
    );
    assert!(stds[0] > stds[1]);
    assert!((ratio - 0.5).abs() < 0.15);
}

#[test]
fn shipped_configs_run() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let dir = tempfile::tempdir().unwrap();
    let stack = simulate(&configs.join("desk_target.json"), dir.path());
    let o = run(&[
        "reconstruct",
        "--stack",
        p(&stack),
        "--config",
        p(&configs.join("recon.json")),
        "--out",
        p(&dir.path().join("r")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let o = run(&[
        "simulate",
        "--config",
        p(&configs.join("full_geometry.json")),
        "--out",
        p(dir.path()),
    ]);
    assert!(stdout(&o).contains("patterns:     25"), "{}", stderr(&o));
}
