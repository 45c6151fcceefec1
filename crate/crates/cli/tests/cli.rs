//! End-to-end checks of the `glm` binary: subcommands, file outputs and
//! the exit-code contract (0 success, 2 config error, 3 numerical error).

use std::path::Path;
use std::process::Command;

fn glm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_glm"))
}

fn write_config(path: &Path, body: &str) {
    std::fs::write(path, body).unwrap();
}

const SMALL_RUN: &str = r#"{
    "dataset": {"generator": "three-moons", "seed": 3},
    "graph": {"neighbors": 10, "scale_neighbor": 10},
    "method": "multiclass_gl",
    "solver": {"k": 3, "mu": 30.0, "dt": 0.01, "eps": 1.0, "n_max": 40, "seed": 3},
    "fidelity": {"per_class": 25, "seed": 3},
    "runs": 1,
    "output_dir": "OUT_DIR"
}"#;

#[test]
fn generate_writes_expected_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    let moons = dir.path().join("moons.csv");
    let status = glm()
        .args(["generate", "three-moons", "--seed", "1"])
        .arg("--out")
        .arg(&moons)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&moons).unwrap();
    assert_eq!(text.lines().count(), 1501); // header + 1500 rows
    assert!(text.lines().next().unwrap().ends_with(",label"));

    let roll = dir.path().join("roll.csv");
    let status = glm()
        .args(["generate", "swiss-roll", "--seed", "1"])
        .arg("--out")
        .arg(&roll)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read_to_string(&roll).unwrap().lines().count(), 1601);
}

#[test]
fn unknown_generator_exits_2_with_usage() {
    let output = glm()
        .args(["generate", "two-circles"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("possible values") || stderr.contains("Usage"),
        "{stderr}"
    );
}

#[test]
fn config_with_unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    write_config(
        &config,
        &SMALL_RUN
            .replace("OUT_DIR", dir.path().join("out").to_str().unwrap())
            .replace("\"runs\": 1", "\"runs\": 1, \"name\": \"x\""),
    );
    let output = glm().arg("run").arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn numerical_divergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("diverge.json");
    // subnormal eps: the 1/eps potential force overflows on the first sweep
    write_config(
        &config,
        &SMALL_RUN
            .replace("OUT_DIR", dir.path().join("out").to_str().unwrap())
            .replace("\"eps\": 1.0", "\"eps\": 1e-310"),
    );
    let output = glm().arg("run").arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(3), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("divergence"), "{stderr}");
}

#[test]
fn run_writes_report_trace_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let config = dir.path().join("run.json");
    write_config(
        &config,
        &SMALL_RUN.replace("OUT_DIR", out_dir.to_str().unwrap()),
    );
    let status = glm().arg("run").arg(&config).status().unwrap();
    assert!(status.success());
    for name in ["report.json", "trace.csv", "energy.svg", "scatter.svg"] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["runs"], 1);
    assert_eq!(report["method"], "multiclass_gl");
    // 40 iterations is far from converged; just require above-chance
    assert!(report["mean_accuracy"].as_f64().unwrap() > 1.0 / 3.0);
    assert_eq!(report["confusion"].as_array().unwrap().len(), 3);
    // trace has n_max rows plus header
    let trace = std::fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 41);
}

#[test]
fn full_fidelity_run_scores_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let config = dir.path().join("full.json");
    write_config(
        &config,
        &SMALL_RUN
            .replace("OUT_DIR", out_dir.to_str().unwrap())
            .replace("{\"per_class\": 25, \"seed\": 3}", "{\"fraction\": 1.0, \"seed\": 3}")
            .replace("\"mu\": 30.0", "\"mu\": 1e4"),
    );
    let status = glm().arg("run").arg(&config).status().unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["mean_accuracy"].as_f64().unwrap(), 1.0);
}

#[test]
fn graph_cache_round_trips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("moons.csv");
    glm()
        .args(["generate", "three-moons", "--seed", "3"])
        .arg("--out")
        .arg(&csv)
        .status()
        .unwrap();
    let cache = dir.path().join("moons.glgr");
    let status = glm()
        .arg("graph")
        .arg("--input")
        .arg(&csv)
        .args(["--neighbors", "10", "--scale-m", "10"])
        .arg("--out")
        .arg(&cache)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(cache.exists());

    // identical report with and without the cache
    let config = dir.path().join("run.json");
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    write_config(&config, &SMALL_RUN.replace("OUT_DIR", out_a.to_str().unwrap()));
    glm()
        .arg("run")
        .arg(&config)
        .arg("--no-timing")
        .status()
        .unwrap();
    let status = glm()
        .arg("run")
        .arg(&config)
        .arg("--no-timing")
        .arg("--graph-cache")
        .arg(&cache)
        .arg("--out")
        .arg(&out_b)
        .status()
        .unwrap();
    assert!(status.success());
    let a = std::fs::read(out_a.join("report.json")).unwrap();
    let b = std::fs::read(out_b.join("report.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn baseline_kmeans_runs_on_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("moons.csv");
    glm()
        .args(["generate", "three-moons", "--seed", "2"])
        .arg("--out")
        .arg(&csv)
        .status()
        .unwrap();
    let report_path = dir.path().join("kmeans.json");
    let status = glm()
        .args(["baseline", "kmeans", "--k", "3", "--runs", "3", "--seed", "5"])
        .arg("--input")
        .arg(&csv)
        .arg("--out")
        .arg(&report_path)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["method"], "kmeans");
    let acc = report["mean_accuracy"].as_f64().unwrap();
    assert!(acc > 0.5 && acc <= 1.0, "accuracy {acc}");
}

/// Four flat color quadrants, a few scribbles each: with 1x1 patches the
/// features are the colors themselves, so the masks must match the
/// quadrants exactly.
#[test]
fn segment_image_recovers_flat_regions() {
    let dir = tempfile::tempdir().unwrap();
    let (w, h) = (12usize, 12usize);
    let mut rgb = vec![0u8; w * h * 3];
    let colors = [
        [255u8, 0, 0],
        [0, 255, 0],
        [0, 0, 255],
        [255, 255, 0],
    ];
    let quadrant = |x: usize, y: usize| -> usize {
        usize::from(x >= w / 2) + 2 * usize::from(y >= h / 2)
    };
    for y in 0..h {
        for x in 0..w {
            let c = colors[quadrant(x, y)];
            let i = (y * w + x) * 3;
            rgb[i..i + 3].copy_from_slice(&c);
        }
    }
    let image = dir.path().join("quad.ppm");
    let mut bytes = format!("P6\n{w} {h}\n255\n").into_bytes();
    bytes.extend_from_slice(&rgb);
    std::fs::write(&image, bytes).unwrap();

    // a plus-shaped scribble in each quadrant
    let scribbles = dir.path().join("scribbles.csv");
    let mut rows = String::from("x,y,class\n");
    for (cx, cy, class) in [(3i32, 3i32, 0), (9, 3, 1), (3, 9, 2), (9, 9, 3)] {
        for (dx, dy) in [(0i32, 0i32), (1, 0), (-1, 0), (0, 1), (0, -1)] {
            rows.push_str(&format!("{},{},{class}\n", cx + dx, cy + dy));
        }
    }
    std::fs::write(&scribbles, rows).unwrap();

    let out_dir = dir.path().join("masks");
    let status = glm()
        .arg("segment-image")
        .arg("--image")
        .arg(&image)
        .arg("--scribbles")
        .arg(&scribbles)
        .args(["--classes", "4", "--patch", "1", "--neighbors", "8", "--scale-m", "8"])
        .args(["--nmax", "400", "--seed", "4"])
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());

    for class in 0..4usize {
        let mask_path = out_dir.join(format!("class_{class}.ppm"));
        let mask = std::fs::read(&mask_path).unwrap();
        let header_len = format!("P6\n{w} {h}\n255\n").len();
        let raster = &mask[header_len..];
        for y in 0..h {
            for x in 0..w {
                let white = raster[(y * w + x) * 3] == 255;
                assert_eq!(
                    white,
                    quadrant(x, y) == class,
                    "class {class} mask wrong at ({x}, {y})"
                );
            }
        }
    }
}

#[test]
fn segment_image_missing_class_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("img.ppm");
    let mut bytes = b"P6\n4 4\n255\n".to_vec();
    bytes.extend_from_slice(&[128u8; 48]);
    std::fs::write(&image, bytes).unwrap();
    let scribbles = dir.path().join("s.csv");
    std::fs::write(&scribbles, "0,0,0\n1,1,1\n2,2,2\n").unwrap(); // class 3 missing
    let output = glm()
        .arg("segment-image")
        .arg("--image")
        .arg(&image)
        .arg("--scribbles")
        .arg(&scribbles)
        .args(["--classes", "4", "--patch", "1"])
        .arg("--out")
        .arg(dir.path().join("masks"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("class 3"), "{stderr}");
}

#[test]
fn glm_threads_env_var_is_validated() {
    let output = glm()
        .env("GLM_THREADS", "zero")
        .args(["generate", "three-moons"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    // and a valid value works
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let status = glm()
        .env("GLM_THREADS", "2")
        .args(["generate", "three-moons"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
}
