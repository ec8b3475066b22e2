use std::path::Path;
use std::process::Command;

use homlat_cli::{parse_manifest_str, run_solve, CliError};

const LAMINATE: &str = r#"
[pattern]
matrix = [[16, 0], [0, 16]]

[geometry]
kind = "laminate"
normal = 0
fraction = 0.5
phase1 = { young = 1.0, poisson = 0.3 }
phase2 = { young = 10.0, poisson = 0.3 }

[load]
strain = [1.0, 0.0, 0.0]
"#;

fn homlat(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_homlat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap())
        .collect()
}

#[test]
fn homogeneous_run_converges_at_once_without_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[pattern]
matrix = [[8, 0], [0, 8]]
[geometry]
kind = "homogeneous"
material = { young = 3.0, poisson = 0.25 }
[load]
strain = [0.5, -1.0, 0.25]
"#;
    let m = parse_manifest_str(text, "homogeneous").unwrap();
    let outcome = run_solve(&m, dir.path()).unwrap();
    assert_eq!(outcome.report.iterations, 1);
    assert_eq!(outcome.metrics.as_ref().unwrap().e_eff, 0.0);
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("iterations: 1\n"), "{summary}");
    assert!(summary.contains("e_eff: 0.0000000000000000e0"), "{summary}");
    let rows = csv_rows(&dir.path().join("strain.csv"));
    assert_eq!(rows.len(), 64);
}

#[test]
fn solve_writes_heatmap_with_one_pixel_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let text = LAMINATE.replace("[[16, 0], [0, 16]]", "[[4, -2], [4, 14]]")
        + "\n[output]\nheatmap = \"eps11\"\nphase_map = true\ngreen_table = true\n";
    let manifest = write(dir.path(), "run.toml", &text);
    let out = dir.path().join("out");
    let result = homlat(&["solve", &manifest, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let img = image::open(out.join("heatmap_eps11.ppm")).unwrap().to_rgb8();
    assert_eq!(img.width() * img.height(), 64);
    assert!(out.join("heatmap_eps11.ppm.range.txt").exists());
    assert_eq!(csv_rows(&out.join("phases.csv")).len(), 64);
    let table = std::fs::metadata(out.join("green_table.bin")).unwrap();
    assert_eq!(table.len(), 64 * 9 * 8);
}

#[test]
fn laminate_bands_are_orthogonal_to_the_normal() {
    let dir = tempfile::tempdir().unwrap();
    let text = LAMINATE.to_string() + "\n[output]\nheatmap = \"eps11\"\n";
    let manifest = write(dir.path(), "run.toml", &text);
    let out = dir.path().join("out");
    assert!(homlat(&["solve", &manifest, "--out", out.to_str().unwrap()]).status.success());
    let img = image::open(out.join("heatmap_eps11.ppm")).unwrap().to_rgb8();
    // Normal along y1: every raster column is constant, and both phases show.
    for x in 0..img.width() {
        let top = *img.get_pixel(x, 0);
        assert!((0..img.height()).all(|y| *img.get_pixel(x, y) == top));
    }
    assert_ne!(img.get_pixel(0, 0), img.get_pixel(img.width() - 1, 0));
}

#[test]
fn sweep_has_one_row_per_slope_pair() {
    let dir = tempfile::tempdir().unwrap();
    let text = LAMINATE.to_string()
        + "\n[output]\nstrain_csv = false\n[sweep]\nslopes1 = [0.0, 0.25, 0.5]\nslopes2 = [0.0, 0.1]\n";
    let manifest = write(dir.path(), "sweep.toml", &text);
    let out = dir.path().join("out");
    let result = homlat(&["--threads", "2", "sweep", &manifest, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let rows = csv_rows(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 6);
    let pairs: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[2].parse().unwrap(), r[3].parse().unwrap()))
        .collect();
    assert_eq!(pairs[0], (0.0, 0.0));
    assert_eq!(pairs[1], (0.0, 0.1));
    assert_eq!(pairs[5], (0.5, 0.1));
    assert!(rows.iter().all(|r| &r[1] == "dlvp"));
    let baseline = csv_rows(&out.join("baseline.csv"));
    assert_eq!(&baseline[0][1], "dirichlet");
}

#[test]
fn effective_matches_laminate_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write(dir.path(), "eff.toml", LAMINATE);
    let out = dir.path().join("out");
    let result = homlat(&["effective", &manifest, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    assert_eq!(csv_rows(&out.join("effective.csv")).len(), 3);
    let summary = std::fs::read_to_string(out.join("effective_summary.txt")).unwrap();
    let line = summary
        .lines()
        .find(|l| l.starts_with("laminate_oracle_max_component_error"))
        .unwrap();
    let err: f64 = line.split(": ").nth(1).unwrap().parse().unwrap();
    assert!(err < 1e-10, "{summary}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write(dir.path(), "missing.toml", &LAMINATE.replace("matrix = [[16, 0], [0, 16]]", ""));
    let result = homlat(&["solve", &missing]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("pattern.matrix"));

    let unknown = write(dir.path(), "unknown.toml", &format!("{LAMINATE}\n[load2]\nx = 1\n"));
    let result = homlat(&["solve", &unknown]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("line 15"));

    let stalled = write(
        dir.path(),
        "stalled.toml",
        &format!("{LAMINATE}\n[solver]\nmax_iter = 1\n[reference]\nrefine = 0\n"),
    );
    let out = dir.path().join("out");
    let result = homlat(&["solve", &stalled, "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(3));

    let result = homlat(&["selftest", "--seed", "7"]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stdout));
}

#[test]
fn parse_errors_name_the_file() {
    let err = parse_manifest_str("[pattern\n", "broken.toml").unwrap_err();
    assert!(matches!(err, CliError::Parse { line: 1, .. }));
    assert!(err.to_string().starts_with("broken.toml: line 1"));
}

#[test]
fn shipped_manifests_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../manifests");
    let hashin = homlat_cli::parse_manifest(&root.join("hashin.toml")).unwrap();
    assert_eq!(hashin.heatmap, homlat_cli::HeatmapField::LogError);
    let sweep = homlat_cli::parse_manifest(&root.join("laminate_sweep.toml")).unwrap();
    assert_eq!(sweep.sweep.unwrap().runs().len(), 121);
}
