use std::path::Path;
use std::process::{Command, Output};

use spiralsheet::conformal::map_to_exterior;
use spiralsheet::single_spiral::{solve_matching, transport_to_strip};
use spiralsheet::{complex_potential, profile_velocity, Complex64, PolarPoint, SpiralParams, StripPoint};

fn spiralsheet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spiralsheet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn out_path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn solve_at_a_equal_one() {
    let out = spiralsheet(&["solve", "--a", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["mu"].as_f64().unwrap().abs() < 1e-12);
    assert!((v["gs"][0].as_f64().unwrap() - std::f64::consts::PI.tanh()).abs() < 1e-12);
}

#[test]
fn zero_tightness_is_a_usage_error() {
    let out = spiralsheet(&["solve", "--a", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn two_by_two_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = out_path(&dir, "g.csv");
    let out = spiralsheet(&["grid", "--a", "0.5", "--bounds", "-1,1,-1,1", "--res", "2,2", "--out", &path]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert_eq!(text.lines().next().unwrap(), "x,y,u,v,speed,J,flag");
    let rows = csv_rows(Path::new(&path));
    let corners: Vec<(f64, f64)> = rows.iter().map(|r| (num(&r[0]), num(&r[1]))).collect();
    assert_eq!(corners, vec![(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]);
}

#[test]
fn grid_straddling_the_sheet_has_sentinel_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = out_path(&dir, "s.csv");
    let out = spiralsheet(&[
        "grid", "--a", "0.5", "--bounds", "0.9,1.1,-0.05,0.05", "--res", "5,3", "--out", &path,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(Path::new(&path));
    let sentinel: Vec<_> = rows.iter().filter(|r| r[6] == "on_sheet").collect();
    assert_eq!(sentinel.len(), 1);
    assert_eq!((num(&sentinel[0][0]), num(&sentinel[0][1])), (1.0, 0.0));
    assert!(sentinel[0][2..6].iter().all(String::is_empty));
    // Winding number changes across the sheet.
    let j: Vec<&str> = rows.iter().filter(|r| num(&r[1]) == 0.0 && r[6] == "ok").map(|r| r[5].as_str()).collect();
    assert_eq!(j, vec!["1", "1", "0", "0"]);
}

#[test]
fn strip_grid_matches_transported_spiral_velocity() {
    let a = 0.8;
    let s = solve_matching(a).unwrap();
    let p = SpiralParams::new(a, s.mu, s.g).unwrap();
    let width = 2.0 * std::f64::consts::PI * a / (1.0 + a * a);
    let dir = tempfile::tempdir().unwrap();
    let path = out_path(&dir, "strip.csv");
    let bounds = format!("{},{},-2,2", -0.95 * width, -0.05 * width);
    let out = spiralsheet(&["grid", "--a", "0.8", "--frame", "strip", "--bounds", &bounds, "--res", "9,11", "--out", &path]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(Path::new(&path));
    assert_eq!(rows.len(), 99);
    for r in rows {
        assert_eq!(r[6], "ok");
        let z = StripPoint::new(num(&r[0]), num(&r[1]));
        let spiral_z = map_to_exterior(z.to_complex(), a);
        let w = profile_velocity(PolarPoint::from_complex(spiral_z), &p).unwrap();
        let expected = transport_to_strip(w, z, a);
        let got = Complex64::new(num(&r[2]), num(&r[3]));
        assert!((got - expected).norm() < 1e-10 * (1.0 + expected.norm()), "{z:?}");
    }
}

#[test]
fn verify_passes_for_solved_parameters_and_reports_wrong_strength() {
    let dir = tempfile::tempdir().unwrap();
    let good = out_path(&dir, "good.json");
    let out = spiralsheet(&["verify", "--a", "0.8", "--samples", "40", "--probes", "10", "--out", &good]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    assert!(reports.as_array().unwrap().iter().all(|r| r["pass"] == true));

    let g = solve_matching(0.8).unwrap().g + 0.1;
    let bad = out_path(&dir, "bad.json");
    let g_arg = g.to_string();
    let out = spiralsheet(&["verify", "--a", "0.8", "--g", &g_arg, "--samples", "40", "--probes", "10", "--out", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let reports: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&bad).unwrap()).unwrap();
    let failing: Vec<&str> = reports
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["pass"] == false)
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert!(failing.contains(&"strip_reconstruction_tangential_jump"), "{failing:?}");
    assert!(failing.contains(&"velocity_matching"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strip_reconstruction_tangential_jump"));
}

#[test]
fn verify_at_resonance_skips_closed_form_reports() {
    let out = spiralsheet(&["verify", "--a", "1", "--samples", "20", "--probes", "6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let skipped: Vec<&str> = reports
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r.get("note").is_some_and(|n| n.as_str().unwrap().contains("resonant")))
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert!(skipped.contains(&"telescoping"));
    assert!(skipped.contains(&"strip_frame_transport"));
}

fn trajectory(args: &[&str], dir: &tempfile::TempDir) -> Vec<Vec<String>> {
    let path = out_path(dir, "traj.csv");
    let mut full = vec!["advect"];
    full.extend_from_slice(args);
    full.extend(["--out", &path]);
    let out = spiralsheet(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    csv_rows(Path::new(&path))
}

#[test]
fn steady_flow_conserves_the_stream_function() {
    let dir = tempfile::tempdir().unwrap();
    let rows = trajectory(
        &["--a", "0.8", "--mu", "0", "--g", "1", "--points", "0.6,0.2;-1.5,0.4", "--t0", "1", "--t1", "1.5", "--dt", "0.001"],
        &dir,
    );
    let p = SpiralParams::new(0.8, 0.0, 1.0).unwrap();
    for id in ["0", "1"] {
        let psi: Vec<f64> = rows
            .iter()
            .filter(|r| r[1] == id && r[4] == "ok")
            .map(|r| {
                let z = Complex64::new(num(&r[2]), num(&r[3]));
                complex_potential(PolarPoint::from_complex(z), &p).unwrap().im
            })
            .collect();
        assert!(psi.len() > 400);
        let drift = psi.iter().map(|v| (v - psi[0]).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-6, "particle {id}: drift {drift:e}");
    }
}

#[test]
fn zero_field_leaves_particles_at_rest() {
    let dir = tempfile::tempdir().unwrap();
    let rows = trajectory(
        &["--a", "0.8", "--mu", "0", "--g", "0", "--points", "0.5,0.1;2,-3", "--t0", "1", "--t1", "2", "--dt", "0.1"],
        &dir,
    );
    assert_eq!(rows.len(), 22);
    for r in rows {
        assert_eq!(r[4], "ok");
        let start = if r[1] == "0" { (0.5, 0.1) } else { (2.0, -3.0) };
        assert_eq!((num(&r[2]), num(&r[3])), start);
    }
}

/// With `v = t^μ w(z/t^μ)`, `ζ = z/t^μ` obeys `dζ/dt = w(ζ) - μζ/t`.
#[test]
fn trajectories_respect_self_similar_rescaling() {
    let a = 0.8;
    let s = solve_matching(a).unwrap();
    let p = SpiralParams::new(a, s.mu, s.g).unwrap();
    let (t0, t1) = (1.0f64, 1.4f64);
    let z0 = Complex64::new(0.9, 0.7);
    let dir = tempfile::tempdir().unwrap();
    let rows = trajectory(&["--a", "0.8", "--points", "0.9,0.7", "--t0", "1", "--t1", "1.4", "--dt", "0.0005"], &dir);
    let last = rows.last().unwrap();
    assert_eq!(last[4], "ok");
    assert!((num(&last[0]) - t1).abs() < 1e-12);
    let z1 = Complex64::new(num(&last[2]), num(&last[3]));

    let rhs = |zeta: Complex64, t: f64| {
        profile_velocity(PolarPoint::from_complex(zeta), &p).unwrap() - s.mu * zeta / t
    };
    let n = 4000;
    let h = (t1 - t0) / n as f64;
    let mut zeta = z0 / t0.powf(s.mu);
    for i in 0..n {
        let t = t0 + h * i as f64;
        let k1 = rhs(zeta, t);
        let k2 = rhs(zeta + 0.5 * h * k1, t + 0.5 * h);
        let k3 = rhs(zeta + 0.5 * h * k2, t + 0.5 * h);
        let k4 = rhs(zeta + h * k3, t + h);
        zeta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    let expected = zeta * t1.powf(s.mu);
    assert!((z1 - expected).norm() < 1e-8 * expected.norm(), "{z1} vs {expected}");
}
