use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use thdisk::disk_spectrum::neumann_zeros;

fn thdisk(dir: &Path, sub: &str, config: &Value, out: Option<&Path>) -> Output {
    let cfg = dir.join(format!("{sub}-{}.json", std::process::id()));
    std::fs::write(&cfg, serde_json::to_vec_pretty(config).unwrap()).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_thdisk"));
    cmd.arg(sub).arg("--config").arg(&cfg);
    if let Some(o) = out {
        cmd.arg("--out").arg(o);
    }
    cmd.output().unwrap()
}

fn ok(o: &Output) {
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

fn read_json(p: PathBuf) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

fn trace_config() -> Value {
    json!({
        "seed": 11,
        "stability": {
            "family": {"family": "mussel_algae", "b": 1.5, "kappa": 1.0, "alpha": 0.3, "radius": 6.0, "nonlocal": true},
            "plane": {
                "modes": [{"n": 0, "m": 0}, {"n": 1, "m": 1}, {"n": 2, "m": 1}, {"n": 2, "m": 2}, {"n": 3, "m": 2}],
                "p1": {"lo": 0.02, "hi": 0.05, "samples": 13},
                "p2": {"lo": 0.0, "hi": 6.0, "samples": 7},
                "hopf_scan": {"omega_max": 1.0, "omega_samples": 40, "tau_samples": 40},
                "tol": [0.005, 0.5]
            }
        }
    })
}

#[test]
fn eigs_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("eigs.csv");
    ok(&thdisk(tmp.path(), "eigs", &json!({"spectrum": {"n_max": 2, "m_max": 2, "radius": 6.0}}), Some(&out)));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,m,kind,alpha,lambda");
    assert_eq!(rows.len(), 1 + 11);
    let want = (neumann_zeros(1, 1).unwrap()[0] / 6.0).powi(2);
    assert!(rows[1..].iter().any(|r| {
        let f: Vec<&str> = r.split(',').collect();
        f[0] == "1" && f[1] == "1" && (f[4].parse::<f64>().unwrap() - want).abs() < 1e-12
    }));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");
    let unknown = thdisk(tmp.path(), "eigs", &json!({"spectrum": {"n_max": 1, "m_max": 1, "radius": 1.0}, "extra": 1}), Some(&out));
    assert_eq!(unknown.status.code(), Some(2));
    let missing = thdisk(tmp.path(), "trace", &json!({}), Some(&out));
    assert_eq!(missing.status.code(), Some(2));
    let no_cfg = Command::new(env!("CARGO_BIN_EXE_thdisk")).arg("eigs").output().unwrap();
    assert_eq!(no_cfg.status.code(), Some(2));
    let blow_up = json!({"simulate": {
        "config": {"model": "linear_test", "params": {"d1": 0.1, "a0": 50.0}, "grid": {"radius": 1.0, "nr": 4, "ntheta": 8},
                   "dt": 0.01, "t_end": 1.0, "diagnostics": {"n_max": 2}},
        "initial": {"kind": "constant", "values": [1.0]}
    }});
    let o = thdisk(tmp.path(), "simulate", &blow_up, Some(&out));
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
    let corrupt = tmp.path().join("corrupt");
    std::fs::create_dir(&corrupt).unwrap();
    std::fs::write(corrupt.join("manifest.json"), "{").unwrap();
    let o = thdisk(tmp.path(), "classify", &json!({"classify": {"frames": corrupt}}), None);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn trace_finds_curves_and_interactions_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&thdisk(tmp.path(), "trace", &trace_config(), Some(&a)));
    ok(&thdisk(tmp.path(), "trace", &trace_config(), Some(&b)));
    let curves = std::fs::read_to_string(a.join("curves.csv")).unwrap();
    assert!(curves.lines().any(|l| l.starts_with("turing,")));
    assert!(curves.lines().any(|l| l.starts_with("hopf,")));
    let report = read_json(a.join("interactions.json"));
    assert!(!report["interactions"].as_array().unwrap().is_empty());
    for f in ["curves.csv", "interactions.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn undelayed_linear_family_has_no_hopf_points() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t");
    let cfg = json!({"stability": {
        "family": {"family": "linear_test", "radius": 1.0, "a0": 0.5, "a1": 0.0},
        "plane": {"modes": [{"n": 0, "m": 0}, {"n": 1, "m": 1}], "p1": {"lo": 0.0, "hi": 1.0, "samples": 5},
                  "p2": {"lo": 0.0, "hi": 3.0, "samples": 4}, "tol": [0.1, 0.1]}
    }});
    ok(&thdisk(tmp.path(), "trace", &cfg, Some(&out)));
    assert_eq!(read_json(out.join("interactions.json"))["hopf_points"], 0);
}

#[test]
fn empty_range_warns_and_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t");
    let mut cfg = trace_config();
    cfg["stability"]["plane"]["p1"]["samples"] = json!(0);
    ok(&thdisk(tmp.path(), "trace", &cfg, Some(&out)));
    let report = read_json(out.join("interactions.json"));
    assert!(!report["warnings"].as_array().unwrap().is_empty());
    assert_eq!(std::fs::read_to_string(out.join("curves.csv")).unwrap().lines().count(), 1);
}

#[test]
fn reconstruct_matches_closed_form_and_classifies() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("frames");
    let spec = serde_json::to_value(thdisk::pattern::example_eteh_spec(6.0)).unwrap();
    let cfg = json!({"pattern": {
        "spec": spec,
        "grid": {"radius": 6.0, "nr": 12, "ntheta": 24},
        "times": {"t0": 0.0, "t1": 12.566370614359172, "count": 49}
    }});
    ok(&thdisk(tmp.path(), "reconstruct", &cfg, Some(&out)));
    let (frames, manifest) = thdisk::rd::FrameSet::read_dir(&out).unwrap();
    assert_eq!(manifest.times.len(), 49);
    let g = frames.grid;
    let k22 = neumann_zeros(2, 2).unwrap()[1] / 6.0;
    let k11 = neumann_zeros(1, 1).unwrap()[0] / 6.0;
    let j = |n: usize, x: f64| thdisk::disk_spectrum::bessel_j(n, x).unwrap();
    for i in 0..g.nr {
        for jj in 0..g.ntheta {
            let (r, th) = (g.r(i), g.theta(jj));
            let want = j(2, k22 * r) * (2.0 * th).cos() + j(1, k11 * r) * th.cos();
            assert!((frames.field(0, 0)[g.index(i, jj)] - want).abs() < 1e-12);
        }
    }
    let label = thdisk(tmp.path(), "classify", &json!({"classify": {"frames": out}}), None);
    ok(&label);
    let v: Value = serde_json::from_slice(&label.stdout).unwrap();
    assert_eq!(v["label"], "rotating");
}

#[test]
fn nf_reports_the_rotating_wave_radius() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("nf");
    let cfg = json!({"normal_form": {
        "form": {"system": "eteh_polar", "eps1": 0.5, "eps2": -0.2, "c11": -2.0, "c12": -1.0, "c13": 0.1,
                 "c21": 0.3, "c22": 0.2, "c23": -1.0},
        "initial": [0.1, 0.05, 0.1, 0.1], "t_end": 5.0, "dt": 0.01, "stride": 10
    }});
    ok(&thdisk(tmp.path(), "nf", &cfg, Some(&out)));
    let report = read_json(out.join("report.json"));
    let eq = report["equilibria"]["equilibria"].as_array().unwrap();
    let iii = eq.iter().find(|e| e["class_id"] == "iii").unwrap();
    let rho = iii["state"][1].as_f64().unwrap();
    assert!((rho - 0.25f64.sqrt()).abs() < 1e-12);
    let traj = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 51);
    assert_eq!(report["trajectory"]["samples"], 51);
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = json!({"simulate": {
        "config": {"model": "mussel_algae_nonlocal", "params": {"b": 1.5, "kappa": 1.0, "alpha": 0.3, "d1": 0.036, "tau": 0.5},
                   "grid": {"radius": 6.0, "nr": 8, "ntheta": 16}, "dt": 0.01, "t_end": 1.0, "record_every": 20,
                   "diagnostics": {"n_max": 4}},
        "initial": {"kind": "perturbed", "angular": ["cos", "sin"]}
    }});
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&thdisk(tmp.path(), "simulate", &cfg, Some(&a)));
    ok(&thdisk(tmp.path(), "simulate", &cfg, Some(&b)));
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 6 + 2);
    for n in names {
        assert_eq!(std::fs::read(a.join(&n)).unwrap(), std::fs::read(b.join(&n)).unwrap());
    }
    let man = read_json(a.join("manifest.json"));
    assert_eq!(man["format"], "thdisk-frameset");
    assert_eq!(man["species"], json!(["m", "a"]));
}
