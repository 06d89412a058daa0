use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qcurves(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcurves")).args(args).output().unwrap()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn out(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }

    fn spec(&self, name: &str, dimension: u8, curve: &str, domain: (f64, f64), samples: usize) -> String {
        let text = format!(
            r#"{{"dimension": {dimension}, "curve": {curve}, "domain": [{}, {}], "samples": {samples}}}"#,
            domain.0, domain.1
        );
        self.file(name, &text)
    }
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn run_ok(args: &[&str]) {
    let out = qcurves(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[test]
fn frame_csv_of_a_helix() {
    let ws = Workspace::new();
    let spec = ws.spec("h.json", 3, r#"{"kind": "helix3", "a": 2, "b": 1}"#, (0.0, TWO_PI), 1001);
    let out = ws.out("o");
    run_ok(&["frame", "--input", &spec, "--out", &out]);
    let text = fs::read_to_string(ws.path("o/frames.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s,x,y,z,tx,ty,tz,nx,ny,nz,bx,by,bz,k,r");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 997);
    let mean_k = rows.iter().map(|r| r[13]).sum::<f64>() / rows.len() as f64;
    assert!((mean_k - 0.4).abs() < 1e-9);
}

#[test]
fn frame_csv_in_e4() {
    let ws = Workspace::new();
    let curve = r#"{"kind": "clifford4", "a": 0.7071067811865476, "b": 0.7071067811865476, "omega": 2}"#;
    let spec = ws.spec("c.json", 4, curve, (0.0, TWO_PI), 1001);
    run_ok(&["frame", "--input", &spec, "--out", &ws.out("o")]);
    let text = fs::read_to_string(ws.path("o/frames.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("s,x,y,z,w,Tx,Ty,Tz,Tw,Nx"));
    assert!(header.ends_with("B2w,K,k,bitorsion"));
}

#[test]
fn check_reports_lambda() {
    let ws = Workspace::new();
    let helix = ws.spec("h.json", 3, r#"{"kind": "helix3", "a": 2, "b": 1}"#, (0.0, TWO_PI), 1001);
    let circle = ws.spec("c.json", 3, r#"{"kind": "circle3", "R": 3}"#, (0.0, TWO_PI), 1001);
    let control = ws.spec(
        "k.json",
        4,
        r#"{"kind": "from_curvatures", "profile": {"K": 0.4, "k": [[0, 0.1], [20, 0.3]], "bitorsion": 0.3}}"#,
        (0.0, 20.0),
        4001,
    );
    for (spec, lambda, verdict) in [(&helix, Some(2.0), true), (&circle, Some(3.0), true), (&control, None, false)] {
        let out = ws.out("o");
        run_ok(&["check", "--input", spec, "--tol", "1e-3", "--out", &out]);
        let report = json(&ws.path("o/check.json"));
        assert_eq!(report["verdict"], verdict, "{spec}");
        assert_eq!(report["tool"], "qcurves");
        assert_eq!(report["tolerance"], 1e-3);
        if let Some(l) = lambda {
            assert!((report["lambda"].as_f64().unwrap() - l).abs() < 1e-5);
        }
        assert!(ws.path("o/lambda_profile.csv").exists());
    }
}

#[test]
fn partner_and_verify_of_a_4d_pair() {
    let ws = Workspace::new();
    let spec = ws.spec(
        "s.json",
        4,
        r#"{"kind": "from_curvatures", "profile": {"K": 0.4, "k": 0.2, "bitorsion": 0.3}}"#,
        (0.0, 20.0),
        4001,
    );
    let out = ws.out("p");
    run_ok(&["partner", "--input", &spec, "--lambda", "2", "--out", &out]);
    for f in ["partner.csv", "partner_spec.json", "correspondence.csv", "partner_report.json", "pair_profile.csv"] {
        assert!(ws.path("p").join(f).exists(), "{f}");
    }
    let report = json(&ws.path("p/partner_report.json"));
    let pair = &report["pair"];
    assert!(pair["leakage"]["max"].as_f64().unwrap() <= 1e-5);
    assert!((pair["distance"]["mean"].as_f64().unwrap() - 2.0).abs() <= 1e-6);

    let partner_spec = ws.out("p/partner_spec.json");
    let map = ws.out("p/correspondence.csv");
    run_ok(&["verify", "--input", &spec, "--input2", &partner_spec, "--map", &map, "--out", &ws.out("v")]);
    let verify = json(&ws.path("v/verify_report.json"));
    assert_eq!(verify["pair"], report["pair"]);
}

#[test]
fn verify_curve_against_itself() {
    let ws = Workspace::new();
    let spec = ws.spec("h.json", 3, r#"{"kind": "helix3", "a": 2, "b": 1}"#, (0.0, TWO_PI), 1001);
    let step = 2.0 * 5f64.sqrt() * std::f64::consts::PI / 1000.0;
    let mut map = String::from("s,s_star\n");
    for i in 0..=1000 {
        let s = i as f64 * step;
        map.push_str(&format!("{s:.16e},{s:.16e}\n"));
    }
    let map = ws.file("id.csv", &map);
    run_ok(&["verify", "--input", &spec, "--input2", &spec, "--map", &map, "--out", &ws.out("v")]);
    let report = json(&ws.path("v/verify_report.json"));
    assert_eq!(report["pair"]["verdicts"]["normal_binormal_aligned"], false);
    assert!(report["pair"]["alignment"]["max"].as_f64().unwrap() < 1e-10);
}

#[test]
fn synthesize_round_trip() {
    let ws = Workspace::new();
    let spec = ws.spec(
        "s.json",
        4,
        r#"{"kind": "from_curvatures", "profile": {"K": 0.4, "k": 0.2, "bitorsion": 0.3}}"#,
        (0.0, 20.0),
        20001,
    );
    run_ok(&["synthesize", "--input", &spec, "--out", &ws.out("o")]);
    let report = json(&ws.path("o/synthesize.json"));
    for e in report["round_trip"]["max_error"].as_array().unwrap() {
        assert!(e.as_f64().unwrap() <= 1e-5);
    }
    // the written curve, read back as a sampled spec, gives the same curvatures
    run_ok(&["frame", "--input", &ws.out("o/curve_spec.json"), "--out", &ws.out("f")]);
    let text = fs::read_to_string(ws.path("f/frames.csv")).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let n = v.len();
        assert!((v[n - 3] - 0.4).abs() <= 1e-5 && (v[n - 2] - 0.2).abs() <= 1e-5 && (v[n - 1] - 0.3).abs() <= 1e-5);
    }
}

#[test]
fn synthesize_circle() {
    let ws = Workspace::new();
    let spec = ws.spec(
        "c.json",
        3,
        r#"{"kind": "from_curvatures", "profile": {"k": 0.5, "r": 0}}"#,
        (0.0, 4.0 * std::f64::consts::PI),
        4001,
    );
    run_ok(&["synthesize", "--input", &spec, "--out", &ws.out("o")]);
    let text = fs::read_to_string(ws.path("o/curve.csv")).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1].hypot(v[2] - 2.0) - 2.0).abs() <= 1e-6);
    }
}

#[test]
fn exit_codes() {
    let ws = Workspace::new();
    let out = ws.out("o");
    let helix = ws.spec("h.json", 3, r#"{"kind": "helix3", "a": 2, "b": 1}"#, (0.0, TWO_PI), 1001);

    // input errors
    let broken = ws.file("bad.json", "{ not json");
    assert_eq!(qcurves(&["frame", "--input", &broken, "--out", &out]).status.code(), Some(2));
    let missing = ws.out("missing.json");
    assert_eq!(qcurves(&["frame", "--input", &missing, "--out", &out]).status.code(), Some(2));
    let even = ws.spec("e.json", 3, r#"{"kind": "helix3", "a": 2, "b": 1}"#, (0.0, 1.0), 100);
    assert_eq!(qcurves(&["frame", "--input", &even, "--out", &out]).status.code(), Some(2));
    assert_eq!(qcurves(&["partner", "--input", &helix, "--out", &out]).status.code(), Some(2));
    assert_eq!(qcurves(&["frame", "--input", &helix, "--lambda", "2", "--out", &out]).status.code(), Some(2));
    assert_eq!(qcurves(&["explode", "--input", &helix, "--out", &out]).status.code(), Some(2));

    // geometric failures
    let negative = ws.spec(
        "n.json",
        3,
        r#"{"kind": "from_curvatures", "profile": {"k": [[0, 0.5], [1, -0.1], [2, 0.5]], "r": 0.1}}"#,
        (0.0, 2.0),
        201,
    );
    let run = qcurves(&["synthesize", "--input", &negative, "--out", &out]);
    assert_eq!(run.status.code(), Some(3), "{}", String::from_utf8_lossy(&run.stderr));
    let circle = ws.spec("c.json", 3, r#"{"kind": "circle3", "R": 2}"#, (0.0, TWO_PI), 1001);
    assert_eq!(qcurves(&["partner", "--input", &circle, "--lambda", "2", "--out", &out]).status.code(), Some(3));
    let s4 = ws.spec(
        "s4.json",
        4,
        r#"{"kind": "from_curvatures", "profile": {"K": 0.4, "k": 0.2, "bitorsion": 0.3}}"#,
        (0.0, 10.0),
        2001,
    );
    let run = qcurves(&["partner", "--input", &s4, "--lambda", "2.5", "--out", &out]);
    assert_eq!(run.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&run.stderr).contains("speed domain"));

    // correspondence failures
    run_ok(&["partner", "--input", &helix, "--lambda", "2", "--out", &ws.out("p")]);
    let full = fs::read_to_string(ws.path("p/correspondence.csv")).unwrap();
    let lines: Vec<&str> = full.lines().collect();
    let half = ws.file("half.csv", &(lines[..lines.len() / 2].join("\n") + "\n"));
    let partner = ws.out("p/partner_spec.json");
    let run = qcurves(&["verify", "--input", &helix, "--input2", &partner, "--map", &half, "--out", &out]);
    assert_eq!(run.status.code(), Some(4), "{}", String::from_utf8_lossy(&run.stderr));
    let mut swapped: Vec<&str> = lines.clone();
    swapped.swap(10, 11);
    let swapped = ws.file("swapped.csv", &(swapped.join("\n") + "\n"));
    let run = qcurves(&["verify", "--input", &helix, "--input2", &partner, "--map", &swapped, "--out", &out]);
    assert_eq!(run.status.code(), Some(4));
}
