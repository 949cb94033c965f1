use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projhardy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn report_has_stable_top_level_fields() {
    let out = run(&["reproduce", &fixture("bidisk"), "--tau", "0,0", "--f", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let mut keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "command",
            "pass",
            "resolution",
            "results",
            "spec_hash",
            "tolerances",
            "version"
        ]
    );
    assert_eq!(r["command"], "reproduce");
    assert_eq!(r["spec_hash"].as_str().unwrap().len(), 64);
    let res = &r["results"][0];
    assert!(res["rel_err"].as_f64().unwrap() <= 1e-10);
    assert!(res["per_piece"]["faces"].is_array() && res["per_piece"]["edges"].is_array());
}

#[test]
fn reproduce_perturbed_bidisk_polynomial() {
    for tau in ["0.2+0.1i,-0.3", "-0.4i,0.1+0.25i", "0.5,0.5i"] {
        let out = run(&[
            "reproduce",
            &fixture("perturbed_bidisk"),
            "--tau",
            tau,
            "--f",
            "1 + z1 - 2*z2^2 + (0,1)*z1*z2^2",
        ]);
        assert_eq!(out.status.code(), Some(0), "{tau}");
        assert!(json(&out)["results"][0]["rel_err"].as_f64().unwrap() <= 1e-4);
    }
}

#[test]
fn spec_hash_ignores_formatting() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("sphere")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let compact = dir.path().join("compact.json");
    std::fs::write(&compact, serde_json::to_string(&v).unwrap()).unwrap();
    let hash = |p: &str| {
        json(&run(&["reproduce", p, "--tau", "0,0", "--resolution", "8"]))["spec_hash"].clone()
    };
    assert_eq!(hash(&fixture("sphere")), hash(compact.to_str().unwrap()));
}

#[test]
fn tau_outside_the_domain_is_a_precondition_failure() {
    // On the strong tangent w1 + 0.1 w2 = 1.1 r of the first face at the corner (r, r).
    let r = 1.0 / 1.1f64.sqrt();
    let tau = format!("{},{}", 1.1 * r - 0.1 * 0.5, 0.5);
    let out = run(&["reproduce", &fixture("perturbed_bidisk"), "--tau", &tau]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pole"));
}

#[test]
fn input_errors_exit_two() {
    let out = run(&["check-domain", &fixture("non_hermitian")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not real-valued"));
    let out = run(&[
        "reproduce",
        &fixture("bidisk"),
        "--tau",
        "0,0",
        "--f",
        "conj(z1)",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["reproduce", &fixture("bidisk"), "--tau", "zero"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["check-domain", "/nonexistent/domain.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_domain_outcomes() {
    let out = run(&["check-domain", &fixture("perturbed_bidisk")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);

    let out = run(&["check-domain", &fixture("bad_orientation")]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    let failed: Vec<&Value> = r["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .collect();
    assert!(failed
        .iter()
        .any(|c| c["check"] == "orientation:H1" && c["detail"].as_str().unwrap().contains("H1")));

    let out = run(&["check-domain", &fixture("wedge_complement")]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert!(r["results"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["check"] == "edge:0:local_intersection" && c["pass"] == false));
}

#[test]
fn eta_csv_header_is_stable() {
    let out = run(&[
        "eta",
        &fixture("perturbed_bidisk"),
        "--grid",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p1,p2,z1_re,z1_im,z2_re,z2_im,kappa,eta_weight,b1,b2,contact_margin,fit_residual"
    );
    assert_eq!(lines.count(), 16);
}

#[test]
fn eta_positive_on_perturbed_bidisk_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eta.json");
    let out = run(&[
        "eta",
        &fixture("perturbed_bidisk"),
        "--edge",
        "H1+H2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = r["results"].as_array().unwrap();
    assert_eq!(rows.len(), 64 * 64);
    assert!(rows
        .iter()
        .all(|row| row["eta_weight"].as_f64().unwrap() > 0.0));
}

#[test]
fn eta_reports_zeros_on_contact_fixture() {
    let out = run(&["eta", &fixture("kappa_zero"), "--grid", "6"]);
    // Not certified positive, so the run fails.
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    let rows = r["results"].as_array().unwrap();
    let mut zeros = 0;
    for row in rows {
        let p = row["params"].as_array().unwrap();
        let (x1, x2) = (p[0].as_f64().unwrap(), p[1].as_f64().unwrap());
        let k = row["kappa"].as_f64().unwrap();
        let e = row["eta_weight"].as_f64().unwrap();
        assert!(k >= -1e-8);
        // κ vanishes along the antidiagonal of this fixture's edge chart.
        if (x1 + x2).abs() <= 1e-14 {
            assert!(k.abs() <= 1e-8 && e.abs() <= 1e-8, "{k} {e}");
            zeros += 1;
        }
    }
    assert_eq!(zeros, 6);

    let out = run(&["eta", &fixture("kappa_negative"), "--grid", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["results"]
        .as_array()
        .unwrap()
        .iter()
        .all(|row| row["eta_weight"].as_f64().unwrap() < 0.0));
}

#[test]
fn selftest_passes_and_detects_injected_sign_flip() {
    let out = run(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"].as_array().unwrap().len(), 8);

    let out = run(&["selftest", "--inject", "corner-sign"]);
    assert_ne!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], false);

    let out = run(&["selftest", "--suite", ""]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = ["selftest", "--suite", "laws", "--seed", "7"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = [
        "reproduce",
        &fixture("sphere"),
        "--tau",
        "0.3,-0.2i",
        "--resolution",
        "12",
    ];
    let a = run(&args);
    assert_eq!(a.stdout, run(&args).stdout);
}
