use std::path::PathBuf;
use std::process::{Command, Output};

fn qexp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qexp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parses a CSV with a header into rows keyed by column name.
fn rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| {
            header
                .iter()
                .map(|h| h.to_string())
                .zip(l.split(',').map(String::from))
                .collect()
        })
        .collect()
}

fn f(row: &std::collections::HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap()
}

fn input(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "inputs", name]
        .iter()
        .collect();
    p.to_str().unwrap().to_string()
}

#[test]
fn identity_exponent_values() {
    let out = qexp(&["exponent", "--family", "identity", "--sweep", "R:0:1:0.5"]);
    assert!(out.status.success());
    let r = rows(&stdout(&out));
    let e: Vec<f64> = r.iter().map(|r| f(r, "E")).collect();
    assert_eq!(e.len(), 3);
    for (got, want) in e.iter().zip([1.0, 0.5, 0.0]) {
        assert!((got - want).abs() < 1e-9);
    }
}

#[test]
fn depolarizing_surface_grid() {
    let out = qexp(&[
        "exponent",
        "--family",
        "depolarizing",
        "--sweep",
        "p:0:0.03:0.0015",
        "--sweep",
        "R:0:1:0.25",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("p,R,E,H_Qstar,active_branch\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 21 * 5);
    for row in &r {
        let (p, rate, e) = (f(row, "p"), f(row, "R"), f(row, "E"));
        let cap = 1.0 - qexp::exponent::h1(p);
        if rate >= cap {
            assert!(e.abs() < 1e-6);
        }
    }
    let root = qexp::exponent::h1_root().to_string();
    let out = qexp(&[
        "exponent",
        "--family",
        "depolarizing",
        "--set",
        &format!("p={root}"),
        "--sweep",
        "R:0:1:0.1",
    ]);
    for row in rows(&stdout(&out)) {
        assert!(f(&row, "E").abs() < 1e-6);
    }
}

#[test]
fn vacuous_theorem_bound_is_flagged() {
    let out = qexp(&[
        "exponent", "--family", "identity", "--set", "R=0.5", "--set", "n=10",
    ]);
    let r = rows(&stdout(&out));
    assert_eq!(r[0]["vacuous"], "true");
    assert!(f(&r[0], "fidelity_bound") < 0.0);
    let out = qexp(&[
        "exponent", "--family", "identity", "--set", "R=0.5", "--set", "n=100", "--set", "k=50",
    ]);
    let r = rows(&stdout(&out));
    assert_eq!(r[0]["vacuous"], "false");
}

#[test]
fn bounds_for_identity_and_depolarizing() {
    let r = rows(&stdout(&qexp(&["bounds", "--family", "identity"])));
    assert!((f(&r[0], "capacity_lb") - 1.0).abs() < 1e-12);
    assert!((f(&r[0], "rival_lb") - 1.0).abs() < 1e-9);
    assert!(f(&r[0], "p_prime").abs() < 1e-9);
    let r = rows(&stdout(&qexp(&[
        "bounds",
        "--family",
        "depolarizing",
        "--set",
        "p=0.1",
    ])));
    let want = 1.0 - qexp::exponent::h1(0.1);
    assert!((f(&r[0], "capacity_lb") - want).abs() < 1e-12);
    assert!((f(&r[0], "rival_lb") - want).abs() < 1e-9);
}

#[test]
fn amplitude_damping_curve_pair() {
    let out = qexp(&[
        "bounds",
        "--family",
        "amplitude-damping",
        "--sweep",
        "gamma:0:1:0.01",
    ]);
    assert!(out.status.success());
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 101);
    for row in &r {
        assert!(f(row, "capacity_lb") >= f(row, "rival_lb") - 1e-12);
        assert!(f(row, "damping_closed_form_diff") < 1e-10);
    }
}

#[test]
fn example_code_simulation() {
    let out = qexp(&[
        "simulate",
        "--stabilizer",
        &input("two_qubit_zz.stab"),
        "--family",
        "amplitude-damping",
        "--set",
        "gamma=0.3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 2);
    for row in &r {
        assert!((f(row, "F_min") - 0.7).abs() < 1e-6);
        assert!((f(row, "F_avg") - 0.85).abs() < 1e-6);
        assert!((f(row, "one_minus_rhs") - 0.775).abs() < 1e-12);
        assert_eq!(row["verdict"], "confirmed");
    }
}

#[test]
fn channel_file_input_matches_family() {
    let file = rows(&stdout(&qexp(&[
        "simulate",
        "--stabilizer",
        &input("two_qubit_zz.stab"),
        "--channel",
        &input("amplitude_damping_0.3.json"),
    ])));
    let fam = rows(&stdout(&qexp(&[
        "simulate",
        "--stabilizer",
        &input("two_qubit_zz.stab"),
        "--family",
        "amplitude-damping",
        "--set",
        "gamma=0.3",
    ])));
    for (a, b) in file.iter().zip(&fam) {
        assert!((f(a, "F_e") - f(b, "F_e")).abs() < 1e-12);
    }
}

#[test]
fn output_is_deterministic_across_jobs() {
    let args = |jobs: &'static str| {
        vec![
            "simulate",
            "--family",
            "amplitude-damping",
            "--sweep",
            "gamma:0.1:0.4:0.1",
            "--starts",
            "6",
            "--seed",
            "42",
            "--jobs",
            jobs,
        ]
    };
    let stab = input("two_qubit_zz.stab");
    let run = |jobs| {
        let mut a = args(jobs);
        a.extend(["--stabilizer", stab.as_str()]);
        qexp(&a).stdout
    };
    assert_eq!(run("1"), run("4"));
    let v1 = qexp(&["verify", "--suite", "gfsym", "--seed", "3"]).stdout;
    let v2 = qexp(&["verify", "--suite", "gfsym", "--seed", "3", "--jobs", "2"]).stdout;
    assert_eq!(v1, v2);
}

#[test]
fn verify_suites_pass() {
    let out = qexp(&["verify", "--suite", "gfsym"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("gfsym.witt_census,4,"));
    let out = qexp(&["verify", "--suite", "exponent"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("exponent.damping_closed_form,101,"));
}

#[test]
fn exit_codes() {
    // usage and parse errors
    assert_eq!(
        qexp(&["exponent", "--family", "identity", "--sweep", "R:1:0:0.1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qexp(&["exponent", "--family", "identity"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qexp(&["bounds", "--family", "identity", "--set", "gamma=0.1"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"d":2,"m":1,"kraus":[[[[1,0],[0,0]],[[0,0],[0.5,0]]]]}"#,
    )
    .unwrap();
    let out = qexp(&[
        "exponent",
        "--channel",
        bad.to_str().unwrap(),
        "--set",
        "R=0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("deviation"));
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(
        qexp(&["bounds", "--channel", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    // a seven-qubit code exceeds the dense simulation cap
    let stab = dir.path().join("big.stab");
    std::fs::write(&stab, "01010101010101\n").unwrap();
    let out = qexp(&[
        "simulate",
        "--stabilizer",
        stab.to_str().unwrap(),
        "--family",
        "identity",
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn manifest_records_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("e.csv");
    let channel = input("amplitude_damping_0.3.json");
    let out = qexp(&[
        "exponent",
        "--channel",
        &channel,
        "--sweep",
        "R:0:1:0.5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("e.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "exponent");
    let digest = manifest["inputs"][&channel].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert_eq!(
        std::fs::read_to_string(&out_path).unwrap().lines().count(),
        4
    );
}

#[test]
fn plot_scripts() {
    let out = qexp(&["plot-script", "--figure", "exponent", "--data", "fig1.csv"]);
    assert!(stdout(&out).contains("splot 'fig1.csv'"));
    let out = qexp(&["plot-script", "--figure", "bounds", "--data", "fig2.csv"]);
    assert!(stdout(&out).contains("using 1:3"));
}
