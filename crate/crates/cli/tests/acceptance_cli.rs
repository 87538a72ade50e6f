//! CLI acceptance: exit codes, report determinism, and round-tripping of
//! synthesized fields.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phaseline"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

/// Copies a bundled field into a scratch directory so synthesized outputs
/// land there too.
fn stage(dir: &Path, name: &str) -> PathBuf {
    let src = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fields")
        .join(name);
    let dst = dir.join(name);
    std::fs::copy(&src, &dst).expect("field file copies");
    dst
}

#[test]
fn exit_codes_follow_the_map() {
    let dir = tempfile::tempdir().unwrap();
    let sin = stage(dir.path(), "sin2pi.vf");
    let combo = stage(dir.path(), "combination.vf");
    let cos_path = dir.path().join("cos.vf");
    std::fs::write(&cos_path, "cos(2*pi*x)\n").unwrap();

    // 0: success regardless of verdict.
    assert_eq!(
        run(&["analyze", sin.to_str().unwrap()]).status.code(),
        Some(0)
    );

    // 2: usage error.
    assert_eq!(
        run(&["analyze", sin.to_str().unwrap(), "--no-such-flag"])
            .status
            .code(),
        Some(2)
    );

    // 3: non-C1 input without the override; 0 with it.
    assert_eq!(
        run(&["analyze", combo.to_str().unwrap()]).status.code(),
        Some(3)
    );
    assert_eq!(
        run(&["analyze", combo.to_str().unwrap(), "--allow-nonsmooth"])
            .status
            .code(),
        Some(0)
    );

    // 3: unparsable input.
    let broken = dir.path().join("broken.vf");
    std::fs::write(&broken, "sin(2*x\n").unwrap();
    assert_eq!(
        run(&["analyze", broken.to_str().unwrap()]).status.code(),
        Some(3)
    );

    // 4: destabilize does not apply to a stable field.
    assert_eq!(
        run(&[
            "perturb",
            sin.to_str().unwrap(),
            "--mode",
            "destabilize",
            "--epsilon",
            "1e-3"
        ])
        .status
        .code(),
        Some(4)
    );

    // 5: inequivalent pair.
    assert_eq!(
        run(&[
            "equiv",
            sin.to_str().unwrap(),
            cos_path.to_str().unwrap(),
            "--h",
            "x"
        ])
        .status
        .code(),
        Some(5)
    );
    // 0: the quarter translation certifies the same pair.
    assert_eq!(
        run(&[
            "equiv",
            sin.to_str().unwrap(),
            cos_path.to_str().unwrap(),
            "--h",
            "x - 1/4"
        ])
        .status
        .code(),
        Some(0)
    );

    // 2: unwritable output.
    assert_eq!(
        run(&[
            "sample",
            sin.to_str().unwrap(),
            "--n",
            "10",
            "--out",
            "/nonexistent-dir/out.csv"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let combo = stage(dir.path(), "combination.vf");
    for json in [false, true] {
        let mut args = vec![
            "analyze".to_string(),
            combo.to_str().unwrap().to_string(),
            "--allow-nonsmooth".to_string(),
        ];
        if json {
            args.push("--json".to_string());
        }
        let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(stdout(&a), stdout(&b), "json={json}");
    }
}

#[test]
fn synthesized_fields_roundtrip_to_the_recorded_verdict() {
    let dir = tempfile::tempdir().unwrap();
    for (name, mode, needs_override) in [
        ("one_minus_cos.vf", "destabilize", false),
        ("sin_cubed.vf", "destabilize", false),
        ("zero.vf", "destabilize", false),
        ("combination.vf", "stabilize", true),
        ("one_minus_cos.vf", "stabilize", false),
    ] {
        let input = stage(dir.path(), name);
        let out = dir.path().join(format!("{mode}-{name}"));
        let mut args = vec![
            "perturb".to_string(),
            input.to_str().unwrap().to_string(),
            "--mode".to_string(),
            mode.to_string(),
            "--epsilon".to_string(),
            "1e-2".to_string(),
            "--json".to_string(),
            "--out".to_string(),
            out.to_str().unwrap().to_string(),
        ];
        if needs_override {
            args.push("--allow-nonsmooth".to_string());
        }
        let argrefs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let first = run(&argrefs);
        assert_eq!(first.status.code(), Some(0), "{name} {mode}: {first:?}");
        let report: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
        let recorded_stable = report["verdict"]["stable"].as_bool().unwrap();
        let g_text_first = std::fs::read_to_string(&out).unwrap();

        // Identical invocation, identical bytes.
        let second = run(&argrefs);
        assert_eq!(stdout(&first), stdout(&second), "{name} {mode}");
        assert_eq!(g_text_first, std::fs::read_to_string(&out).unwrap());

        // The emitted field re-parses and re-analyzes to the same verdict.
        let mut analyze = vec![
            "analyze".to_string(),
            out.to_str().unwrap().to_string(),
            "--json".to_string(),
        ];
        if needs_override {
            analyze.push("--allow-nonsmooth".to_string());
        }
        let areport = run(&analyze.iter().map(|s| s.as_str()).collect::<Vec<_>>());
        assert_eq!(areport.status.code(), Some(0), "{name} {mode} reanalysis");
        let reanalysis: serde_json::Value = serde_json::from_str(&stdout(&areport)).unwrap();
        assert_eq!(
            reanalysis["verdict"]["stable"].as_bool().unwrap(),
            recorded_stable,
            "{name} {mode}: verdict drifted on round-trip"
        );
    }
    println!("acceptance 10: pass - CLI reports are deterministic and outputs round-trip");
}

#[test]
fn csv_outputs_are_shaped_right() {
    let dir = tempfile::tempdir().unwrap();
    let sin = stage(dir.path(), "sin2pi.vf");

    let sample_out = dir.path().join("samples.csv");
    let st = run(&[
        "sample",
        sin.to_str().unwrap(),
        "--n",
        "100",
        "--out",
        sample_out.to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(0));
    let csv = std::fs::read_to_string(&sample_out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,f,fprime"));
    assert_eq!(lines.count(), 100);

    // Sampling a bump field reproduces its shape: peak e⁻¹ at the center,
    // zero outside the support.
    let bump_path = dir.path().join("bump.vf");
    std::fs::write(&bump_path, "bump(x; 0.5, 0.1)\n").unwrap();
    let bump_out = dir.path().join("bump.csv");
    let st = run(&[
        "sample",
        bump_path.to_str().unwrap(),
        "--n",
        "1000",
        "--out",
        bump_out.to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(0));
    let csv = std::fs::read_to_string(&bump_out).unwrap();
    let rows: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            let x: f64 = it.next().unwrap().parse().unwrap();
            let f: f64 = it.next().unwrap().parse().unwrap();
            (x, f)
        })
        .collect();
    assert_eq!(rows.len(), 1000);
    let peak = rows
        .iter()
        .cloned()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    assert!((peak.0 - 0.5).abs() < 1e-9 && (peak.1 - 0.36787944117144233).abs() < 1e-12);
    assert!(rows.iter().all(|(x, f)| if !(0.4..0.6).contains(x) {
        *f == 0.0
    } else {
        true
    }));

    let flow_out = dir.path().join("orbit.csv");
    let st = run(&[
        "flow",
        sin.to_str().unwrap(),
        "--x0",
        "0.25",
        "--tau",
        "0.5",
        "--steps",
        "6",
        "--out",
        flow_out.to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(0));
    let csv = std::fs::read_to_string(&flow_out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,t,position,lift"));
    assert_eq!(lines.count(), 7);
}

#[test]
fn breakpoint_files_certify_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let sin = stage(dir.path(), "sin2pi.vf");
    let cos_path = dir.path().join("cos.vf");
    std::fs::write(&cos_path, "cos(2*pi*x)\n").unwrap();
    let bp = dir.path().join("shift.bp");
    std::fs::write(
        &bp,
        "# quarter-turn translation\n0 0.75\n0.25 0\n0.5 0.25\n0.75 0.5\n",
    )
    .unwrap();
    let st = run(&[
        "equiv",
        sin.to_str().unwrap(),
        cos_path.to_str().unwrap(),
        "--h-breakpoints",
        bp.to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(0), "{}", stdout(&st));
}
