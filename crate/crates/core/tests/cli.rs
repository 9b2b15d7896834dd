use std::path::Path;
use std::time::Instant;

use qht_core::cli::{run_command, CURVE_HEADER, SWEEP_HEADER};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qht").chain(args.iter().copied());
    let code = run_command(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn simulate_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let (code, report, err) = run(&[
        "simulate",
        "--preset",
        "fig3",
        "--t2",
        "0.6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(report.contains("wrote"));

    let got = std::fs::read_to_string(&out).unwrap();
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/simulate_fig3_t2_0.6.csv");
    let golden = std::fs::read_to_string(golden_path).unwrap();
    assert_eq!(got.lines().next(), Some(CURVE_HEADER));
    assert_eq!(got.lines().count(), golden.lines().count());
    // Values must agree to rounding; byte equality is checked per platform
    // by the repeat-run test below.
    for (g, w) in rows(&got).iter().zip(rows(&golden)) {
        for (a, b) in g.iter().zip(&w) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let (code, _, err) = run(&[
            "simulate",
            "--preset",
            "fig4",
            "--bc",
            "0.75",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn conditions_on_isotropic_noise() {
    let (code, out, err) = run(&["conditions", "--preset", "fig3", "--t2", "5.5"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("cond1 = false"), "{out}");
    assert!(out.contains("cond2 = false"), "{out}");
}

#[test]
fn conditions_on_anisotropic_noise() {
    let (code, out, _) = run(&["conditions", "--preset", "fig3", "--t2", "0.6"]);
    assert_eq!(code, 0);
    assert!(out.contains("cond2 = true"), "{out}");
}

#[test]
fn unphysical_noise_is_a_config_error() {
    let (code, out, err) = run(&["simulate", "--preset", "fig3", "--t2", "12"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("2·T1"), "{err}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[scenario]\npreset = \"fig3\"\n[noise]\nt2 = 0.6\n[time]\npoints = 11\nhorizon_s = 5\n",
    )
    .unwrap();
    let (code, out, err) = run(&["simulate", "--config", cfg.to_str().unwrap(), "--points", "21"]);
    assert_eq!(code, 0, "{err}");
    let r = rows(&out);
    assert_eq!(r.len(), 21);
    assert_eq!(r.last().unwrap()[0], 5.0);
}

#[test]
fn config_file_errors_are_listed_together() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[scenario]\nq0 = 0.9\nq1 = 0.9\n[time]\nhorizon_s = 0\n").unwrap();
    let (code, _, err) = run(&["eta", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("priors") && err.contains("horizon"), "{err}");
}

#[test]
fn eta_reports_exceedance() {
    let (code, out, _) = run(&["eta", "--preset", "fig4", "--t2", "1", "--bc", "0.75"]);
    assert_eq!(code, 0);
    assert!(out.contains("exceeds_unitary_max = true"), "{out}");
}

#[test]
fn sweep_writes_schema_and_flags_bad_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let (code, _, err) = run(&[
        "sweep",
        "--param",
        "bc",
        "--values",
        "0,0.75,-1",
        "--preset",
        "fig4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"), "{err}");
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    assert_eq!(lines.len(), 4);
    assert!(lines[2].contains(",true,"));
    assert!(lines[3].contains("NaN"));
}

#[test]
fn ratio_sweep_hits_the_enhancement_ceiling() {
    let (code, out, _) = run(&["sweep", "--param", "ratio", "--values", "3"]);
    assert_eq!(code, 0);
    let row = out.lines().nth(1).unwrap();
    let eta: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((eta - 0.1722).abs() < 5e-4, "{eta}");
}

#[test]
fn t2_sweep_defaults_to_three_reference_values() {
    let (code, out, _) = run(&["sweep", "--param", "t2"]);
    assert_eq!(code, 0);
    let exceeds: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(exceeds, ["false", "true", "true"]);
}

#[test]
fn chernoff_writes_its_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ch.csv");
    let (code, _, _) = run(&["chernoff", "--points", "30", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t_s,s_star,q_star,exponent\n"));
    let q: Vec<f64> = rows(&text).iter().map(|r| r[2]).collect();
    assert!(q.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)));
    assert!(q[5] < 1.0);
}

#[test]
fn figure_bundles_are_complete_and_fast() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, files) in [
        (
            "fig3",
            &[
                "fig3_t2_5.4.csv",
                "fig3_t2_1.0.csv",
                "fig3_t2_0.6.csv",
                "fig3_t2_11.0.csv",
                "fig3_summary.csv",
                "fig3_inset_ratio.csv",
            ][..],
        ),
        (
            "fig4",
            &[
                "fig4_t2_1.0_bc_0.0.csv",
                "fig4_t2_1.0_bc_0.75.csv",
                "fig4_t2_7.4_bc_0.75.csv",
                "fig4_summary.csv",
                "fig4_inset_bc.csv",
            ][..],
        ),
    ] {
        let start = Instant::now();
        let (code, _, err) = run(&[cmd, "--out-dir", dir.path().to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        assert!(start.elapsed().as_secs() < 60);
        for f in files {
            let text = std::fs::read_to_string(dir.path().join(f)).unwrap();
            assert!(text.lines().count() > 2, "{f}");
        }
    }
    let summary = std::fs::read_to_string(dir.path().join("fig4_summary.csv")).unwrap();
    assert!(summary.starts_with("t2_s,bc_nt,eta,"));
}

#[test]
fn no_temporary_files_are_left_behind() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let (code, _, _) = run(&["simulate", "--points", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, ["curve.csv"]);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let (code, _, err) = run(&["simulate", "--points", "4", "--out", "/nonexistent-dir/curve.csv"]);
    assert_eq!(code, 1, "{err}");
}
