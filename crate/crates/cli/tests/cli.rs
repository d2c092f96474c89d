//! End-to-end tests of the `eepc` binary: determinism of the CSV bodies,
//! file schemas, validation errors, and the verify battery.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

static DIR_COUNTER: AtomicUsize = AtomicUsize::new(0);

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "eepc-cli-test-{}-{}-{}",
        std::process::id(),
        tag,
        DIR_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn eepc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eepc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn short_burgers_config(out_dir: &Path) -> String {
    format!(
        r#"
system = "burgers"

[grid]
length = 3.141592653589793
dx = 0.07853981633974483

[damping]
case = "constant-unequal"
gamma = 0.25
spread = 0.1
seed = 11

[time]
t_final = 0.18
dt = 0.009

[scheme]
s = 2

[output]
directory = "{}"
stride = 5
"#,
        out_dir.display()
    )
}

#[test]
fn run_is_deterministic_given_config_and_seed() {
    let base = scratch_dir("determinism");
    let out_a = base.join("a");
    let out_b = base.join("b");
    let config_path = base.join("exp.toml");
    fs::write(&config_path, short_burgers_config(&base.join("unused"))).unwrap();

    for out in [&out_a, &out_b] {
        let output = eepc(&[
            "run",
            config_path.to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert!(
            output.status.success(),
            "{}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
    for file in ["solution.csv", "invariants.csv", "residuals.csv"] {
        let a = fs::read(out_a.join(file)).unwrap();
        let b = fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn run_outputs_have_expected_shape_and_decay() {
    let base = scratch_dir("shape");
    let out = base.join("out");
    let config_path = base.join("exp.toml");
    fs::write(&config_path, short_burgers_config(&out)).unwrap();
    let output = eepc(&["run", config_path.to_str().unwrap()]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );

    // 20 steps, stride 5 → snapshots at 0,5,10,15,20
    let solution = fs::read_to_string(out.join("solution.csv")).unwrap();
    let lines: Vec<&str> = solution.lines().collect();
    assert_eq!(lines.len(), 1 + 5);
    assert!(lines[0].starts_with("t,u1,"));
    assert_eq!(lines[0].split(',').count(), 81);

    // invariants at every step, H and M strictly decreasing
    let invariants = fs::read_to_string(out.join("invariants.csv")).unwrap();
    let lines: Vec<&str> = invariants.lines().collect();
    assert_eq!(lines[0], "t,H,M");
    assert_eq!(lines.len(), 1 + 21);
    let columns: Vec<Vec<f64>> = lines[1..]
        .iter()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    for pair in columns.windows(2) {
        assert!(pair[1][1] < pair[0][1], "H must decay");
        assert!(pair[1][2] < pair[0][2], "M must decay");
    }

    // residuals: unequal damping → averaged mode for both invariants
    let residuals = fs::read_to_string(out.join("residuals.csv")).unwrap();
    let lines: Vec<&str> = residuals.lines().collect();
    assert_eq!(lines[0], "t,R_H(averaged-gamma),R_M(averaged-gamma)");
    assert_eq!(lines.len(), 1 + 20);

    let meta = fs::read_to_string(out.join("meta.toml")).unwrap();
    assert!(meta.contains("command = \"run\""));
    assert!(meta.contains("seed = 11"));
    assert!(meta.contains("n1 = 80"));
}

#[test]
fn known_eta_residual_column_is_machine_small_for_equal_damping() {
    let base = scratch_dir("known-eta");
    let out = base.join("out");
    let config = format!(
        r#"
system = "burgers"

[grid]
length = 3.141592653589793
dx = 0.07853981633974483

[damping]
case = "constant-equal"
gamma = 0.25

[time]
t_final = 0.45
dt = 0.009

[scheme]
s = 3

[output]
directory = "{}"
"#,
        out.display()
    );
    let config_path = base.join("exp.toml");
    fs::write(&config_path, config).unwrap();
    let output = eepc(&["run", config_path.to_str().unwrap()]);
    assert!(output.status.success());

    let residuals = fs::read_to_string(out.join("residuals.csv")).unwrap();
    let lines: Vec<&str> = residuals.lines().collect();
    assert_eq!(lines[0], "t,R_H(averaged-gamma),R_M(known-eta)");
    for line in &lines[1..] {
        let mass_residual: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(mass_residual.abs() <= 1e-10, "R_M = {mass_residual}");
    }
}

#[test]
fn zero_horizon_gives_single_snapshot_and_empty_residuals() {
    let base = scratch_dir("zero-horizon");
    let out = base.join("out");
    let config = short_burgers_config(&out).replace("t_final = 0.18", "t_final = 0.0");
    let config_path = base.join("exp.toml");
    fs::write(&config_path, config).unwrap();
    let output = eepc(&["run", config_path.to_str().unwrap()]);
    assert!(output.status.success());

    let solution = fs::read_to_string(out.join("solution.csv")).unwrap();
    assert_eq!(solution.lines().count(), 2);
    let residuals = fs::read_to_string(out.join("residuals.csv")).unwrap();
    assert_eq!(residuals.lines().count(), 1, "header only");
}

#[test]
fn unknown_config_key_fails_with_nonzero_exit() {
    let base = scratch_dir("unknown-key");
    let config = short_burgers_config(&base.join("out")).replace("[time]", "[time]\nmispelled = 3");
    let config_path = base.join("exp.toml");
    fs::write(&config_path, config).unwrap();
    let output = eepc(&["run", config_path.to_str().unwrap()]);
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("config error"), "{stderr}");
}

#[test]
fn order_linear_test_recovers_all_four_orders() {
    let base = scratch_dir("order-linear");
    let out = base.join("out");
    let config = short_burgers_config(&out)
        .replace("t_final = 0.18", "t_final = 1.0")
        .replace("dt = 0.009", "dt = 0.1");
    let config_path = base.join("exp.toml");
    fs::write(&config_path, config).unwrap();
    let output = eepc(&[
        "order",
        config_path.to_str().unwrap(),
        "--dts",
        "0.1,0.05,0.025,0.0125",
        "--linear-test",
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );

    let order = fs::read_to_string(out.join("order.csv")).unwrap();
    assert_eq!(order.lines().count(), 1 + 16);
    assert_eq!(order.lines().next().unwrap(), "s,dt,error,seconds");

    let slopes = fs::read_to_string(out.join("slopes.csv")).unwrap();
    let fitted: Vec<(usize, f64)> = slopes
        .lines()
        .skip(1)
        .map(|l| {
            let mut parts = l.split(',');
            (
                parts.next().unwrap().parse().unwrap(),
                parts.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(fitted.len(), 4);
    for (s, slope) in fitted {
        let expected = 2.0 * s as f64;
        let tolerance = if s == 4 { 0.5 } else { 0.3 };
        assert!((slope - expected).abs() <= tolerance, "s={s} slope={slope}");
    }
}

#[test]
fn order_with_single_dt_warns_and_writes_empty_slopes() {
    let base = scratch_dir("order-single");
    let out = base.join("out");
    let config = short_burgers_config(&out)
        .replace("t_final = 0.18", "t_final = 1.0")
        .replace("dt = 0.009", "dt = 0.1");
    let config_path = base.join("exp.toml");
    fs::write(&config_path, config).unwrap();
    let output = eepc(&[
        "order",
        config_path.to_str().unwrap(),
        "--dts",
        "0.1",
        "--linear-test",
    ]);
    assert!(output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("warning"), "{stderr}");
    let slopes = fs::read_to_string(out.join("slopes.csv")).unwrap();
    assert_eq!(slopes.lines().count(), 1, "header only");
}

#[test]
fn order_on_burgers_against_fine_reference() {
    let base = scratch_dir("order-burgers");
    let out = base.join("out");
    let config = short_burgers_config(&out).replace("t_final = 0.18", "t_final = 0.36");
    let config_path = base.join("exp.toml");
    fs::write(&config_path, config).unwrap();
    let output = eepc(&[
        "order",
        config_path.to_str().unwrap(),
        "--dts",
        "0.036,0.018",
        "--ref-dt",
        "0.0045",
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let order = fs::read_to_string(out.join("order.csv")).unwrap();
    let rows: Vec<Vec<String>> = order
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    // halving the step shrinks the error for every s
    for s in 1..=4 {
        let errs: Vec<f64> = rows
            .iter()
            .filter(|r| r[0] == s.to_string())
            .map(|r| r[2].parse().unwrap())
            .collect();
        assert_eq!(errs.len(), 2);
        assert!(errs[1] < errs[0], "s={s}: {errs:?}");
    }
    // with damping switched on, the midpoint-referenced transform
    // contributes a method-independent second-order term that dominates
    // here, so every fitted slope sits near 2
    let slopes = fs::read_to_string(out.join("slopes.csv")).unwrap();
    let fitted: Vec<f64> = slopes
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(fitted.len(), 4);
    for slope in &fitted {
        assert!((slope - 2.0).abs() < 0.5, "slopes {fitted:?}");
    }
}

#[test]
fn ref_dt_must_be_fine_enough() {
    let base = scratch_dir("ref-dt");
    let out = base.join("out");
    let config = short_burgers_config(&out).replace("t_final = 0.18", "t_final = 0.36");
    let config_path = base.join("exp.toml");
    fs::write(&config_path, config).unwrap();
    let output = eepc(&[
        "order",
        config_path.to_str().unwrap(),
        "--dts",
        "0.036,0.018",
        "--ref-dt",
        "0.018",
    ]);
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("--ref-dt"), "{stderr}");
}

#[test]
fn overrides_are_applied_and_echoed_in_meta() {
    let base = scratch_dir("overrides");
    let out = base.join("out");
    let config_path = base.join("exp.toml");
    fs::write(&config_path, short_burgers_config(&base.join("unused"))).unwrap();
    let output = eepc(&[
        "run",
        config_path.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--seed",
        "99",
        "--quadrature-q",
        "10",
        "--tol",
        "1e-11",
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let meta = fs::read_to_string(out.join("meta.toml")).unwrap();
    assert!(meta.contains("seed = 99"), "{meta}");
    assert!(meta.contains("quadrature = 10"), "{meta}");
    // toml renders the float in decimal form
    assert!(
        meta.contains("tol = 0.00000000001") || meta.contains("tol = 1e-11"),
        "{meta}"
    );
}

#[test]
fn seed_override_warns_when_damping_is_equal() {
    let base = scratch_dir("seed-warn");
    let out = base.join("out");
    let config = short_burgers_config(&out)
        .replace("case = \"constant-unequal\"", "case = \"constant-equal\"")
        .replace("spread = 0.1\n", "")
        .replace("seed = 11\n", "");
    let config_path = base.join("exp.toml");
    fs::write(&config_path, config).unwrap();
    let output = eepc(&["run", config_path.to_str().unwrap(), "--seed", "4"]);
    assert!(output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("--seed ignored"), "{stderr}");
}

#[test]
fn non_convergence_reports_the_failing_step() {
    let base = scratch_dir("non-convergence");
    let out = base.join("out");
    let config =
        short_burgers_config(&out).replace("[scheme]\ns = 2", "[scheme]\ns = 2\nmax_iter = 1");
    let config_path = base.join("exp.toml");
    fs::write(&config_path, config).unwrap();
    let output = eepc(&["run", config_path.to_str().unwrap()]);
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("step 0 failed"), "{stderr}");
    assert!(stderr.contains("did not converge"), "{stderr}");
}

#[test]
fn verify_passes_on_fresh_build() {
    let output = eepc(&["verify"]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("PASS"));
    assert!(!stdout.contains("FAIL "));
    assert!(stdout.contains("order conditions"));
    assert!(stdout.contains("symmetry identity"));
}

#[test]
fn preset_configs_parse_and_validate() {
    let presets = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(presets).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let base = scratch_dir("preset");
            let out = base.join("out");
            // zero-horizon dry parse+build via the binary: rewrite t_final
            let text = fs::read_to_string(&path).unwrap();
            let text = regex_replace_t_final(&text);
            let config_path = base.join("exp.toml");
            fs::write(&config_path, text).unwrap();
            let output = eepc(&[
                "run",
                config_path.to_str().unwrap(),
                "--out-dir",
                out.to_str().unwrap(),
            ]);
            assert!(
                output.status.success(),
                "{}: {}",
                path.display(),
                String::from_utf8_lossy(&output.stderr)
            );
            count += 1;
        }
    }
    assert!(count >= 8, "expected the preset set, found {count}");
}

/// Swap the preset horizon for a zero-length run so the parse/build/IO
/// path is exercised without integrating the full figure horizon.
fn regex_replace_t_final(text: &str) -> String {
    text.lines()
        .map(|line| {
            if line.trim_start().starts_with("t_final") {
                "t_final = 0.0".to_string()
            } else {
                line.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}
