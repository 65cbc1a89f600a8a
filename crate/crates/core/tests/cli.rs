use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;

fn squeezelink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squeezelink"))
        .args(args)
        .env_remove("SQUEEZELINK_PRESET_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and data lines of a CSV, metadata dropped.
fn body(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

/// The metadata block turned back into a config file.
fn metadata_as_config(text: &str, path: &Path) {
    let toml: String = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .map(|l| format!("{l}\n"))
        .collect();
    std::fs::write(path, toml).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(code(&squeezelink(&["duan"])), 0);
    assert_eq!(code(&squeezelink(&["--version"])), 0);
    assert_eq!(code(&squeezelink(&["duan", "--regime", "sideways"])), 2);
    assert_eq!(code(&squeezelink(&["sweep", "--figure", "fig7"])), 2);
    assert_eq!(
        code(&squeezelink(&["sweep", "--axis", "bath.r", "--range", "1:0:0"])),
        2
    );
    assert_eq!(code(&squeezelink(&["selfcheck", "--tolerance", "1e-15"])), 1);
}

#[test]
fn bad_config_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    for text in [
        "[unit1\n",
        "[warp]\nx = 1\n",
        "[unit1]\npower = 3\n",
        "[unit1]\npower_mw = \"ten\"\n",
        "[unit1]\npower_mw = -1\n",
        "[bath]\nr = -0.5\n",
    ] {
        std::fs::write(&cfg, text).unwrap();
        let o = squeezelink(&["duan", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{text:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn threshold_without_squeezing_exits_3() {
    let o = squeezelink(&["threshold", "--preset", "fig2-text", "--config", "/dev/null"]);
    assert_eq!(code(&o), 0);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("r0.toml");
    std::fs::write(&cfg, "[bath]\nr = 0\n").unwrap();
    assert_eq!(code(&squeezelink(&["threshold", "--config", cfg.to_str().unwrap()])), 3);
}

#[test]
fn strong_drive_warns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.toml");
    std::fs::write(&cfg, "[units]\npower_w = 100\n").unwrap();
    let o = squeezelink(&["duan", "--config", cfg.to_str().unwrap(), "--regime", "oracle"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("rotating-wave approximation doubtful"));
    let quiet = squeezelink(&["duan", "--regime", "oracle"]);
    assert!(quiet.stderr.is_empty());
}

#[test]
fn figure_sweep_is_deterministic() {
    let a = squeezelink(&["sweep", "--figure", "fig2"]);
    let b = squeezelink(&["sweep", "--figure", "fig2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.contains(&b'\r'));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.csv");
    let o = squeezelink(&["sweep", "--figure", "fig4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert_eq!(
        std::fs::read(&path).unwrap(),
        squeezelink(&["sweep", "--figure", "fig4"]).stdout
    );
}

#[test]
fn metadata_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("meta.toml");
    let runs: [&[&str]; 4] = [
        &["sweep", "--figure", "fig5b"],
        &[
            "sweep",
            "--axis",
            "unit2.power_mw",
            "--range",
            "1:20:7",
            "--regime",
            "oracle",
        ],
        &["duan", "--preset", "fig6", "--regime", "nonadiabatic"],
        &["threshold", "--preset", "fig3"],
    ];
    for args in runs {
        let first = squeezelink(args);
        assert_eq!(code(&first), 0, "{args:?}");
        metadata_as_config(&stdout(&first), &cfg);
        let again = squeezelink(&[args[0], "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&again), 0, "{args:?}: {}", String::from_utf8_lossy(&again.stderr));
        assert_eq!(stdout(&first), stdout(&again), "{args:?}");
    }
}

#[test]
fn figure_columns() {
    let fig4 = stdout(&squeezelink(&["sweep", "--figure", "fig4"]));
    let rows = body(&fig4);
    assert_eq!(rows[0], "cooperativity,total[n_th=1],total[n_th=5],total[n_th=10]");
    assert_eq!(rows.len(), 1 + 201);

    let fig9 = stdout(&squeezelink(&["sweep", "--figure", "fig9"]));
    assert_eq!(body(&fig9)[0].split(',').count(), 1 + 4);
}

#[test]
fn squeezing_scan_decreases() {
    let o = squeezelink(&["sweep", "--axis", "bath.r", "--range", "0:3:301"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows = body(&text);
    assert!(rows[0].starts_with("bath.r,status,total,"));
    let totals: Vec<f64> = rows[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(totals.len(), 301);
    assert!(totals.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn selfcheck_subset_and_summary() {
    let o = squeezelink(&["selfcheck", "--only", "threshold,uncertainty"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("check=")).count(), 2);
    assert!(text.ends_with("summary passed=2 failed=0\n"));

    let all = squeezelink(&["selfcheck"]);
    assert_eq!(code(&all), 0, "{}", stdout(&all));
}

#[test]
fn preset_directory_overrides_builtins() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fig3.toml"), "[units]\npower_mw = 2\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_squeezelink"))
        .args(["duan", "--preset", "fig3"])
        .env("SQUEEZELINK_PRESET_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("power_w = 2e-3"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Whatever the file holds, the binary either runs or reports a usage
    /// error; it never panics.
    #[test]
    fn arbitrary_config_never_panics(text in "(\\[(unit1|unit2|bath|reduced|sweep|units)\\]\n)?([a-z_]{1,14} = [-0-9.e\"a-z]{0,8}\n){0,3}") {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        std::fs::write(&cfg, &text).unwrap();
        let o = squeezelink(&["duan", "--config", cfg.to_str().unwrap()]);
        let c = code(&o);
        prop_assert!(c == 0 || c == 2 || c == 3, "exit {} for {:?}", c, text);
        if c != 0 {
            prop_assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:") || c == 3);
        }
    }
}
