use std::path::Path;
use std::process::{Command, Output};

use elaa_isac::runner::{case_grid, load_scenario, tradeoff_output, tradeoff_sweep, Scenario};

const BIN: &str = env!("CARGO_BIN_EXE_elaa-isac-sim");

/// Small arrays so the tradeoff runs in well under a second.
const SMALL: &str = r#"
seed = 11
carrier_frequencies_hz = [3.5e9, 7.8e9, 15e9]
side_counts = [6, 8, 10]
desk_max_antennas = 64
mrt_frequency_hz = 7.8e9
rho_start = 0.2
rho_stop = 0.8
rho_step = 0.3
trials = 2000
fig3a_max_side_count = 5
fig3b_points = 20
fig4_points = 50
fig5_points = 5
fig5_max_range_m = 20.0
"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn unknown_experiment_exits_2() {
    let out = run(&["fig9", "--config", "config/default.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig9"));
}

#[test]
fn bad_config_exits_2_and_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p_fa = 2.0\n");
    let out = run(&["fig3a", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p_fa"));

    let cfg = write_config(dir.path(), "no_such_key = 1\n");
    assert_eq!(run(&["fig3a", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(run(&["fig3a", "--config", "/nonexistent.toml"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = run(&["fig3a", "--config", &cfg, "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn figures_write_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    for exp in ["fig3a", "fig3b", "fig4", "fig5"] {
        let out = run(&["--svg", exp, "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{exp}: {}", String::from_utf8_lossy(&out.stderr));
        let csv = std::fs::read_to_string(out_dir.join(format!("{exp}.csv"))).unwrap();
        assert!(csv.lines().count() > 1);
        assert!(std::fs::read_to_string(out_dir.join(format!("{exp}.svg"))).unwrap().starts_with("<svg"));
    }
}

#[test]
fn tradeoff_cli_is_deterministic_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let read = |sub: &str, seed: &str| {
        let d = dir.path().join(sub);
        let out = run(&["tradeoff", "--config", &cfg, "--seed", seed, "--out", d.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(d.join("tradeoff.csv")).unwrap()
    };
    let a = read("a", "5");
    assert_eq!(a, read("b", "5"));
    assert_ne!(a, read("c", "6"));
}

#[test]
fn manifest_marks_large_cases_skipped() {
    let s = Scenario::from_toml_str(SMALL).unwrap();
    let grid = case_grid(&s, false).unwrap();
    let ids: Vec<&str> = grid.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, ["K4-N36", "K4-N64", "K4-N100", "K6-N36", "K6-N64", "K6-N100", "MRT-NF-K4-N64", "MRT-FF-K4-N64"]);
    assert!(grid.iter().all(|c| c.skipped.is_some() == (c.n_antennas() > 64)));
    assert!(case_grid(&s, true).unwrap().iter().all(|c| c.skipped.is_none()));

    let curve = tradeoff_sweep(&s, false).unwrap();
    let out = tradeoff_output(&curve);
    let manifest = &out.tables[2];
    let status = manifest.column("status").unwrap();
    assert_eq!(status.iter().filter(|v| v.starts_with("skipped")).count(), 2);
    // Three ρ values per weighted case, one row per MRT case.
    assert_eq!(curve.rows.len(), 4 * 3 + 2);
    let rho = out.tables[0].column("rho").unwrap();
    assert_eq!(rho.iter().filter(|v| v.is_empty()).count(), 2);
}

#[test]
fn shipped_config_loads() {
    assert_eq!(load_scenario(Path::new("config/default.toml")).unwrap(), Scenario::default());
}
