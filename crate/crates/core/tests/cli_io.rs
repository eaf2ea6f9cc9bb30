use std::fs;
use std::path::Path;
use std::process::Command;

use coalition_ne::commands::{
    apply_overrides, cmd_analyze, cmd_bench, cmd_run, cmd_sweep, cmd_validate, CommandError, Overrides, OUTPUT_ENV,
    SWEEP_HEADER, TRAJECTORY_HEADER,
};
use coalition_ne::config::{load_config, parse_config, ConfigError, RunConfig};

const BIN: &str = env!("CARGO_BIN_EXE_coalition-ne");

fn configs_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/configs"))
}

const SMALL: &str = r#"
[game]
kind = "custom"

[[game.coalitions]]
size = 3
bounds = [-2.0, 2.0]
curvature = 1.5
target = [0.5, -0.5, 1.0]
coupling = 0.1

[[game.coalitions]]
size = 2
bounds = [-2.0, 2.0]
curvature = 1.0
target = [0.0, 0.25]

[graph]
kind = "ring"
self_weight = 0.5

[params]
alpha = 0.05
max_iters = 40
seeds = [3, 4]

[analysis]
lipschitz_samples = 50
chi_samples = 50
alpha_grid = 10
"#;

fn small() -> RunConfig {
    parse_config(SMALL, "small").unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}

fn assert_metadata(dir: &Path, command: &str) {
    let text = fs::read_to_string(dir.join("metadata.toml")).expect("metadata.toml present");
    let value: toml::Table = text.parse().unwrap();
    assert_eq!(value["command"].as_str(), Some(command));
    assert!(value["rng_algorithm"].as_str().unwrap().contains("ChaCha20"));
    assert!(value.contains_key("version"));
    let cfg = toml::to_string(value["config"].as_table().unwrap()).unwrap();
    parse_config(&cfg, "metadata").expect("embedded config parses back");
}

#[test]
fn shipped_configs_load() {
    for name in ["cournot.toml", "custom_quadratic.toml", "broken_graph.toml"] {
        load_config(configs_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn parse_error_names_line_and_field() {
    let text = "[game]\nkind = \"cournot\"\n[graph]\nkind = \"complete\"\n[params]\nalpha = 0.1\nmax_iters = 5\nstep = 3\n";
    match parse_config(text, "inline") {
        Err(ConfigError::Parse { line, field, .. }) => {
            assert_eq!(line, 8);
            assert_eq!(field.as_deref(), Some("step"));
        }
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn validation_error_lists_every_violation() {
    let text = SMALL
        .replace("alpha = 0.05", "alpha = -0.05")
        .replace("max_iters = 40", "max_iters = 40\nmu0 = 0.0")
        .replace("self_weight = 0.5", "self_weight = 1.5");
    match parse_config(&text, "inline") {
        Err(ConfigError::Validation(v)) => {
            assert!(v.len() >= 3, "{v:?}");
            for key in ["alpha", "mu0", "self_weight"] {
                assert!(v.iter().any(|m| m.contains(key)), "no violation mentions {key}: {v:?}");
            }
        }
        other => panic!("expected validation error, got {other:?}"),
    }
}

#[test]
fn validate_reports_each_graph_check() {
    let ok = cmd_validate(&small());
    assert!(ok.passed, "{ok}");
    assert!(ok.to_string().ends_with("all checks passed"));
    assert_eq!(ok.lines.iter().filter(|l| l.ends_with("pass")).count(), 10);

    let broken = load_config(configs_dir().join("broken_graph.toml")).unwrap();
    let v = cmd_validate(&broken);
    assert!(!v.passed);
    let failed: Vec<&String> = v.lines.iter().filter(|l| l.contains("FAIL")).collect();
    for check in ["row-stochastic", "column-stochastic", "strong connectivity"] {
        assert!(failed.iter().any(|l| l.contains(check)), "{check} not flagged: {v}");
    }
    assert!(!v.lines.iter().any(|l| l.contains("nonnegativity: FAIL")));
}

#[test]
fn validate_flags_disconnected_doubly_stochastic_graph() {
    let text = SMALL.replace(
        "kind = \"ring\"\nself_weight = 0.5",
        "kind = \"custom\"\nmatrices = [[[1.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, 0.5, 0.5]], [[0.5, 0.5], [0.5, 0.5]]]",
    );
    let v = cmd_validate(&parse_config(&text, "inline").unwrap());
    assert!(!v.passed);
    assert!(v.lines.iter().any(|l| l == "coalition 1 graph strong connectivity: FAIL"), "{v}");
    assert!(v.lines.iter().any(|l| l == "coalition 1 graph row-stochastic: pass"));
    assert!(v.lines.iter().any(|l| l == "coalition 2 graph strong connectivity: pass"));
}

#[test]
fn run_writes_trajectory_series_and_metadata() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small();
    let out = cmd_run(&cfg, tmp.path()).unwrap();
    assert_eq!(out.records.len(), 2);
    assert_metadata(tmp.path(), "run");
    assert!(tmp.path().join("report.toml").exists());

    for seed in [3, 4] {
        let dir = tmp.path().join(format!("seed-{seed}"));
        assert_metadata(&dir, "run");
        let (header, rows) = read_csv(&dir.join("trajectory.csv"));
        assert_eq!(header.join(","), TRAJECTORY_HEADER);
        assert_eq!(rows.len(), 41 * 5);
        for row in &rows {
            let coalition: usize = row[1].parse().unwrap();
            let player: usize = row[2].parse().unwrap();
            let action: f64 = row[3].parse().unwrap();
            assert!((1..=2).contains(&coalition));
            assert!(player >= 1 && player <= if coalition == 1 { 3 } else { 2 });
            assert!((-2.0..=2.0).contains(&action));
        }
        let (header, rows) = read_csv(&dir.join("series.csv"));
        assert_eq!(&header[..3], ["t", "nash_gap", "tracking_error"]);
        assert_eq!(rows.len(), 41);
        assert!(rows.iter().all(|r| r[1].parse::<f64>().is_ok()));
    }
}

#[test]
fn sweep_with_one_alpha_has_one_gap_column_and_flags_large_steps() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small();
    let out = cmd_sweep(&cfg, tmp.path()).unwrap();
    assert_metadata(tmp.path(), "sweep");
    let (header, rows) = read_csv(&tmp.path().join("sweep.csv"));
    assert_eq!(header.join(","), SWEEP_HEADER);
    assert_eq!(rows.len(), 2 * 41);
    let (header, rows) = read_csv(&tmp.path().join("gap_mean.csv"));
    assert_eq!(header, ["t", "alpha_0.05"]);
    assert_eq!(rows.len(), 41);

    // alpha = 0.05 is far above the admissible bound for this game
    assert!(out.alpha_max < 0.05);
    assert_eq!(out.results[0].admissible, Some(false));
    let report: toml::Table = fs::read_to_string(tmp.path().join("report.toml")).unwrap().parse().unwrap();
    assert_eq!(report["inadmissible"].as_array().unwrap().len(), 1);
}

#[test]
fn analyze_writes_rho_curve() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cmd_analyze(&small(), tmp.path()).unwrap();
    assert_metadata(tmp.path(), "analyze");
    let (header, rows) = read_csv(&tmp.path().join("rho_curve.csv"));
    assert_eq!(header, ["alpha", "rho", "admissible", "x_bound", "phi_bound"]);
    assert_eq!(rows.len(), 10);
    for (row, (a, rho)) in rows.iter().zip(&out.rho_curve) {
        let alpha: f64 = row[0].parse().unwrap();
        assert_eq!(alpha, *a);
        assert_eq!(row[2] == "true", *rho < 1.0 && alpha < out.result.step.alpha_max);
    }
    assert!(tmp.path().join("analysis.toml").exists());
}

#[test]
fn bench_requires_cournot_and_writes_reference() {
    let tmp = tempfile::tempdir().unwrap();
    let err = cmd_bench(&small(), tmp.path()).unwrap_err();
    assert_eq!(err.exit_code(), 2);

    let cfg = load_config(configs_dir().join("cournot.toml")).unwrap();
    let cfg = apply_overrides(
        cfg,
        &Overrides {
            iters: Some(20),
            seed: Some(1),
            ..Overrides::default()
        },
    )
    .unwrap();
    let out = cmd_bench(&cfg, tmp.path()).unwrap();
    assert_eq!(out.report.results.len(), 4);
    assert_metadata(tmp.path(), "bench");
    let (header, rows) = read_csv(&tmp.path().join("reference.csv"));
    assert_eq!(header, ["coalition", "player", "action"]);
    assert_eq!(rows.len(), 24);
    let (header, rows) = read_csv(&tmp.path().join("trajectory_alpha_0.1.csv"));
    assert_eq!(header.join(","), TRAJECTORY_HEADER);
    assert_eq!(rows.len(), 21 * 24);
}

#[test]
fn overrides_are_validated() {
    let err = apply_overrides(
        small(),
        &Overrides {
            alpha: Some(0.0),
            ..Overrides::default()
        },
    )
    .unwrap_err();
    assert!(matches!(err, CommandError::Config(ConfigError::Validation(_))));
    assert_eq!(err.exit_code(), 2);
}

fn write_small(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("game.toml");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn binary_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_small(tmp.path(), SMALL);

    let ok = Command::new(BIN)
        .args(["run", "--quiet", "--iters", "5", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(ok.stdout.is_empty());
    assert!(tmp.path().join("out/seed-3/trajectory.csv").exists());

    let bad_alpha = Command::new(BIN)
        .args(["run", "--alpha", "-1", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(bad_alpha.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_alpha.stderr).contains("alpha"));

    let broken = Command::new(BIN)
        .arg("validate")
        .arg("--config")
        .arg(configs_dir().join("broken_graph.toml"))
        .output()
        .unwrap();
    assert_eq!(broken.status.code(), Some(2));

    let missing = Command::new(BIN)
        .args(["validate", "--config"])
        .arg(tmp.path().join("nope.toml"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(4));

    // a regular file where the output directory should go
    let blocker = tmp.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let unwritable = Command::new(BIN)
        .args(["run", "--iters", "2", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(unwritable.status.code(), Some(4));

    // rounding alone breaks a zero conservation budget
    let strict = write_small(tmp.path(), &SMALL.replace("seeds = [3, 4]", "seeds = [3, 4]\nconservation_tol = 1e-300"));
    let numerical = Command::new(BIN)
        .args(["run", "--config"])
        .arg(&strict)
        .arg("--output-dir")
        .arg(tmp.path().join("strict"))
        .output()
        .unwrap();
    assert_eq!(numerical.status.code(), Some(3), "{}", String::from_utf8_lossy(&numerical.stderr));
}

#[test]
fn env_var_sets_default_output_root() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_small(tmp.path(), SMALL);
    let root = tmp.path().join("root");
    let out = Command::new(BIN)
        .args(["analyze", "--quiet", "--config"])
        .arg(&cfg)
        .env(OUTPUT_ENV, &root)
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(root.join("analyze/metadata.toml").exists());
    assert!(root.join("analyze/rho_curve.csv").exists());
}
