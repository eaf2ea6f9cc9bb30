//! The `validate`, `run`, `sweep`, `analyze` and `bench` commands.
//!
//! Each command reads a [`RunConfig`] and writes into one output directory.
//! Every directory written gets a `metadata.toml` holding the full config,
//! the seeds, the random number pipeline and the crate version.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    build_constants, estimate_chi, estimate_game_lipschitz, max_step_size, nash_oracle, spectral_radius,
    steady_state_bounds, ConvergenceConstants, NashOracleOptions, NashReference, StepBound,
};
use crate::config::{ConfigError, GameSection, GraphSection, OutputFormat, RunConfig};
use crate::cournot::{run_benchmark, BenchmarkOptions, BenchmarkReport};
use crate::error::Error;
use crate::game::{BoxConstraint, GameSpec};
use crate::graph::validate_graph;
use crate::seeker::{run, RunRecord};
use crate::smoothing::{stream_rng, RNG_ALGORITHM};
use crate::sweep::{run_sweep, AlphaResult};

/// Environment variable naming the default output root.
pub const OUTPUT_ENV: &str = "COALITION_NE_OUTPUT";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const TRAJECTORY_HEADER: &str = "t,coalition,player,action";
pub const SWEEP_HEADER: &str = "t,alpha,seed,nash_gap,tracking_error";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("validation failed:\n{0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(Error),
    #[error("cannot write {path}: {reason}")]
    Io { path: String, reason: String },
}

impl CommandError {
    /// 2 for invalid input, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(ConfigError::Io { .. }) | CommandError::Io { .. } => 4,
            CommandError::Config(_) | CommandError::Validation(_) => 2,
            CommandError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::OracleFailure { .. }
            | Error::NumericalOverflow { .. }
            | Error::ConservationViolation { .. }
            | Error::NonConvergence(_) => CommandError::Numerical(e),
            other => CommandError::Validation(other.to_string()),
        }
    }
}

type CmdResult<T> = std::result::Result<T, CommandError>;

fn io_err(path: &Path, e: std::io::Error) -> CommandError {
    CommandError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    }
}

/// Command-line values that replace config entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub iters: Option<usize>,
}

/// Apply `o` and re-validate. An alpha override also replaces the step-size grid.
pub fn apply_overrides(mut cfg: RunConfig, o: &Overrides) -> CmdResult<RunConfig> {
    if let Some(seed) = o.seed {
        cfg.params.seeds = vec![seed];
    }
    if let Some(alpha) = o.alpha {
        cfg.params.alpha = alpha;
        cfg.params.alphas = None;
    }
    if let Some(iters) = o.iters {
        cfg.params.max_iters = iters;
    }
    let v = cfg.violations();
    if v.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Validation(v).into())
    }
}

/// `flag`, else the config's directory, else `$COALITION_NE_OUTPUT`, else `output`.
pub fn resolve_output_dir(flag: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(d) = &cfg.output.directory {
        return PathBuf::from(d);
    }
    match std::env::var_os(OUTPUT_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root),
        _ => PathBuf::from("output"),
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    rng_algorithm: &'a str,
    seeds: &'a [u64],
    config: &'a RunConfig,
}

fn write_text(path: &Path, text: &str) -> CmdResult<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn create_dir(path: &Path) -> CmdResult<()> {
    fs::create_dir_all(path).map_err(|e| io_err(path, e))
}

fn write_toml<T: Serialize>(path: &Path, value: &T) -> CmdResult<()> {
    let text = toml::to_string(value).map_err(|e| CommandError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    write_text(path, &text)
}

fn write_metadata(dir: &Path, command: &str, seeds: &[u64], cfg: &RunConfig) -> CmdResult<()> {
    write_toml(
        &dir.join("metadata.toml"),
        &Metadata {
            command,
            version: VERSION,
            rng_algorithm: RNG_ALGORITHM,
            seeds,
            config: cfg,
        },
    )
}

fn write_csv(path: &Path, header: &str, rows: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> CmdResult<()> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{header}")
        .and_then(|_| rows(&mut w))
        .and_then(|_| w.flush())
        .map_err(|e| io_err(path, e))
}

/// Shortest round-trip form, with an exponent for very large or small values.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

/// Long-format trajectory: one row per recorded step and player, with
/// one-based coalition and player numbers.
pub fn write_trajectory(path: &Path, game: &GameSpec, record: &RunRecord) -> CmdResult<()> {
    write_csv(path, TRAJECTORY_HEADER, |w| {
        for s in &record.series {
            for (c, v) in s.x.iter().enumerate() {
                let id = game.owner(c);
                writeln!(w, "{},{},{},{}", s.t, id.coalition + 1, id.player + 1, num(*v))?;
            }
        }
        Ok(())
    })
}

fn write_series(path: &Path, game: &GameSpec, record: &RunRecord) -> CmdResult<()> {
    let mut header = String::from("t,nash_gap,tracking_error,conservation_residual");
    for i in 0..game.num_coalitions() {
        let _ = write!(header, ",consensus_{}", i + 1);
    }
    write_csv(path, &header, |w| {
        for s in &record.series {
            write!(w, "{},{},{},{}", s.t, opt(s.nash_gap), num(s.tracking_error), num(s.conservation_residual))?;
            for e in &s.consensus_error {
                write!(w, ",{}", num(*e))?;
            }
            writeln!(w)?;
        }
        Ok(())
    })
}

fn write_sweep_long(path: &Path, results: &[AlphaResult]) -> CmdResult<()> {
    write_csv(path, SWEEP_HEADER, |w| {
        for r in results {
            for run in &r.runs {
                for s in &run.series {
                    writeln!(w, "{},{},{},{},{}", s.t, num(r.alpha), run.metadata.seed, opt(s.nash_gap), num(s.tracking_error))?;
                }
            }
        }
        Ok(())
    })
}

/// One column of seed-averaged gaps per step size.
fn write_gap_wide(path: &Path, results: &[AlphaResult]) -> CmdResult<()> {
    let mut header = String::from("t");
    for r in results {
        let _ = write!(header, ",alpha_{}", num(r.alpha));
    }
    write_csv(path, &header, |w| {
        let len = results.iter().map(|r| r.mean_gap.len()).min().unwrap_or(0);
        for k in 0..len {
            write!(w, "{}", results[0].mean_gap[k].0)?;
            for r in results {
                write!(w, ",{}", num(r.mean_gap[k].1))?;
            }
            writeln!(w)?;
        }
        Ok(())
    })
}

fn write_steady_state(path: &Path, results: &[AlphaResult]) -> CmdResult<()> {
    write_csv(path, "alpha,initial_gap,steady_state_gap,half_time,admissible", |w| {
        for r in results {
            let half = r.half_time.map_or_else(String::new, |t| t.to_string());
            let adm = r.admissible.map_or_else(String::new, |a| a.to_string());
            writeln!(w, "{},{},{},{},{}", num(r.alpha), num(r.initial_gap), num(r.steady_state_gap), half, adm)?;
        }
        Ok(())
    })
}

fn write_reference(path: &Path, game: &GameSpec, x: &[f64]) -> CmdResult<()> {
    write_csv(path, "coalition,player,action", |w| {
        for (c, v) in x.iter().enumerate() {
            let id = game.owner(c);
            writeln!(w, "{},{},{}", id.coalition + 1, id.player + 1, num(*v))?;
        }
        Ok(())
    })
}

/// Result of `validate`: one line per check.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOutcome {
    pub lines: Vec<String>,
    pub passed: bool,
}

impl std::fmt::Display for ValidationOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        if self.passed {
            write!(f, "all checks passed")
        } else {
            write!(f, "validation failed")
        }
    }
}

fn coalition_sizes(cfg: &RunConfig) -> Vec<usize> {
    match &cfg.game {
        GameSection::Cournot { .. } => vec![crate::cournot::COALITION_SIZE; crate::cournot::NUM_COALITIONS],
        GameSection::Custom { coalitions } => coalitions.iter().map(|c| c.size).collect(),
    }
}

/// Graph checks for every coalition followed by game assembly.
pub fn cmd_validate(cfg: &RunConfig) -> ValidationOutcome {
    let mut lines = Vec::new();
    let mut passed = true;
    let kind = cfg.graph_kind();
    for (i, n) in coalition_sizes(cfg).into_iter().enumerate() {
        let rows = match &cfg.graph {
            GraphSection::Custom { matrices } => {
                let m = if matrices.len() == 1 { &matrices[0] } else { &matrices[i] };
                m.clone()
            }
            _ => match kind.build(i, n) {
                Ok(g) => g.rows(),
                Err(e) => {
                    passed = false;
                    lines.push(format!("coalition {}: {e}", i + 1));
                    continue;
                }
            },
        };
        match validate_graph(&rows) {
            Ok(report) => {
                for (check, ok) in [
                    ("nonnegativity", report.nonnegative),
                    ("row-stochastic", report.row_stochastic),
                    ("column-stochastic", report.column_stochastic),
                    ("self-loops", report.self_loops),
                    ("strong connectivity", report.strongly_connected),
                ] {
                    lines.push(format!("coalition {} graph {check}: {}", i + 1, if ok { "pass" } else { "FAIL" }));
                }
                passed &= report.passed();
                if rows.len() != n {
                    passed = false;
                    lines.push(format!("coalition {} graph size: FAIL ({} nodes for {n} players)", i + 1, rows.len()));
                }
            }
            Err(e) => {
                passed = false;
                lines.push(format!("coalition {} graph: FAIL ({e})", i + 1));
            }
        }
    }
    if passed {
        match cfg.build_game() {
            Ok(g) => lines.push(format!(
                "game assembly: pass ({} coalitions, {} players)",
                g.num_coalitions(),
                g.num_players()
            )),
            Err(e) => {
                passed = false;
                lines.push(format!("game assembly: FAIL ({e})"));
            }
        }
    }
    ValidationOutcome { lines, passed }
}

fn build_validated_game(cfg: &RunConfig) -> CmdResult<GameSpec> {
    let v = cmd_validate(cfg);
    if !v.passed {
        return Err(CommandError::Validation(v.to_string()));
    }
    Ok(cfg.build_game()?)
}

fn reference_for(cfg: &RunConfig, game: &GameSpec) -> crate::error::Result<NashReference> {
    nash_oracle(game, cfg.analysis.tol, &NashOracleOptions::default())
}

#[derive(Serialize)]
struct RunReport {
    seed: u64,
    alpha: f64,
    iterations: usize,
    stopped_early: bool,
    initial_gap: Option<f64>,
    final_gap: Option<f64>,
    final_tracking_error: f64,
    max_conservation_residual: f64,
    oracle_evals: u64,
    final_x: Vec<f64>,
}

#[derive(Serialize)]
struct RunSetReport {
    reference: Option<Vec<f64>>,
    reference_residual: Option<f64>,
    reference_note: Option<String>,
    runs: Vec<RunReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub records: Vec<RunRecord>,
    pub reference: Option<NashReference>,
}

impl RunOutcome {
    pub fn summary(&self) -> String {
        let mut s = format!("wrote {}\n", self.dir.display());
        for r in &self.records {
            let _ = writeln!(
                s,
                "seed {}: {} iterations, final gap {}, tracking error {:.3e}",
                r.metadata.seed,
                r.summary.iterations,
                r.summary.final_gap.map_or("n/a".into(), |g| format!("{g:.6e}")),
                r.summary.final_tracking_error
            );
        }
        s
    }
}

/// One seeker run per configured seed. Writes `seed-<s>/trajectory.csv`,
/// `seed-<s>/series.csv` and a `report.toml` for the whole set.
pub fn cmd_run(cfg: &RunConfig, out: &Path) -> CmdResult<RunOutcome> {
    let game = build_validated_game(cfg)?;
    // the gap columns are optional, so a failed reference solve is not fatal here
    let (reference, note) = match reference_for(cfg, &game) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let x_star = reference.as_ref().map(|r| r.x.as_slice());
    let seeds = &cfg.params.seeds;
    let records = seeds
        .par_iter()
        .map(|&seed| run(&game, &cfg.algorithm_params(seed)?, None, x_star))
        .collect::<crate::error::Result<Vec<_>>>()?;

    create_dir(out)?;
    write_metadata(out, "run", seeds, cfg)?;
    for r in &records {
        let dir = out.join(format!("seed-{}", r.metadata.seed));
        create_dir(&dir)?;
        write_metadata(&dir, "run", &[r.metadata.seed], cfg)?;
        if cfg.output.wants(OutputFormat::Trajectory) {
            write_trajectory(&dir.join("trajectory.csv"), &game, r)?;
        }
        if cfg.output.wants(OutputFormat::Series) {
            write_series(&dir.join("series.csv"), &game, r)?;
        }
    }
    if cfg.output.wants(OutputFormat::Report) {
        let report = RunSetReport {
            reference: reference.as_ref().map(|r| r.x.clone()),
            reference_residual: reference.as_ref().map(|r| r.residual),
            reference_note: note,
            runs: records
                .iter()
                .map(|r| RunReport {
                    seed: r.metadata.seed,
                    alpha: r.metadata.alpha,
                    iterations: r.summary.iterations,
                    stopped_early: r.summary.stopped_early,
                    initial_gap: r.summary.initial_gap,
                    final_gap: r.summary.final_gap,
                    final_tracking_error: r.summary.final_tracking_error,
                    max_conservation_residual: r.summary.max_conservation_residual,
                    oracle_evals: r.summary.oracle_evals,
                    final_x: r.summary.final_x.clone(),
                })
                .collect(),
        };
        write_toml(&out.join("report.toml"), &report)?;
    }
    Ok(RunOutcome {
        dir: out.to_path_buf(),
        records,
        reference,
    })
}

/// Constants, admissible step size and the configured estimates behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    pub constants: ConvergenceConstants,
    pub step: StepBound,
    pub chi_estimated: bool,
    pub lipschitz_estimated: bool,
}

/// Build the convergence constants, estimating `chi` and the Lipschitz
/// bounds by sampling unless the config supplies them.
pub fn analyze_game(cfg: &RunConfig, game: &GameSpec) -> crate::error::Result<AnalysisResult> {
    let a = &cfg.analysis;
    let mut rng = stream_rng(a.seed, 0);
    let lipschitz = match &a.lipschitz {
        Some(d) => d.clone(),
        None => estimate_game_lipschitz(game, a.lipschitz_samples, &mut rng)?,
    };
    let chi = match a.chi {
        Some(c) => c,
        None => estimate_chi(game, a.chi_samples, &mut rng)?,
    };
    if !(chi > 0.0) {
        return Err(Error::InvalidInput(format!(
            "estimated chi = {chi} is not positive; the game does not look strongly monotone (set analysis.chi to override)"
        )));
    }
    let constants = build_constants(game, chi, &lipschitz, a.mu_ref)?;
    let step = max_step_size(&constants);
    Ok(AnalysisResult {
        constants,
        step,
        chi_estimated: a.chi.is_none(),
        lipschitz_estimated: a.lipschitz.is_none(),
    })
}

#[derive(Serialize)]
struct AlphaRow {
    alpha: f64,
    admissible: bool,
    rho: f64,
    x_bound: Option<f64>,
    phi_bound: Option<f64>,
}

#[derive(Serialize)]
struct AnalysisReport {
    chi: f64,
    chi_estimated: bool,
    lipschitz: Vec<f64>,
    lipschitz_estimated: bool,
    mu_ref: f64,
    l: f64,
    b: f64,
    sigma: Vec<f64>,
    sigma_bar: f64,
    varsigma: f64,
    k1: f64,
    k2: f64,
    k3: f64,
    k4: f64,
    k5: f64,
    k6: f64,
    k7: f64,
    alpha_max: f64,
    alpha_max_degenerate: bool,
    configured: Vec<AlphaRow>,
}

fn alpha_row(alpha: f64, r: &AnalysisResult) -> AlphaRow {
    let bounds = steady_state_bounds(alpha, &r.constants).ok();
    AlphaRow {
        alpha,
        admissible: alpha < r.step.alpha_max,
        rho: spectral_radius(alpha, &r.constants),
        x_bound: bounds.map(|b| b.x_bound),
        phi_bound: bounds.map(|b| b.phi_bound),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOutcome {
    pub dir: PathBuf,
    pub result: AnalysisResult,
    /// `(alpha, rho)` over `(0, 1.5 alpha_max]`
    pub rho_curve: Vec<(f64, f64)>,
}

impl AnalyzeOutcome {
    pub fn summary(&self) -> String {
        let c = &self.result.constants;
        format!(
            "wrote {}\nchi {:.4e}, L {:.4e}, B {:.4e}, sigma_bar {:.4}, alpha_max {:.4e}\n",
            self.dir.display(),
            c.chi,
            c.l,
            c.b,
            c.sigma_bar,
            self.result.step.alpha_max
        )
    }
}

/// Writes `analysis.toml` and `rho_curve.csv` (`alpha,rho,admissible,x_bound,phi_bound`).
pub fn cmd_analyze(cfg: &RunConfig, out: &Path) -> CmdResult<AnalyzeOutcome> {
    let game = build_validated_game(cfg)?;
    let result = analyze_game(cfg, &game)?;
    let c = &result.constants;
    let amax = result.step.alpha_max;
    let grid = cfg.analysis.alpha_grid;
    let alphas: Vec<f64> = (1..=grid).map(|k| 1.5 * amax * k as f64 / grid as f64).collect();
    let rows: Vec<AlphaRow> = alphas.iter().map(|&a| alpha_row(a, &result)).collect();

    create_dir(out)?;
    write_metadata(out, "analyze", &cfg.params.seeds, cfg)?;
    write_csv(&out.join("rho_curve.csv"), "alpha,rho,admissible,x_bound,phi_bound", |w| {
        for r in &rows {
            writeln!(w, "{},{},{},{},{}", num(r.alpha), num(r.rho), r.admissible, opt(r.x_bound), opt(r.phi_bound))?;
        }
        Ok(())
    })?;
    let report = AnalysisReport {
        chi: c.chi,
        chi_estimated: result.chi_estimated,
        lipschitz: c.lipschitz.clone(),
        lipschitz_estimated: result.lipschitz_estimated,
        mu_ref: c.mu_ref,
        l: c.l,
        b: c.b,
        sigma: c.sigmas.clone(),
        sigma_bar: c.sigma_bar,
        varsigma: c.varsigma,
        k1: c.k1,
        k2: c.k2,
        k3: c.k3,
        k4: c.k4,
        k5: c.k5,
        k6: c.k6,
        k7: c.k7,
        alpha_max: amax,
        alpha_max_degenerate: result.step.degenerate,
        configured: cfg.alphas().iter().map(|&a| alpha_row(a, &result)).collect(),
    };
    write_toml(&out.join("analysis.toml"), &report)?;
    let rho_curve = rows.iter().map(|r| (r.alpha, r.rho)).collect();
    Ok(AnalyzeOutcome {
        dir: out.to_path_buf(),
        result,
        rho_curve,
    })
}

#[derive(Serialize)]
struct SteadyRow {
    alpha: f64,
    admissible: Option<bool>,
    initial_gap: f64,
    steady_state_gap: f64,
    half_time: Option<usize>,
}

#[derive(Serialize)]
struct SweepReport {
    iters: usize,
    seeds: Vec<u64>,
    alpha_max: f64,
    inadmissible: Vec<f64>,
    reference: Vec<f64>,
    reference_residual: f64,
    steady_state: Vec<SteadyRow>,
}

fn steady_rows(results: &[AlphaResult]) -> Vec<SteadyRow> {
    results
        .iter()
        .map(|r| SteadyRow {
            alpha: r.alpha,
            admissible: r.admissible,
            initial_gap: r.initial_gap,
            steady_state_gap: r.steady_state_gap,
            half_time: r.half_time,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub dir: PathBuf,
    pub alpha_max: f64,
    pub reference: NashReference,
    pub results: Vec<AlphaResult>,
}

fn sweep_summary(dir: &Path, alpha_max: f64, results: &[AlphaResult]) -> String {
    let mut s = format!("wrote {}\nalpha_max {alpha_max:.4e}\n", dir.display());
    for r in results {
        let flag = if r.admissible == Some(false) { " (above alpha_max)" } else { "" };
        let _ = writeln!(
            s,
            "alpha {}{flag}: initial gap {:.4e}, steady-state gap {:.4e}",
            r.alpha, r.initial_gap, r.steady_state_gap
        );
    }
    s
}

impl SweepOutcome {
    pub fn summary(&self) -> String {
        sweep_summary(&self.dir, self.alpha_max, &self.results)
    }
}

fn write_sweep_files(
    out: &Path,
    command: &str,
    cfg: &RunConfig,
    alpha_max: f64,
    reference: &NashReference,
    results: &[AlphaResult],
) -> CmdResult<()> {
    create_dir(out)?;
    write_metadata(out, command, &cfg.params.seeds, cfg)?;
    write_sweep_long(&out.join("sweep.csv"), results)?;
    write_gap_wide(&out.join("gap_mean.csv"), results)?;
    write_steady_state(&out.join("steady_state.csv"), results)?;
    if cfg.output.wants(OutputFormat::Report) {
        let report = SweepReport {
            iters: cfg.params.max_iters,
            seeds: cfg.params.seeds.clone(),
            alpha_max,
            inadmissible: results.iter().filter(|r| r.admissible == Some(false)).map(|r| r.alpha).collect(),
            reference: reference.x.clone(),
            reference_residual: reference.residual,
            steady_state: steady_rows(results),
        };
        write_toml(&out.join("report.toml"), &report)?;
    }
    Ok(())
}

/// Step-size grid times seeds. Step sizes above `alpha_max` still run and
/// are flagged in the report.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> CmdResult<SweepOutcome> {
    let game = build_validated_game(cfg)?;
    let analysis = analyze_game(cfg, &game)?;
    let alpha_max = analysis.step.alpha_max;
    let reference = reference_for(cfg, &game)?;
    let base = cfg.algorithm_params(cfg.params.seeds[0])?;
    let results = run_sweep(&game, &base, &cfg.alphas(), &cfg.params.seeds, Some(&reference.x), Some(alpha_max))?;
    write_sweep_files(out, "sweep", cfg, alpha_max, &reference, &results)?;
    Ok(SweepOutcome {
        dir: out.to_path_buf(),
        alpha_max,
        reference,
        results,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutcome {
    pub dir: PathBuf,
    pub alpha_max: f64,
    pub report: BenchmarkReport,
}

impl BenchOutcome {
    pub fn summary(&self) -> String {
        let mut s = sweep_summary(&self.dir, self.alpha_max, &self.report.results);
        let _ = writeln!(s, "reference VI residual {:.3e}", self.report.reference.residual);
        s
    }
}

/// The Cournot benchmark: everything `sweep` writes plus the reference
/// equilibrium and, per step size, the action trajectory of the first seed.
pub fn cmd_bench(cfg: &RunConfig, out: &Path) -> CmdResult<BenchOutcome> {
    let GameSection::Cournot { bounds } = cfg.game else {
        return Err(CommandError::Validation("bench requires game kind \"cournot\"".into()));
    };
    let game = build_validated_game(cfg)?;
    let analysis = analyze_game(cfg, &game)?;
    let alpha_max = analysis.step.alpha_max;
    let opts = BenchmarkOptions {
        bounds: BoxConstraint::new(bounds[0], bounds[1])?,
        graph: cfg.graph_kind(),
        mu: cfg.schedule()?,
        record_every: cfg.params.record_every,
        nash_tol: cfg.analysis.tol,
        alpha_max: Some(alpha_max),
        conservation_tol: cfg.params.conservation_tol,
    };
    let report = run_benchmark(&opts, &cfg.alphas(), cfg.params.max_iters, &cfg.params.seeds)?;
    write_sweep_files(out, "bench", cfg, alpha_max, &report.reference, &report.results)?;
    write_reference(&out.join("reference.csv"), &game, &report.reference.x)?;
    if cfg.output.wants(OutputFormat::Trajectory) {
        for r in &report.results {
            write_trajectory(&out.join(format!("trajectory_alpha_{}.csv", num(r.alpha))), &game, &r.runs[0])?;
        }
    }
    Ok(BenchOutcome {
        dir: out.to_path_buf(),
        alpha_max,
        report,
    })
}
