//! Experiment configuration in TOML.
//!
//! Parsing is strict: unknown keys are rejected. Sections `game`, `graph`
//! and `params` are required; `analysis` and `output` fall back to defaults.
//!
//! ```toml
//! [game]
//! kind = "cournot"
//! bounds = [0.0, 60.0]
//!
//! [graph]
//! kind = "ring"
//! self_weight = 0.5
//!
//! [params]
//! alpha = 0.1
//! mu0 = 0.1
//! mu_mode = "harmonic"
//! max_iters = 2000
//! seeds = [0, 1, 2]
//! ```

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cournot::build_cournot;
use crate::error::{Error, Result};
use crate::game::{assemble_game, BoxConstraint, CostOracle, GameSpec, PlayerSpec, Subgradient};
use crate::graph::GraphKind;
use crate::seeker::{AlgorithmParams, DEFAULT_CONSERVATION_TOL};
use crate::smoothing::{SmoothingMode, SmoothingSchedule, DEFAULT_MU_MIN};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GameSection {
    Cournot {
        #[serde(default = "cournot_bounds")]
        bounds: [f64; 2],
    },
    Custom {
        coalitions: Vec<CustomCoalition>,
    },
}

fn cournot_bounds() -> [f64; 2] {
    [0.0, 60.0]
}

/// A coalition whose player `j` has cost
/// `curvature/2 (x_j - target_j)^2 + abs_weight |x_j - kink| + coupling x_j * (sum of all other actions)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomCoalition {
    pub size: usize,
    pub bounds: [f64; 2],
    pub curvature: f64,
    pub target: Vec<f64>,
    #[serde(default)]
    pub abs_weight: f64,
    #[serde(default)]
    pub kink: f64,
    #[serde(default)]
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSection {
    Ring { self_weight: f64 },
    Complete,
    /// One matrix per coalition, or a single matrix used by every coalition.
    Custom { matrices: Vec<Vec<Vec<f64>>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub alpha: f64,
    /// Step sizes for `sweep` and `bench`; `[alpha]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default = "default_mu0")]
    pub mu0: f64,
    #[serde(default = "default_mu_mode")]
    pub mu_mode: SmoothingMode,
    #[serde(default = "default_mu_min")]
    pub mu_min: f64,
    pub max_iters: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_tol: Option<f64>,
    #[serde(default = "default_conservation_tol")]
    pub conservation_tol: f64,
}

fn default_mu0() -> f64 {
    0.1
}
fn default_mu_mode() -> SmoothingMode {
    SmoothingMode::Harmonic
}
fn default_mu_min() -> f64 {
    DEFAULT_MU_MIN
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn one() -> usize {
    1
}
fn default_conservation_tol() -> f64 {
    DEFAULT_CONSERVATION_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Strong monotonicity constant; estimated by sampling when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    /// Per-player Lipschitz bounds in coordinate order; estimated when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<Vec<f64>>,
    #[serde(default = "default_mu_ref")]
    pub mu_ref: f64,
    /// Tolerance of the reference equilibrium solver.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_samples")]
    pub lipschitz_samples: usize,
    #[serde(default = "default_samples")]
    pub chi_samples: usize,
    /// Number of points on the step-size grid of the spectral radius curve.
    #[serde(default = "default_grid")]
    pub alpha_grid: usize,
    /// Seed of the sampling estimators.
    #[serde(default)]
    pub seed: u64,
}

fn default_mu_ref() -> f64 {
    0.05
}
fn default_tol() -> f64 {
    1e-8
}
fn default_samples() -> usize {
    1000
}
fn default_grid() -> usize {
    100
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            chi: None,
            lipschitz: None,
            mu_ref: default_mu_ref(),
            tol: default_tol(),
            lipschitz_samples: default_samples(),
            chi_samples: default_samples(),
            alpha_grid: default_grid(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    /// `trajectory.csv` per run
    Trajectory,
    /// `series.csv` per run
    Series,
    /// `report.toml`
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    #[serde(default = "all_formats")]
    pub formats: Vec<OutputFormat>,
}

fn all_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Trajectory, OutputFormat::Series, OutputFormat::Report]
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: None,
            formats: all_formats(),
        }
    }
}

impl OutputSection {
    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub game: GameSection,
    pub graph: GraphSection,
    pub params: ParamsSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    game: Option<GameSection>,
    graph: Option<GraphSection>,
    params: Option<ParamsSection>,
    #[serde(default)]
    analysis: AnalysisSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot access {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("{}", format_parse(.origin, *.line, *.column, .field, .message))]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        field: Option<String>,
        message: String,
    },
    #[error("invalid configuration:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<String>),
}

fn format_parse(origin: &str, line: usize, column: usize, field: &Option<String>, message: &str) -> String {
    match field {
        Some(f) => format!("{origin}:{line}:{column}: field `{f}`: {message}"),
        None => format!("{origin}:{line}:{column}: {message}"),
    }
}

/// The first backtick-quoted name in a deserializer message, if any.
fn quoted_field(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

/// Parse and validate a configuration held in memory; `origin` labels errors.
pub fn parse_config(text: &str, origin: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        let message = e.message().trim().to_string();
        ConfigError::Parse {
            origin: origin.to_string(),
            line,
            column,
            field: quoted_field(&message),
            message,
        }
    })?;

    let mut missing = Vec::new();
    for (name, present) in [
        ("game", raw.game.is_some()),
        ("graph", raw.graph.is_some()),
        ("params", raw.params.is_some()),
    ] {
        if !present {
            missing.push(format!("missing [{name}] section"));
        }
    }
    if !missing.is_empty() {
        return Err(ConfigError::Validation(missing));
    }
    let cfg = RunConfig {
        game: raw.game.expect("checked"),
        graph: raw.graph.expect("checked"),
        params: raw.params.expect("checked"),
        analysis: raw.analysis,
        output: raw.output,
    };
    let violations = cfg.violations();
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Validation(violations))
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config(&text, &path.display().to_string())
}

/// TOML text that [`parse_config`] reads back to an equal value.
pub fn config_to_string(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("configuration is always representable in TOML")
}

pub fn write_config(cfg: &RunConfig, path: impl AsRef<Path>) -> Result<(), ConfigError> {
    let path = path.as_ref();
    std::fs::write(path, config_to_string(cfg)).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

struct Violations(Vec<String>);

impl Violations {
    fn check(&mut self, ok: bool, msg: impl fmt::Display) {
        if !ok {
            self.0.push(msg.to_string());
        }
    }

    fn positive(&mut self, name: &str, v: f64) {
        self.check(v > 0.0 && v.is_finite(), format_args!("{name} must be > 0 (got {v})"));
    }

    fn finite(&mut self, name: &str, v: f64) {
        self.check(v.is_finite(), format_args!("{name} must be finite (got {v})"));
    }

    fn bounds(&mut self, name: &str, b: [f64; 2]) {
        self.check(
            b[0].is_finite() && b[1].is_finite() && b[0] <= b[1],
            format_args!("{name} must be finite with lower <= upper (got [{}, {}])", b[0], b[1]),
        );
    }
}

impl RunConfig {
    /// Every range violation, in section order.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Violations(Vec::new());
        match &self.game {
            GameSection::Cournot { bounds } => v.bounds("game.bounds", *bounds),
            GameSection::Custom { coalitions } => {
                v.check(!coalitions.is_empty(), "game.coalitions must not be empty");
                for (i, c) in coalitions.iter().enumerate() {
                    let p = format!("game.coalitions[{i}]");
                    v.check(c.size >= 1, format_args!("{p}.size must be at least 1"));
                    v.bounds(&format!("{p}.bounds"), c.bounds);
                    v.check(
                        c.curvature >= 0.0 && c.curvature.is_finite(),
                        format_args!("{p}.curvature must be >= 0 (got {})", c.curvature),
                    );
                    v.check(
                        c.target.len() == c.size,
                        format_args!("{p}.target has {} entries for {} players", c.target.len(), c.size),
                    );
                    for (k, t) in c.target.iter().enumerate() {
                        v.finite(&format!("{p}.target[{k}]"), *t);
                    }
                    v.check(
                        c.abs_weight >= 0.0 && c.abs_weight.is_finite(),
                        format_args!("{p}.abs_weight must be >= 0 (got {})", c.abs_weight),
                    );
                    v.finite(&format!("{p}.kink"), c.kink);
                    v.finite(&format!("{p}.coupling"), c.coupling);
                }
            }
        }

        match &self.graph {
            GraphSection::Ring { self_weight } => v.check(
                *self_weight > 0.0 && *self_weight < 1.0,
                format_args!("graph.self_weight must lie in (0, 1) (got {self_weight})"),
            ),
            GraphSection::Complete => {}
            GraphSection::Custom { matrices } => {
                let n = self.num_coalitions();
                v.check(
                    matrices.len() == 1 || matrices.len() == n,
                    format_args!("graph.matrices must hold 1 or {n} matrices (got {})", matrices.len()),
                );
                for (m, rows) in matrices.iter().enumerate() {
                    v.check(
                        !rows.is_empty() && rows.iter().all(|r| r.len() == rows.len()),
                        format_args!("graph.matrices[{m}] must be square and non-empty"),
                    );
                    v.check(
                        rows.iter().flatten().all(|w| w.is_finite()),
                        format_args!("graph.matrices[{m}] must be finite"),
                    );
                }
            }
        }

        let p = &self.params;
        v.positive("alpha", p.alpha);
        if let Some(alphas) = &p.alphas {
            v.check(!alphas.is_empty(), "params.alphas must not be empty");
            for a in alphas {
                v.positive("every entry of params.alphas", *a);
            }
        }
        v.positive("mu0", p.mu0);
        v.check(
            p.mu_min >= 0.0 && p.mu_min <= p.mu0,
            format_args!("mu_min must lie in [0, mu0] (got {})", p.mu_min),
        );
        v.check(!p.seeds.is_empty(), "params.seeds must not be empty");
        v.check(
            p.seeds.iter().all(|&s| s <= i64::MAX as u64),
            "params.seeds must fit in a signed 64-bit integer",
        );
        v.check(p.record_every >= 1, "record_every must be at least 1");
        if let Some(tol) = p.stop_tol {
            v.positive("stop_tol", tol);
        }
        v.positive("conservation_tol", p.conservation_tol);

        let a = &self.analysis;
        if let Some(chi) = a.chi {
            v.positive("analysis.chi", chi);
        }
        if let Some(d) = &a.lipschitz {
            let n = self.num_players();
            v.check(
                d.len() == n,
                format_args!("analysis.lipschitz has {} entries for {n} players", d.len()),
            );
            v.check(
                d.iter().all(|x| *x >= 0.0 && x.is_finite()),
                "analysis.lipschitz entries must be finite and >= 0",
            );
        }
        v.positive("analysis.mu_ref", a.mu_ref);
        v.positive("analysis.tol", a.tol);
        v.check(a.lipschitz_samples >= 2, "analysis.lipschitz_samples must be at least 2");
        v.check(a.chi_samples >= 1, "analysis.chi_samples must be at least 1");
        v.check(a.alpha_grid >= 1, "analysis.alpha_grid must be at least 1");
        v.check(a.seed <= i64::MAX as u64, "analysis.seed must fit in a signed 64-bit integer");
        v.0
    }

    pub fn num_coalitions(&self) -> usize {
        match &self.game {
            GameSection::Cournot { .. } => crate::cournot::NUM_COALITIONS,
            GameSection::Custom { coalitions } => coalitions.len(),
        }
    }

    pub fn num_players(&self) -> usize {
        match &self.game {
            GameSection::Cournot { .. } => crate::cournot::NUM_COALITIONS * crate::cournot::COALITION_SIZE,
            GameSection::Custom { coalitions } => coalitions.iter().map(|c| c.size).sum(),
        }
    }

    pub fn graph_kind(&self) -> GraphKind {
        match &self.graph {
            GraphSection::Ring { self_weight } => GraphKind::Ring {
                self_weight: *self_weight,
            },
            GraphSection::Complete => GraphKind::Complete,
            GraphSection::Custom { matrices } => GraphKind::Custom(matrices.clone()),
        }
    }

    pub fn schedule(&self) -> Result<SmoothingSchedule> {
        SmoothingSchedule::with_floor(self.params.mu0, self.params.mu_mode, self.params.mu_min)
    }

    /// Step sizes for grid commands.
    pub fn alphas(&self) -> Vec<f64> {
        self.params.alphas.clone().unwrap_or_else(|| vec![self.params.alpha])
    }

    /// Seeker parameters for `seed` at the configured `alpha`.
    pub fn algorithm_params(&self, seed: u64) -> Result<AlgorithmParams> {
        let p = &self.params;
        let mut params = AlgorithmParams::new(p.alpha, self.schedule()?, p.max_iters, seed)?;
        params.record_every = p.record_every;
        params.workers = p.workers;
        params.stop_tol = p.stop_tol;
        params.conservation_tol = p.conservation_tol;
        params.validate()?;
        Ok(params)
    }

    pub fn build_game(&self) -> Result<GameSpec> {
        let graph = self.graph_kind();
        match &self.game {
            GameSection::Cournot { bounds } => build_cournot(BoxConstraint::new(bounds[0], bounds[1])?, &graph),
            GameSection::Custom { coalitions } => build_custom(coalitions, &graph),
        }
    }
}

/// Assemble the game described by a list of custom coalitions.
pub fn build_custom(coalitions: &[CustomCoalition], graph: &GraphKind) -> Result<GameSpec> {
    let total: usize = coalitions.iter().map(|c| c.size).sum();
    let mut players = Vec::with_capacity(total);
    let mut graphs = Vec::with_capacity(coalitions.len());
    let mut offset = 0;
    for (i, c) in coalitions.iter().enumerate() {
        if c.target.len() != c.size {
            return Err(Error::DimensionMismatch(format!(
                "coalition {i}: {} targets for {} players",
                c.target.len(),
                c.size
            )));
        }
        let bounds = BoxConstraint::new(c.bounds[0], c.bounds[1])?;
        for j in 0..c.size {
            let coord = offset + j;
            let (q, t, r, k, s) = (c.curvature, c.target[j], c.abs_weight, c.kink, c.coupling);
            let (block_start, n) = (offset, c.size);
            let cost = CostOracle::new(move |x: &[f64]| {
                let y = x[coord];
                let others: f64 = x.iter().sum::<f64>() - y;
                0.5 * q * (y - t).powi(2) + r * (y - k).abs() + s * y * others
            });
            let sub = Subgradient::new(move |x: &[f64]| {
                let y = x[coord];
                let others: f64 = x.iter().sum::<f64>() - y;
                let kink_term = if y > k {
                    r
                } else if y < k {
                    -r
                } else {
                    0.0
                };
                let mut g = vec![s * y; n];
                g[coord - block_start] = q * (y - t) + kink_term + s * others;
                g
            });
            players.push(PlayerSpec::new(i, j, bounds, cost).with_subgradient(sub));
        }
        graphs.push(graph.build(i, c.size)?);
        offset += c.size;
    }
    assemble_game(players, graphs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const BENCH: &str = r#"
[game]
kind = "cournot"

[graph]
kind = "ring"
self_weight = 0.5

[params]
alpha = 0.1
max_iters = 2000
seeds = [1, 2]
"#;

    #[test]
    fn benchmark_config_loads() {
        let c = parse_config(BENCH, "bench.toml").unwrap();
        assert_eq!(c.params.alpha, 0.1);
        assert_eq!(c.game, GameSection::Cournot { bounds: [0.0, 60.0] });
        assert_eq!(c.params.mu_mode, SmoothingMode::Harmonic);
        assert_eq!(c.alphas(), vec![0.1]);
        assert_eq!(c.build_game().unwrap().num_players(), 24);
    }

    #[test]
    fn negative_alpha_is_a_validation_error() {
        let text = BENCH.replace("alpha = 0.1", "alpha = -1.0");
        match parse_config(&text, "x") {
            Err(ConfigError::Validation(v)) => assert!(v.iter().any(|m| m.starts_with("alpha must be > 0")), "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_params_section() {
        let text = BENCH.split("[params]").next().unwrap();
        assert_eq!(
            parse_config(text, "x"),
            Err(ConfigError::Validation(vec!["missing [params] section".into()]))
        );
    }

    #[test]
    fn all_violations_are_listed() {
        let text = BENCH
            .replace("alpha = 0.1", "alpha = 0.0\nmu0 = -2.0\nrecord_every = 0")
            .replace("self_weight = 0.5", "self_weight = 1.5");
        let Err(ConfigError::Validation(v)) = parse_config(&text, "x") else {
            panic!("expected validation error")
        };
        assert_eq!(v.len(), 5, "{v:?}");
    }

    #[test]
    fn unknown_key_reports_line_and_field() {
        let text = BENCH.replace("max_iters = 2000", "max_iters = 2000\nmax_iter = 3");
        match parse_config(&text, "cfg.toml") {
            Err(ConfigError::Parse { line, field, .. }) => {
                assert_eq!(line, 12);
                assert_eq!(field.as_deref(), Some("max_iter"));
            }
            other => panic!("{other:?}"),
        }
        let text = BENCH.replace("[graph]", "[graph]\ncolour = 1");
        assert!(matches!(parse_config(&text, "x"), Err(ConfigError::Parse { .. })));
        let text = format!("{BENCH}\n[extra]\nx = 1\n");
        assert!(matches!(parse_config(&text, "x"), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn syntax_error_has_position() {
        let text = BENCH.replace("alpha = 0.1", "alpha = = 0.1");
        let Err(ConfigError::Parse { line, .. }) = parse_config(&text, "x") else {
            panic!()
        };
        assert_eq!(line, 10);
    }

    #[test]
    fn missing_file_is_io() {
        assert!(matches!(load_config("/nonexistent/cfg.toml"), Err(ConfigError::Io { .. })));
    }

    #[test]
    fn custom_game_costs_and_subgradients() {
        let c = CustomCoalition {
            size: 2,
            bounds: [-5.0, 5.0],
            curvature: 2.0,
            target: vec![1.0, -1.0],
            abs_weight: 0.5,
            kink: 0.0,
            coupling: 0.1,
        };
        let g = build_custom(&[c.clone(), CustomCoalition { size: 1, target: vec![0.0], ..c }], &GraphKind::Complete)
            .unwrap();
        let x = [2.0, 1.0, 3.0];
        // player (0,0): (2-1)^2 + 0.5*2 + 0.1*2*(1+3)
        let id = g.owner(0);
        assert!((g.evaluate(id, &x).unwrap() - (1.0 + 1.0 + 0.8)).abs() < 1e-12);
        let sub = g.subgradient(id, &x).unwrap();
        assert!((sub[0] - (2.0 + 0.5 + 0.4)).abs() < 1e-12);
        assert!((sub[1] - 0.2).abs() < 1e-12);
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6f64..1e6, Just(0.0), Just(1e-8), Just(0.1)]
    }

    fn game_strategy() -> impl Strategy<Value = GameSection> {
        let cournot = (0.0f64..10.0, 10.0f64..100.0).prop_map(|(l, u)| GameSection::Cournot { bounds: [l, u] });
        let coalition = (1usize..4).prop_flat_map(|n| {
            (
                Just(n),
                -10.0f64..0.0,
                0.0f64..10.0,
                0.0f64..5.0,
                proptest::collection::vec(finite(), n),
                0.0f64..2.0,
                finite(),
                -1.0f64..1.0,
            )
                .prop_map(|(size, l, u, q, target, r, k, s)| CustomCoalition {
                    size,
                    bounds: [l, u],
                    curvature: q,
                    target,
                    abs_weight: r,
                    kink: k,
                    coupling: s,
                })
        });
        let custom = proptest::collection::vec(coalition, 1..4).prop_map(|coalitions| GameSection::Custom { coalitions });
        prop_oneof![cournot, custom]
    }

    fn config_strategy() -> impl Strategy<Value = RunConfig> {
        let graph = prop_oneof![
            (0.01f64..0.99).prop_map(|w| GraphSection::Ring { self_weight: w }),
            Just(GraphSection::Complete),
        ];
        let mode = prop_oneof![
            Just(SmoothingMode::Constant),
            Just(SmoothingMode::Harmonic),
            Just(SmoothingMode::PlayerHarmonic)
        ];
        let params = (
            1e-6f64..1.0,
            proptest::option::of(proptest::collection::vec(1e-6f64..1.0, 1..5)),
            (1e-4f64..1.0, mode, 0.0f64..1e-4),
            0usize..100_000,
            proptest::collection::vec(0u64..=i64::MAX as u64, 1..5),
            (1usize..10, 0usize..8),
            proptest::option::of(1e-12f64..1.0),
        )
            .prop_map(|(alpha, alphas, (mu0, mu_mode, mu_min), max_iters, seeds, (record_every, workers), stop_tol)| {
                ParamsSection {
                    alpha,
                    alphas,
                    mu0,
                    mu_mode,
                    mu_min,
                    max_iters,
                    seeds,
                    record_every,
                    workers,
                    stop_tol,
                    conservation_tol: 1e-9,
                }
            });
        let analysis = (proptest::option::of(1e-3f64..10.0), 1e-4f64..1.0, 2usize..5000, 1usize..500, 0u64..1000)
            .prop_map(|(chi, mu_ref, lipschitz_samples, alpha_grid, seed)| AnalysisSection {
                chi,
                lipschitz: None,
                mu_ref,
                tol: 1e-8,
                lipschitz_samples,
                chi_samples: 100,
                alpha_grid,
                seed,
            });
        let output = (proptest::option::of("[a-z]{1,8}(/[a-z]{1,8})?"), proptest::sample::subsequence(all_formats(), 0..=3))
            .prop_map(|(directory, formats)| OutputSection { directory, formats });
        (game_strategy(), graph, params, analysis, output).prop_map(|(game, graph, params, analysis, output)| RunConfig {
            game,
            graph,
            params,
            analysis,
            output,
        })
    }

    proptest! {
        #[test]
        fn config_round_trip(cfg in config_strategy()) {
            prop_assume!(cfg.violations().is_empty());
            let text = config_to_string(&cfg);
            prop_assert_eq!(parse_config(&text, "roundtrip").unwrap(), cfg);
        }
    }

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        let mut cfg = parse_config(BENCH, "x").unwrap();
        cfg.graph = GraphSection::Custom {
            matrices: vec![vec![vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0]; 6]],
        };
        cfg.analysis.lipschitz = Some(vec![1.0; 24]);
        write_config(&cfg, &path).unwrap();
        assert_eq!(load_config(&path).unwrap(), cfg);
    }
}
