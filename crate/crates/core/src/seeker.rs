//! Synchronous projected action updates with consensus-based gradient tracking.
//!
//! Every player `j` of coalition `i` holds its action `x_j` and one tracker
//! `phi_jk` for each member `k` of its coalition. One round performs
//!
//! ```text
//! x_j   <- P[x_j - alpha * phi_jj]
//! phi_jk <- sum_l A[j][l] phi_lk + pi_jk(x_new) - pi_jk(x_old)
//! ```
//!
//! for all players from the same snapshot. Because every `A^i` is doubly
//! stochastic, the column means of the trackers equal the column means of the
//! latest oracle outputs; this is checked after every round.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{ActionProfile, GameSpec};
use crate::smoothing::{
    draw_direction, oracle_pi, stream_rng, OracleSample, PlayerRng, SmoothingSchedule, EVALS_PER_ORACLE, RNG_ALGORITHM,
};

/// Default bound on the conservation residual checked after each round.
pub const DEFAULT_CONSERVATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmParams {
    pub alpha: f64,
    pub mu: SmoothingSchedule,
    pub max_iters: usize,
    pub seed: u64,
    pub record_every: usize,
    /// Stop once `||x_{t+1} - x_t|| / alpha` drops to this value.
    pub stop_tol: Option<f64>,
    /// Worker threads for the per-player oracle calls; 0 or 1 runs inline.
    pub workers: usize,
    pub conservation_tol: f64,
}

impl AlgorithmParams {
    pub fn new(alpha: f64, mu: SmoothingSchedule, max_iters: usize, seed: u64) -> Result<Self> {
        let p = Self {
            alpha,
            mu,
            max_iters,
            seed,
            record_every: 1,
            stop_tol: None,
            workers: 1,
            conservation_tol: DEFAULT_CONSERVATION_TOL,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidInput("record_every must be at least 1".into()));
        }
        if let Some(tol) = self.stop_tol {
            if !(tol > 0.0) {
                return Err(Error::InvalidInput(format!("stop_tol must be > 0, got {tol}")));
            }
        }
        if !(self.conservation_tol > 0.0) {
            return Err(Error::InvalidInput("conservation_tol must be > 0".into()));
        }
        Ok(())
    }
}

/// Random stream feeding the player at global coordinate `coord`.
/// Stream 0 is reserved for sampling the initial profile.
pub fn player_stream(seed: u64, coord: usize) -> PlayerRng {
    stream_rng(seed, coord as u64 + 1)
}

pub fn init_stream(seed: u64) -> PlayerRng {
    stream_rng(seed, 0)
}

/// Gradient trackers of every coalition, stored row-major as `phi[j * n_i + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackerState {
    blocks: Vec<Vec<f64>>,
    sizes: Vec<usize>,
}

impl TrackerState {
    fn from_samples(game: &GameSpec, samples: &[OracleSample]) -> Self {
        let sizes = game.coalition_sizes();
        let blocks = (0..game.num_coalitions())
            .map(|i| {
                game.block(i)
                    .flat_map(|c| samples[c].values.iter().copied())
                    .collect()
            })
            .collect();
        Self { blocks, sizes }
    }

    pub fn get(&self, coalition: usize, j: usize, k: usize) -> f64 {
        self.blocks[coalition][j * self.sizes[coalition] + k]
    }

    /// Trackers `phi_j.` held by player `j`.
    pub fn row(&self, coalition: usize, j: usize) -> &[f64] {
        let n = self.sizes[coalition];
        &self.blocks[coalition][j * n..(j + 1) * n]
    }

    /// Column means `mean_j phi_jk` for each `k`.
    pub fn column_means(&self, coalition: usize) -> Vec<f64> {
        let n = self.sizes[coalition];
        let block = &self.blocks[coalition];
        (0..n)
            .map(|k| (0..n).map(|j| block[j * n + k]).sum::<f64>() / n as f64)
            .collect()
    }

    /// `sum_k ||phi_.k - 1 mean_j phi_jk||^2` for one coalition.
    pub fn consensus_error(&self, coalition: usize) -> f64 {
        let n = self.sizes[coalition];
        let block = &self.blocks[coalition];
        self.column_means(coalition)
            .iter()
            .enumerate()
            .map(|(k, m)| (0..n).map(|j| (block[j * n + k] - m).powi(2)).sum::<f64>())
            .sum()
    }

    /// Total tracking error summed over coalitions.
    pub fn tracking_error(&self) -> f64 {
        (0..self.sizes.len()).map(|i| self.consensus_error(i)).sum()
    }
}

#[derive(Debug, Clone)]
pub struct SeekerState {
    t: usize,
    x: ActionProfile,
    trackers: TrackerState,
    cached: Vec<OracleSample>,
    rngs: Vec<PlayerRng>,
    oracle_evals: u64,
    conservation_residual: f64,
}

impl SeekerState {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn x(&self) -> &ActionProfile {
        &self.x
    }

    pub fn trackers(&self) -> &TrackerState {
        &self.trackers
    }

    /// Oracle outputs at the current profile, in global coordinate order.
    pub fn cached_samples(&self) -> &[OracleSample] {
        &self.cached
    }

    pub fn oracle_evals(&self) -> u64 {
        self.oracle_evals
    }

    /// Largest `|mean_j phi_jk - mean_j pi_jk(x_t)|` after the last round.
    pub fn conservation_residual(&self) -> f64 {
        self.conservation_residual
    }
}

fn conservation_residual(game: &GameSpec, trackers: &TrackerState, samples: &[OracleSample]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..game.num_coalitions() {
        let n = game.coalition_size(i);
        let means = trackers.column_means(i);
        for (k, m) in means.iter().enumerate() {
            let target = game.block(i).map(|c| samples[c].values[k]).sum::<f64>() / n as f64;
            worst = worst.max((m - target).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

fn sample_all(
    game: &GameSpec,
    x: &[f64],
    t: usize,
    mu: &SmoothingSchedule,
    rngs: &mut [PlayerRng],
    exec: Execution,
) -> Result<Vec<OracleSample>> {
    let one = |(c, rng): (usize, &mut PlayerRng)| {
        let id = game.owner(c);
        let xi = draw_direction(rng, game.coalition_size(id.coalition));
        oracle_pi(game, id, x, mu.value_at(t, id.player), &xi)
    };
    match exec {
        Execution::Sequential => rngs.iter_mut().enumerate().map(one).collect(),
        Execution::Parallel => rngs.par_iter_mut().enumerate().map(one).collect(),
    }
}

fn check_finite(t: usize, what: &str, x: &[f64], values: &[f64]) -> Result<()> {
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NumericalOverflow {
            t,
            detail: format!("{what}[{pos}] = {}; x = {:?}", values[pos], x),
        });
    }
    Ok(())
}

/// Build the initial state; `x0` defaults to a uniform draw from the boxes.
pub fn init(game: &GameSpec, params: &AlgorithmParams, x0: Option<&[f64]>) -> Result<SeekerState> {
    params.validate()?;
    let x = match x0 {
        Some(v) => {
            game.check_profile(v)?;
            for (c, (p, &val)) in game.players().zip(v).enumerate() {
                if !p.bounds.contains(val) {
                    return Err(Error::X0OutOfBounds {
                        coord: c,
                        value: val,
                        lower: p.bounds.lower(),
                        upper: p.bounds.upper(),
                    });
                }
            }
            v.to_vec()
        }
        None => {
            let mut rng = init_stream(params.seed);
            game.players()
                .map(|p| p.bounds.lower() + p.bounds.width() * rng.random::<f64>())
                .collect()
        }
    };
    let mut rngs: Vec<PlayerRng> = (0..game.num_players()).map(|c| player_stream(params.seed, c)).collect();
    let cached = sample_all(game, &x, 0, &params.mu, &mut rngs, Execution::Sequential)?;
    for s in &cached {
        check_finite(0, "pi", &x, &s.values)?;
    }
    let trackers = TrackerState::from_samples(game, &cached);
    Ok(SeekerState {
        t: 0,
        x: ActionProfile::new(x),
        trackers,
        cached,
        rngs,
        oracle_evals: EVALS_PER_ORACLE * game.num_players() as u64,
        conservation_residual: 0.0,
    })
}

/// Advance all players by one synchronous round.
pub fn step(state: &mut SeekerState, game: &GameSpec, params: &AlgorithmParams) -> Result<()> {
    step_with(state, game, params, Execution::Sequential)
}

pub fn step_with(state: &mut SeekerState, game: &GameSpec, params: &AlgorithmParams, exec: Execution) -> Result<()> {
    let t_next = state.t + 1;

    // (a) each player descends along its own-coordinate tracker
    let mut x_next = state.x.to_vec();
    for (c, p) in game.players().enumerate() {
        let phi_own = state.trackers.get(p.id.coalition, p.id.player, p.id.player);
        x_next[c] = p.bounds.project(state.x[c] - params.alpha * phi_own);
    }
    check_finite(t_next, "x", &state.x, &x_next)?;

    // (b) fresh direction per player at the new profile
    let fresh = sample_all(game, &x_next, t_next, &params.mu, &mut state.rngs, exec)?;
    for s in &fresh {
        check_finite(t_next, "pi", &x_next, &s.values)?;
    }

    // (c) mix trackers and add the oracle increment
    let mut blocks = Vec::with_capacity(game.num_coalitions());
    for i in 0..game.num_coalitions() {
        let coalition = game.coalition(i);
        let n = coalition.size();
        let graph = coalition.graph();
        let offset = coalition.block().start;
        let old = &state.trackers.blocks[i];
        let mut next = vec![0.0; n * n];
        for j in 0..n {
            let new_pi = &fresh[offset + j].values;
            let old_pi = &state.cached[offset + j].values;
            for k in 0..n {
                let mixed: f64 = (0..n).map(|l| graph.weight(j, l) * old[l * n + k]).sum();
                next[j * n + k] = mixed + new_pi[k] - old_pi[k];
            }
        }
        check_finite(t_next, "phi", &x_next, &next)?;
        blocks.push(next);
    }

    state.trackers.blocks = blocks;
    state.cached = fresh;
    state.x = ActionProfile::new(x_next);
    state.t = t_next;
    state.oracle_evals += EVALS_PER_ORACLE * game.num_players() as u64;

    let residual = conservation_residual(game, &state.trackers, &state.cached);
    state.conservation_residual = residual;
    if residual > params.conservation_tol {
        return Err(Error::ConservationViolation {
            t: t_next,
            residual,
            tol: params.conservation_tol,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub alpha: f64,
    pub seed: u64,
    pub mu0: f64,
    pub mu_mode: crate::smoothing::SmoothingMode,
    pub mu_min: f64,
    pub max_iters: usize,
    pub record_every: usize,
    pub stop_tol: Option<f64>,
    pub coalition_sizes: Vec<usize>,
    pub rng_algorithm: &'static str,
    pub version: &'static str,
}

/// Snapshot taken at a recorded iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordedStep {
    pub t: usize,
    pub x: Vec<f64>,
    pub nash_gap: Option<f64>,
    pub tracking_error: f64,
    pub consensus_error: Vec<f64>,
    pub conservation_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub iterations: usize,
    pub stopped_early: bool,
    pub final_x: Vec<f64>,
    pub initial_gap: Option<f64>,
    pub final_gap: Option<f64>,
    pub final_tracking_error: f64,
    pub max_conservation_residual: f64,
    pub oracle_evals: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub metadata: RunMetadata,
    pub series: Vec<RecordedStep>,
    pub summary: RunSummary,
}

impl RunRecord {
    /// Gap series `(t, ||x_t - x*||)` when a reference was supplied.
    pub fn gap_series(&self) -> Vec<(usize, f64)> {
        self.series.iter().filter_map(|s| s.nash_gap.map(|g| (s.t, g))).collect()
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt()
}

fn snapshot(game: &GameSpec, state: &SeekerState, reference: Option<&[f64]>) -> RecordedStep {
    RecordedStep {
        t: state.t,
        x: state.x.to_vec(),
        nash_gap: reference.map(|r| distance(&state.x, r)),
        tracking_error: state.trackers.tracking_error(),
        consensus_error: (0..game.num_coalitions()).map(|i| state.trackers.consensus_error(i)).collect(),
        conservation_residual: state.conservation_residual,
    }
}

/// Run the seeker for `params.max_iters` rounds (or until `stop_tol`).
///
/// `reference` is an equilibrium used only to record `||x_t - x*||`.
pub fn run(
    game: &GameSpec,
    params: &AlgorithmParams,
    x0: Option<&[f64]>,
    reference: Option<&[f64]>,
) -> Result<RunRecord> {
    if let Some(r) = reference {
        game.check_profile(r)?;
    }
    if params.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(params.workers)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
        pool.install(|| run_inner(game, params, x0, reference, Execution::Parallel))
    } else {
        run_inner(game, params, x0, reference, Execution::Sequential)
    }
}

fn run_inner(
    game: &GameSpec,
    params: &AlgorithmParams,
    x0: Option<&[f64]>,
    reference: Option<&[f64]>,
    exec: Execution,
) -> Result<RunRecord> {
    let mut state = init(game, params, x0)?;
    let mut series = vec![snapshot(game, &state, reference)];
    let initial_gap = series[0].nash_gap;
    let mut max_residual: f64 = 0.0;
    let mut stopped_early = false;

    while state.t < params.max_iters {
        let prev = state.x.to_vec();
        step_with(&mut state, game, params, exec)?;
        max_residual = max_residual.max(state.conservation_residual);
        let last = state.t == params.max_iters;
        if let Some(tol) = params.stop_tol {
            if distance(&state.x, &prev) / params.alpha <= tol {
                stopped_early = !last;
            }
        }
        if state.t % params.record_every == 0 || last || stopped_early {
            series.push(snapshot(game, &state, reference));
        }
        if stopped_early {
            break;
        }
    }

    let summary = RunSummary {
        iterations: state.t,
        stopped_early,
        final_x: state.x.to_vec(),
        initial_gap,
        final_gap: reference.map(|r| distance(&state.x, r)),
        final_tracking_error: state.trackers.tracking_error(),
        max_conservation_residual: max_residual,
        oracle_evals: state.oracle_evals,
    };
    let metadata = RunMetadata {
        alpha: params.alpha,
        seed: params.seed,
        mu0: params.mu.mu0(),
        mu_mode: params.mu.mode(),
        mu_min: params.mu.mu_min(),
        max_iters: params.max_iters,
        record_every: params.record_every,
        stop_tol: params.stop_tol,
        coalition_sizes: game.coalition_sizes(),
        rng_algorithm: RNG_ALGORITHM,
        version: env!("CARGO_PKG_VERSION"),
    };
    Ok(RunRecord {
        metadata,
        series,
        summary,
    })
}
