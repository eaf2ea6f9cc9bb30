//! Four-coalition Cournot competition with six firms per coalition.
//!
//! Player `j` (zero-based) of coalition `i` produces `y = x^i_j` at cost
//!
//! ```text
//! f^i_j(x) = 5 y^2 + 5 y + 5 |y - 6 (j + 1)| - y p^i_j(x)
//! p^0_j = 60 - x^0_j - x^1_j - x^2_j - x^3_j
//! p^1_j = 60 - x^1_j
//! p^2_j = 60 - x^0_j - x^1_j
//! p^3_j = 60 - x^0_j - x^1_j - x^2_j
//! ```

use crate::analysis::{nash_oracle, NashOracleOptions, NashReference};
use crate::error::{Error, Result};
use crate::game::{assemble_game, BoxConstraint, CostOracle, GameSpec, PlayerSpec, Subgradient};
use crate::graph::GraphKind;
use crate::seeker::AlgorithmParams;
use crate::smoothing::SmoothingSchedule;
use crate::sweep::{run_sweep, AlphaResult};

pub const NUM_COALITIONS: usize = 4;
pub const COALITION_SIZE: usize = 6;

/// Box applied to every action unless configured otherwise.
pub fn default_box() -> BoxConstraint {
    BoxConstraint::new(0.0, 60.0).expect("static bounds")
}

/// Default communication graph: directed ring with self-weight 0.5.
pub fn default_graph() -> GraphKind {
    GraphKind::Ring { self_weight: 0.5 }
}

fn at(x: &[f64], coalition: usize, player: usize) -> f64 {
    x[coalition * COALITION_SIZE + player]
}

/// Price `p^i_j(x)` seen by player `j` of coalition `i`.
pub fn price(coalition: usize, player: usize, x: &[f64]) -> f64 {
    let sum = |upto: usize| (0..upto).map(|c| at(x, c, player)).sum::<f64>();
    match coalition {
        0 => 60.0 - sum(4),
        1 => 60.0 - at(x, 1, player),
        2 => 60.0 - sum(2),
        3 => 60.0 - sum(3),
        _ => panic!("coalition index {coalition} out of range"),
    }
}

/// Location of the kink in player `j`'s production cost.
pub fn kink(player: usize) -> f64 {
    6.0 * (player + 1) as f64
}

/// `f^i_j(x)`.
pub fn cost(coalition: usize, player: usize, x: &[f64]) -> f64 {
    let y = at(x, coalition, player);
    5.0 * y * y + 5.0 * y + 5.0 * (y - kink(player)).abs() - y * price(coalition, player, x)
}

fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Subgradient of `f^i_j` with respect to the coalition's own block.
/// Only the `j`-th entry is nonzero; the kink contributes 0 when hit exactly.
pub fn analytic_subgradient(coalition: usize, player: usize, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != NUM_COALITIONS * COALITION_SIZE {
        return Err(Error::DimensionMismatch(format!(
            "expected {} actions, got {}",
            NUM_COALITIONS * COALITION_SIZE,
            x.len()
        )));
    }
    let y = at(x, coalition, player);
    // p^0 and p^1 contain the player's own action
    let own_in_price = if coalition <= 1 { y } else { 0.0 };
    let mut g = vec![0.0; COALITION_SIZE];
    g[player] = 10.0 * y + 5.0 + 5.0 * sign0(y - kink(player)) - price(coalition, player, x) + own_in_price;
    Ok(g)
}

/// The 24-player benchmark game.
pub fn build_cournot(bounds: BoxConstraint, graph: &GraphKind) -> Result<GameSpec> {
    let mut players = Vec::with_capacity(NUM_COALITIONS * COALITION_SIZE);
    for i in 0..NUM_COALITIONS {
        for j in 0..COALITION_SIZE {
            let cost_fn = CostOracle::new(move |x: &[f64]| cost(i, j, x));
            let sub = Subgradient::new(move |x: &[f64]| {
                analytic_subgradient(i, j, x).unwrap_or_else(|_| vec![f64::NAN; COALITION_SIZE])
            });
            players.push(PlayerSpec::new(i, j, bounds, cost_fn).with_subgradient(sub));
        }
    }
    let graphs = (0..NUM_COALITIONS)
        .map(|i| graph.build(i, COALITION_SIZE))
        .collect::<Result<Vec<_>>>()?;
    assemble_game(players, graphs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkOptions {
    pub bounds: BoxConstraint,
    pub graph: GraphKind,
    pub mu: SmoothingSchedule,
    pub record_every: usize,
    pub nash_tol: f64,
    /// When known, each step size is compared against it and flagged.
    pub alpha_max: Option<f64>,
    pub conservation_tol: f64,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        Self {
            bounds: default_box(),
            graph: default_graph(),
            mu: SmoothingSchedule::harmonic(0.1).expect("static schedule"),
            record_every: 1,
            nash_tol: 1e-8,
            alpha_max: None,
            conservation_tol: crate::seeker::DEFAULT_CONSERVATION_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub bounds: BoxConstraint,
    pub iters: usize,
    pub seeds: Vec<u64>,
    pub reference: NashReference,
    pub results: Vec<AlphaResult>,
}

impl BenchmarkReport {
    pub fn result(&self, alpha: f64) -> Option<&AlphaResult> {
        self.results.iter().find(|r| r.alpha == alpha)
    }
}

/// Run the seeker for every `(alpha, seed)` pair against a reference
/// equilibrium computed once by [`nash_oracle`].
pub fn run_benchmark(opts: &BenchmarkOptions, alphas: &[f64], iters: usize, seeds: &[u64]) -> Result<BenchmarkReport> {
    if alphas.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidInput("need at least one step size and one seed".into()));
    }
    let game = build_cournot(opts.bounds, &opts.graph)?;
    let reference = nash_oracle(&game, opts.nash_tol, &NashOracleOptions::default())?;

    let mut base = AlgorithmParams::new(alphas[0], opts.mu, iters, seeds[0])?;
    base.record_every = opts.record_every;
    base.conservation_tol = opts.conservation_tol;
    let results = run_sweep(&game, &base, alphas, seeds, Some(&reference.x), opts.alpha_max)?;

    Ok(BenchmarkReport {
        bounds: opts.bounds,
        iters,
        seeds: seeds.to_vec(),
        reference,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{best_response_sweep, vi_residual};
    use approx::assert_abs_diff_eq;
    use nalgebra::{Matrix3, Vector3};
    use rand::Rng;

    fn zeros() -> Vec<f64> {
        vec![0.0; 24]
    }

    fn set(x: &mut [f64], i: usize, j: usize, v: f64) {
        x[i * 6 + j] = v;
    }

    #[test]
    fn first_player_example() {
        let mut x = zeros();
        set(&mut x, 0, 0, 1.0);
        assert_eq!(cost(0, 0, &x), -24.0);
    }

    #[test]
    fn last_coalition_at_origin() {
        for j in 0..6 {
            assert_eq!(cost(3, j, &zeros()), 30.0 * (j + 1) as f64);
        }
    }

    #[test]
    fn second_coalition_isolated() {
        let mut rng = crate::smoothing::stream_rng(3, 0);
        for _ in 0..50 {
            let x: Vec<f64> = (0..24).map(|_| 60.0 * rng.random::<f64>()).collect();
            for j in 0..6 {
                let base = cost(1, j, &x);
                for c in (0..24).filter(|&c| c != 6 + j) {
                    let mut y = x.clone();
                    y[c] = 60.0 * rng.random::<f64>();
                    assert_eq!(cost(1, j, &y), base);
                }
            }
        }
    }

    #[test]
    fn subgradient_examples() {
        let mut x = zeros();
        set(&mut x, 1, 0, 10.0);
        assert_abs_diff_eq!(analytic_subgradient(1, 0, &x).unwrap()[0], 70.0, epsilon = 1e-12);
        // at the kink the absolute value contributes nothing
        let mut x = zeros();
        set(&mut x, 2, 2, 18.0);
        let g = analytic_subgradient(2, 2, &x).unwrap();
        assert_abs_diff_eq!(g[2], 10.0 * 18.0 + 5.0 - 60.0, epsilon = 1e-12);
        assert!(g.iter().enumerate().all(|(k, v)| k == 2 || *v == 0.0));
        assert!(analytic_subgradient(0, 0, &[0.0; 5]).is_err());
    }

    #[test]
    fn subgradients_match_central_differences() {
        let game = build_cournot(default_box(), &default_graph()).unwrap();
        let mut rng = crate::smoothing::stream_rng(11, 0);
        let h = 1e-5;
        let mut checked = 0;
        while checked < 100 {
            let x: Vec<f64> = (0..24).map(|_| 1.0 + 58.0 * rng.random::<f64>()).collect();
            if (0..24).any(|c| (x[c] - kink(c % 6)).abs() < 10.0 * h) {
                continue;
            }
            for p in game.players() {
                let c = game.coord(p.id);
                let analytic = p.subgradient.as_ref().unwrap().eval(&x)[p.id.player];
                let mut up = x.clone();
                let mut down = x.clone();
                up[c] += h;
                down[c] -= h;
                let fd = (p.cost.evaluate(&up).unwrap() - p.cost.evaluate(&down).unwrap()) / (2.0 * h);
                assert!((fd - analytic).abs() <= 1e-5 * analytic.abs().max(1.0), "{fd} vs {analytic}");
                // cost oracle is the formula itself
                assert_eq!(p.cost.evaluate(&x).unwrap(), cost(p.id.coalition, p.id.player, &x));
            }
            checked += 1;
        }
    }

    /// Interior equilibrium below every kink, solved from first-order conditions:
    /// coalition 1 gives y = 5; the others satisfy a 3x3 linear system.
    fn closed_form_equilibrium() -> [f64; 4] {
        let x1 = 5.0;
        // 12 x0 + x2 + x3 = 60 - x1,  x0 + 10 x2 = 60 - x1,  x0 + x2 + 10 x3 = 60 - x1
        let m = Matrix3::new(12.0, 1.0, 1.0, 1.0, 10.0, 0.0, 1.0, 1.0, 10.0);
        let rhs = Vector3::repeat(60.0 - x1);
        let s = m.lu().solve(&rhs).unwrap();
        [s[0], x1, s[1], s[2]]
    }

    #[test]
    fn nash_reference_matches_first_order_conditions() {
        let game = build_cournot(default_box(), &default_graph()).unwrap();
        let r = nash_oracle(&game, 1e-8, &NashOracleOptions::default()).unwrap();
        let expected = closed_form_equilibrium();
        assert!(expected.iter().all(|&v| v > 0.0 && v < kink(0)));
        for c in 0..24 {
            assert_abs_diff_eq!(r.x[c], expected[c / 6], epsilon = 1e-6);
        }
        assert!(vi_residual(&game, &r.x).unwrap() <= 1e-7);
        let (_, moved) = best_response_sweep(&game, &r.x, 1e-9).unwrap();
        assert!(moved < 1e-5, "{moved}");
    }

    #[test]
    fn zero_iterations_gives_initial_gap_only() {
        let r = run_benchmark(&BenchmarkOptions::default(), &[0.1], 0, &[1]).unwrap();
        let a = &r.results[0];
        assert_eq!(a.mean_gap.len(), 1);
        assert_eq!(a.steady_state_gap, a.initial_gap);
        assert_eq!(a.admissible, None);
    }

    #[test]
    fn benchmark_is_reproducible_and_flags_step_sizes() {
        let opts = BenchmarkOptions {
            alpha_max: Some(0.05),
            ..Default::default()
        };
        let a = run_benchmark(&opts, &[0.02, 0.1], 30, &[4, 5]).unwrap();
        let b = run_benchmark(&opts, &[0.02, 0.1], 30, &[4, 5]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.results[0].admissible, Some(true));
        assert_eq!(a.results[1].admissible, Some(false));
        assert_eq!(a.results[0].runs.len(), 2);
        assert_eq!(a.results[0].runs[1].metadata.seed, 5);
    }

    #[test]
    fn custom_graph_must_match_size() {
        let m = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        assert!(build_cournot(default_box(), &GraphKind::Custom(vec![m])).is_err());
        assert!(build_cournot(default_box(), &GraphKind::Complete).is_ok());
    }
}
