//! Gaussian smoothing and the randomized gradient-free oracle.
//!
//! For player `j` of coalition `i` the oracle perturbs the coalition's block
//! `x^i` along a standard normal direction `xi` scaled by `mu` and returns,
//! for every member `k` of the coalition,
//!
//! ```text
//! pi_jk(x) = (f_j(x^i + mu xi, x^-i) - f_j(x)) / mu * xi[k]
//! ```
//!
//! Its expectation is the partial gradient of the Gaussian-smoothed cost
//! `f_mu(x) = E[f(x^i + mu xi, x^-i)]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameSpec, PlayerId};

/// Stream cipher backing every random draw in the crate.
pub type PlayerRng = ChaCha20Rng;

/// Human-readable description of the random number pipeline, stored in run metadata.
pub const RNG_ALGORITHM: &str =
    "ChaCha20 (rand_chacha 0.9, seed_from_u64, one stream per player); normals: rand_distr 0.5 StandardNormal (ziggurat)";

/// Default lower bound on `mu` under a decaying schedule.
pub const DEFAULT_MU_MIN: f64 = 1e-8;

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> PlayerRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` independent standard normal components.
pub fn draw_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingMode {
    /// `mu_t = mu0`
    Constant,
    /// `mu_t = max(mu0 / (t + 1), mu_min)` with `t` the iteration counter
    Harmonic,
    /// `mu = mu0 / (k + 1)` with `k` the one-based player index, constant in time
    PlayerHarmonic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingSchedule {
    mu0: f64,
    mode: SmoothingMode,
    mu_min: f64,
}

impl SmoothingSchedule {
    pub fn new(mu0: f64, mode: SmoothingMode) -> Result<Self> {
        Self::with_floor(mu0, mode, DEFAULT_MU_MIN)
    }

    pub fn with_floor(mu0: f64, mode: SmoothingMode, mu_min: f64) -> Result<Self> {
        if !(mu0 > 0.0 && mu0.is_finite()) {
            return Err(Error::InvalidInput(format!("mu0 must be positive, got {mu0}")));
        }
        if !(mu_min > 0.0 && mu_min <= mu0) {
            return Err(Error::InvalidInput(format!("mu_min must lie in (0, mu0], got {mu_min}")));
        }
        Ok(Self { mu0, mode, mu_min })
    }

    pub fn constant(mu: f64) -> Result<Self> {
        Self::new(mu, SmoothingMode::Constant)
    }

    pub fn harmonic(mu0: f64) -> Result<Self> {
        Self::new(mu0, SmoothingMode::Harmonic)
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn mode(&self) -> SmoothingMode {
        self.mode
    }

    pub fn mu_min(&self) -> f64 {
        self.mu_min
    }

    /// Smoothing parameter used at iteration `t` by the player with zero-based
    /// index `player` inside its coalition.
    pub fn value_at(&self, t: usize, player: usize) -> f64 {
        match self.mode {
            SmoothingMode::Constant => self.mu0,
            SmoothingMode::Harmonic => (self.mu0 / (t as f64 + 1.0)).max(self.mu_min),
            SmoothingMode::PlayerHarmonic => self.mu0 / (player as f64 + 2.0),
        }
    }
}

/// One oracle call: a single direction shared by every component `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSample {
    pub player: PlayerId,
    pub direction: Vec<f64>,
    /// `pi_jk` for `k` over the coalition's members
    pub values: Vec<f64>,
    pub mu: f64,
    pub base_cost: f64,
    pub perturbed_cost: f64,
}

/// Number of cost evaluations spent by one [`oracle_pi`] call.
pub const EVALS_PER_ORACLE: u64 = 2;

/// Evaluate the gradient-free oracle of `player` at `x` along `xi`.
///
/// The perturbed point is not projected back onto the action set.
pub fn oracle_pi(game: &GameSpec, player: PlayerId, x: &[f64], mu: f64, xi: &[f64]) -> Result<OracleSample> {
    game.check_profile(x)?;
    if !(mu > 0.0) {
        return Err(Error::InvalidInput(format!("smoothing parameter must be positive, got {mu}")));
    }
    let block = game.block(player.coalition);
    if xi.len() != block.len() {
        return Err(Error::DimensionMismatch(format!(
            "direction has {} entries, coalition {} has {} players",
            xi.len(),
            player.coalition,
            block.len()
        )));
    }
    let base_cost = game.evaluate(player, x)?;
    let mut shifted = x.to_vec();
    for (v, d) in shifted[block].iter_mut().zip(xi) {
        *v += mu * d;
    }
    let perturbed_cost = game.evaluate(player, &shifted)?;
    let scale = (perturbed_cost - base_cost) / mu;
    Ok(OracleSample {
        player,
        direction: xi.to_vec(),
        values: xi.iter().map(|d| scale * d).collect(),
        mu,
        base_cost,
        perturbed_cost,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Monte-Carlo estimate of `f_mu(x)` for one player.
///
/// Each of the `samples` directions is used together with its mirror image
/// `-xi`; the pair average has the same expectation and never falls below
/// `f(x)` when `f` is convex in the coalition block.
pub fn smoothed_value<R: Rng + ?Sized>(
    game: &GameSpec,
    player: PlayerId,
    x: &[f64],
    mu: f64,
    samples: usize,
    rng: &mut R,
) -> Result<SmoothedEstimate> {
    game.check_profile(x)?;
    if samples == 0 {
        return Err(Error::InvalidInput("at least one sample is required".into()));
    }
    if !(mu >= 0.0) {
        return Err(Error::InvalidInput(format!("smoothing parameter must be nonnegative, got {mu}")));
    }
    let block = game.block(player.coalition);
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for s in 0..samples {
        for c in block.clone() {
            let d: f64 = rng.sample(StandardNormal);
            plus[c] = x[c] + mu * d;
            minus[c] = x[c] - mu * d;
        }
        let v = 0.5 * (game.evaluate(player, &plus)? + game.evaluate(player, &minus)?);
        // Welford
        let delta = v - mean;
        mean += delta / (s + 1) as f64;
        m2 += delta * (v - mean);
    }
    let stderr = if samples > 1 {
        (m2 / (samples - 1) as f64 / samples as f64).sqrt()
    } else {
        0.0
    };
    Ok(SmoothedEstimate { estimate: mean, stderr })
}

/// Result of testing `f(x) <= f_mu(x) <= f(x) + mu D` at 3 standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichCheck {
    pub holds: bool,
    pub value: f64,
    pub smoothed: SmoothedEstimate,
    pub upper: f64,
}

pub fn check_sandwich<R: Rng + ?Sized>(
    game: &GameSpec,
    player: PlayerId,
    x: &[f64],
    mu: f64,
    lipschitz: f64,
    samples: usize,
    rng: &mut R,
) -> Result<SandwichCheck> {
    let value = game.evaluate(player, x)?;
    let smoothed = smoothed_value(game, player, x, mu, samples, rng)?;
    let slack = 3.0 * smoothed.stderr;
    let upper = value + mu * lipschitz;
    let holds = value - slack <= smoothed.estimate && smoothed.estimate <= upper + slack;
    Ok(SandwichCheck {
        holds,
        value,
        smoothed,
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{assemble_game, BoxConstraint, CostOracle, PlayerSpec};
    use crate::graph::CoalitionGraph;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    /// Single coalition of `n` players all sharing cost `f`.
    fn shared_cost_game<F>(n: usize, f: F) -> GameSpec
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + Clone + 'static,
    {
        let b = BoxConstraint::new(-10.0, 10.0).unwrap();
        let players = (0..n)
            .map(|j| PlayerSpec::new(0, j, b, CostOracle::new(f.clone())))
            .collect();
        assemble_game(players, vec![CoalitionGraph::complete(n)]).unwrap()
    }

    fn p0() -> PlayerId {
        PlayerId::new(0, 0)
    }

    #[test]
    fn schedule_values() {
        let h = SmoothingSchedule::harmonic(0.1).unwrap();
        assert_eq!(h.value_at(0, 3), 0.1);
        assert_eq!(h.value_at(9, 0), 0.1 / 10.0);
        let floored = SmoothingSchedule::with_floor(0.1, SmoothingMode::Harmonic, 1e-3).unwrap();
        assert_eq!(floored.value_at(1_000_000, 0), 1e-3);
        let c = SmoothingSchedule::constant(0.3).unwrap();
        assert_eq!(c.value_at(500, 2), 0.3);
        let p = SmoothingSchedule::new(0.1, SmoothingMode::PlayerHarmonic).unwrap();
        assert_eq!(p.value_at(0, 0), 0.1 / 2.0);
        assert_eq!(p.value_at(77, 5), 0.1 / 7.0);
        assert!(SmoothingSchedule::constant(0.0).is_err());
        assert!(SmoothingSchedule::with_floor(0.1, SmoothingMode::Harmonic, 0.2).is_err());
    }

    #[test]
    fn harmonic_schedule_positive_and_nonincreasing() {
        let h = SmoothingSchedule::harmonic(0.1).unwrap();
        let mut prev = f64::INFINITY;
        for t in [0usize, 1, 2, 10, 1000, 10_000_000, 1 << 40] {
            let v = h.value_at(t, 0);
            assert!(v > 0.0 && v <= prev);
            prev = v;
        }
    }

    #[test]
    fn directions_reproducible() {
        let a = draw_direction(&mut stream_rng(42, 3), 6);
        let b = draw_direction(&mut stream_rng(42, 3), 6);
        let c = draw_direction(&mut stream_rng(42, 4), 6);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 6);
    }

    #[test]
    fn direction_moments() {
        let mut rng = stream_rng(7, 0);
        let n = 1_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let v: f64 = rng.sample(StandardNormal);
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 3e-3, "mean {mean}");
        assert!((var - 1.0).abs() < 5e-3, "var {var}");
    }

    #[test]
    fn linear_oracle_exact() {
        let c = [1.5, -2.0, 0.5];
        let g = shared_cost_game(3, move |x: &[f64]| c.iter().zip(x).map(|(a, b)| a * b).sum());
        let xi = [0.3, -1.2, 2.0];
        let ctxi: f64 = c.iter().zip(&xi).map(|(a, b)| a * b).sum();
        for mu in [1e-3, 0.1, 5.0] {
            let s = oracle_pi(&g, p0(), &[1.0, 2.0, 3.0], mu, &xi).unwrap();
            for (v, d) in s.values.iter().zip(&xi) {
                assert!((v - ctxi * d).abs() < 1e-9 * (1.0 + ctxi.abs()) / mu.min(1.0));
            }
        }
    }

    #[test]
    fn constant_oracle_zero() {
        let g = shared_cost_game(2, |_: &[f64]| 7.0);
        let s = oracle_pi(&g, p0(), &[0.0, 0.0], 0.2, &[1.0, -3.0]).unwrap();
        assert_eq!(s.values, vec![0.0, 0.0]);
        assert_eq!(s.base_cost, 7.0);
    }

    #[test]
    fn oracle_spends_two_evaluations_and_skips_projection() {
        let count = Arc::new(AtomicUsize::new(0));
        let seen = Arc::new(std::sync::Mutex::new(Vec::new()));
        let (c2, s2) = (count.clone(), seen.clone());
        let b = BoxConstraint::new(0.0, 1.0).unwrap();
        let cost = CostOracle::new(move |x: &[f64]| {
            c2.fetch_add(1, Ordering::SeqCst);
            s2.lock().unwrap().push(x[0]);
            x[0]
        });
        let g = assemble_game(vec![PlayerSpec::new(0, 0, b, cost)], vec![CoalitionGraph::complete(1)]).unwrap();
        oracle_pi(&g, p0(), &[1.0], 0.5, &[2.0]).unwrap();
        assert_eq!(count.load(Ordering::SeqCst) as u64, EVALS_PER_ORACLE);
        // 1.0 + 0.5 * 2.0 lies outside [0, 1] and must be evaluated as is
        assert_eq!(*seen.lock().unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn oracle_input_errors() {
        let g = shared_cost_game(2, |_: &[f64]| 0.0);
        assert!(oracle_pi(&g, p0(), &[0.0, 0.0], 0.0, &[1.0, 1.0]).is_err());
        assert!(oracle_pi(&g, p0(), &[0.0, 0.0], 0.1, &[1.0]).is_err());
        assert!(oracle_pi(&g, p0(), &[0.0], 0.1, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn quadratic_oracle_unbiased() {
        let g = shared_cost_game(3, |x: &[f64]| x.iter().map(|v| v * v).sum());
        let x = [0.5, -1.0, 2.0];
        let mut rng = stream_rng(11, 1);
        let n = 1_000_000;
        let mut sum = [0.0; 3];
        let mut sq = [0.0; 3];
        for _ in 0..n {
            let xi = draw_direction(&mut rng, 3);
            let s = oracle_pi(&g, p0(), &x, 0.1, &xi).unwrap();
            for k in 0..3 {
                sum[k] += s.values[k];
                sq[k] += s.values[k] * s.values[k];
            }
        }
        for k in 0..3 {
            let mean = sum[k] / n as f64;
            let var = sq[k] / n as f64 - mean * mean;
            let se = (var / n as f64).sqrt();
            assert!((mean - 2.0 * x[k]).abs() <= 3.0 * se, "k={k} mean={mean} se={se}");
        }
    }

    #[test]
    fn smoothing_of_linear_is_exact() {
        let g = shared_cost_game(2, |x: &[f64]| 3.0 * x[0] - x[1] + 1.0);
        let x = [0.4, -0.7];
        let est = smoothed_value(&g, p0(), &x, 0.8, 1000, &mut stream_rng(1, 0)).unwrap();
        let f = 3.0 * 0.4 + 0.7 + 1.0;
        assert!((est.estimate - f).abs() <= 3.0 * est.stderr + 1e-12);
    }

    #[test]
    fn smoothing_of_square_norm() {
        let g = shared_cost_game(2, |x: &[f64]| x.iter().map(|v| v * v).sum());
        let est = smoothed_value(&g, p0(), &[0.0, 0.0], 0.5, 1_000_000, &mut stream_rng(2, 0)).unwrap();
        // E||mu xi||^2 = mu^2 n
        assert!((est.estimate - 0.5).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn sandwich_absolute_value() {
        let g = shared_cost_game(1, |x: &[f64]| x[0].abs());
        let mut rng = stream_rng(3, 0);
        let ok = check_sandwich(&g, p0(), &[0.0], 0.1, 1.0, 100_000, &mut rng).unwrap();
        assert!(ok.holds);
        let expected = 0.1 * (2.0 / std::f64::consts::PI).sqrt();
        assert!((ok.smoothed.estimate - expected).abs() < 1e-3, "{ok:?}");
        let bad = check_sandwich(&g, p0(), &[0.0], 0.1, 0.5, 100_000, &mut rng).unwrap();
        assert!(!bad.holds);
    }

    #[test]
    fn sandwich_constant() {
        let g = shared_cost_game(3, |_: &[f64]| -2.0);
        let r = check_sandwich(&g, p0(), &[1.0, 2.0, 3.0], 0.7, 0.0, 50, &mut stream_rng(0, 0)).unwrap();
        assert!(r.holds);
        assert_eq!(r.smoothed.estimate, -2.0);
    }

    #[test]
    fn oracle_second_moment_bounded() {
        // f = |x_0| + |x_1| has Lipschitz constant sqrt(2)
        let n_i = 2;
        let d = 2f64.sqrt();
        let g = shared_cost_game(n_i, |x: &[f64]| x[0].abs() + x[1].abs());
        let mut rng = stream_rng(5, 9);
        let draws = 200_000;
        let mut total = 0.0;
        for _ in 0..draws {
            let xi = draw_direction(&mut rng, n_i);
            let s = oracle_pi(&g, p0(), &[0.3, -0.1], 0.05, &xi).unwrap();
            total += s.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        }
        let mean = total / draws as f64;
        assert!(mean <= ((n_i + 4) as f64).sqrt() * d * 1.05, "mean norm {mean}");
    }
}
