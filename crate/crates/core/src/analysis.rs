//! Convergence constants, admissible step sizes, steady-state bounds and an
//! independent reference solver for the Nash equilibrium.
//!
//! The two-dimensional error system tracks the optimality gap and the
//! gradient-tracking error:
//!
//! ```text
//! M_alpha = [ 1 - k1 a    k2 a + k3 a^2 ]     Upsilon = [ k6 a^2 ]
//!           [ 0           1 - k5 + k4 a^2 ]             [ k7 a^2 ]
//! ```

use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{BoxConstraint, CostOracle, GameSpec};
use crate::graph::coalition_kappa;

/// Inflation applied to the largest sampled difference quotient.
pub const LIPSCHITZ_SAFETY: f64 = 1.2;

fn uniform_point<R: Rng + ?Sized>(bounds: &[BoxConstraint], rng: &mut R) -> Vec<f64> {
    bounds
        .iter()
        .map(|b| b.lower() + b.width() * rng.random::<f64>())
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt()
}

fn project(bounds: &[BoxConstraint], x: &mut [f64]) {
    for (b, v) in bounds.iter().zip(x.iter_mut()) {
        *v = b.project(*v);
    }
}

/// Sampled estimate of the Lipschitz constant of `oracle` over the box.
///
/// At each of `samples` uniform points two difference quotients are taken:
/// one against a second uniform point and one along a finite-difference
/// gradient direction. The largest quotient is inflated by
/// [`LIPSCHITZ_SAFETY`].
pub fn estimate_lipschitz<R: Rng + ?Sized>(
    oracle: &CostOracle,
    bounds: &[BoxConstraint],
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if samples < 2 {
        return Err(Error::InvalidInput("estimate_lipschitz needs at least 2 samples".into()));
    }
    let eval = |x: &[f64]| {
        oracle.evaluate(x).map_err(|reason| Error::OracleFailure {
            coalition: usize::MAX,
            player: usize::MAX,
            reason,
        })
    };
    let n = bounds.len();
    let min_width = bounds
        .iter()
        .map(BoxConstraint::width)
        .filter(|w| *w > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !min_width.is_finite() {
        return Ok(0.0);
    }
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let x = uniform_point(bounds, rng);
        let fx = eval(&x)?;

        let y = uniform_point(bounds, rng);
        let d = distance(&x, &y);
        if d > 0.0 {
            best = best.max((eval(&y)? - fx).abs() / d);
        }

        // finite-difference gradient, then a short step along it
        let mut grad = vec![0.0; n];
        let mut probe = x.clone();
        for c in 0..n {
            let h = 1e-6 * bounds[c].width().max(1e-12);
            let up = x[c] + h <= bounds[c].upper();
            probe[c] = if up { x[c] + h } else { x[c] - h };
            let diff = eval(&probe)? - fx;
            grad[c] = if up { diff / h } else { -diff / h };
            probe[c] = x[c];
        }
        let gn = norm(&grad);
        if gn > 0.0 {
            let s = 1e-3 * min_width;
            for dir in [1.0, -1.0] {
                let mut z: Vec<f64> = x.iter().zip(&grad).map(|(v, g)| v + dir * s * g / gn).collect();
                project(bounds, &mut z);
                let dz = distance(&x, &z);
                if dz > 0.0 {
                    best = best.max((eval(&z)? - fx).abs() / dz);
                }
            }
        }
    }
    Ok(best * LIPSCHITZ_SAFETY)
}

/// Lipschitz estimates for every player in global coordinate order.
pub fn estimate_game_lipschitz<R: Rng + ?Sized>(game: &GameSpec, samples: usize, rng: &mut R) -> Result<Vec<f64>> {
    let bounds = game.bounds();
    game.players()
        .map(|p| {
            estimate_lipschitz(&p.cost, &bounds, samples, rng).map_err(|e| match e {
                Error::OracleFailure { reason, .. } => Error::OracleFailure {
                    coalition: p.id.coalition,
                    player: p.id.player,
                    reason,
                },
                other => other,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConstants {
    /// strong monotonicity constant of the game mapping
    pub chi: f64,
    /// per-player Lipschitz bounds in global coordinate order
    pub lipschitz: Vec<f64>,
    pub mu_ref: f64,
    /// Lipschitz constant of the smoothed partial gradients at `mu_ref`
    pub l: f64,
    /// bound on the oracle's first moment
    pub b: f64,
    pub sigma_bar: f64,
    pub varsigma: f64,
    pub sigmas: Vec<f64>,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub k6: f64,
    pub k7: f64,
}

/// Assemble every constant of the error system from `chi`, per-player
/// Lipschitz bounds and the reference smoothing parameter.
pub fn build_constants(game: &GameSpec, chi: f64, lipschitz: &[f64], mu_ref: f64) -> Result<ConvergenceConstants> {
    if !(chi > 0.0 && chi.is_finite()) {
        return Err(Error::InvalidInput(format!("chi must be > 0, got {chi}")));
    }
    if !(mu_ref > 0.0 && mu_ref.is_finite()) {
        return Err(Error::InvalidInput(format!("mu_ref must be > 0, got {mu_ref}")));
    }
    if lipschitz.len() != game.num_players() {
        return Err(Error::DimensionMismatch(format!(
            "{} Lipschitz bounds for {} players",
            lipschitz.len(),
            game.num_players()
        )));
    }
    if let Some(d) = lipschitz.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
        return Err(Error::InvalidInput(format!("Lipschitz bounds must be finite and >= 0, got {d}")));
    }

    let mut l: f64 = 0.0;
    let mut b: f64 = 0.0;
    for (c, &d) in lipschitz.iter().enumerate() {
        let n_i = game.coalition_size(game.owner(c).coalition) as f64;
        l = l.max(n_i.sqrt() * d / mu_ref);
        b = b.max((n_i + 4.0).sqrt() * d);
    }

    let mut sigmas = Vec::with_capacity(game.num_coalitions());
    let mut sigma_bar: f64 = 0.0;
    let mut varsigma: f64 = 0.0;
    for coalition in game.coalitions() {
        let kappa = coalition_kappa(coalition.graph())?;
        sigmas.push(kappa.sigma);
        sigma_bar = sigma_bar.max(kappa.sigma);
        varsigma = varsigma.max(kappa.varsigma);
    }

    let sizes = game.coalition_sizes();
    let sum_sq: f64 = sizes.iter().map(|&n| (n * n) as f64).sum();
    let sum_sq_n4: f64 = sizes.iter().map(|&n| (n * n * (n + 4)) as f64).sum();
    let big_n = sizes.len() as f64;

    Ok(ConvergenceConstants {
        chi,
        lipschitz: lipschitz.to_vec(),
        mu_ref,
        l,
        b,
        sigma_bar,
        varsigma,
        sigmas,
        k1: chi,
        k2: 1.0 / chi,
        k3: 6.0,
        k4: 12.0 * l * l * varsigma * sum_sq,
        k5: (1.0 - sigma_bar * sigma_bar) / 2.0,
        k6: 6.0 * b * b * sum_sq_n4 + 2.0 * big_n * b * b,
        k7: 12.0 * l * l * b * b * varsigma * sum_sq * sum_sq_n4,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBound {
    pub alpha_max: f64,
    /// `k4 == 0`, so only `1/k1` constrains the step
    pub degenerate: bool,
}

/// Upper end of the admissible step-size interval, `min(1/k1, sqrt(k5/k4))`.
pub fn max_step_size(c: &ConvergenceConstants) -> StepBound {
    let by_gap = 1.0 / c.k1;
    if c.k4 <= 0.0 {
        return StepBound {
            alpha_max: by_gap,
            degenerate: true,
        };
    }
    StepBound {
        alpha_max: by_gap.min((c.k5 / c.k4).sqrt()),
        degenerate: false,
    }
}

/// Spectral radius of the upper-triangular `M_alpha`.
pub fn spectral_radius(alpha: f64, c: &ConvergenceConstants) -> f64 {
    (1.0 - c.k1 * alpha).abs().max(1.0 - c.k5 + c.k4 * alpha * alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub alpha: f64,
    pub alpha_max: f64,
    pub rho: f64,
    /// steady-state bound on `E||x_t - x*||^2`
    pub x_bound: f64,
    /// steady-state bound on the total tracking error
    pub phi_bound: f64,
}

/// Components of `(I - M_alpha)^{-1} Upsilon_alpha`.
pub fn steady_state_bounds(alpha: f64, c: &ConvergenceConstants) -> Result<BoundReport> {
    let alpha_max = max_step_size(c).alpha_max;
    if !(alpha > 0.0 && alpha < alpha_max) {
        return Err(Error::InvalidInput(format!(
            "alpha {alpha} outside the admissible interval (0, {alpha_max})"
        )));
    }
    let a2 = alpha * alpha;
    let gap = c.k5 - c.k4 * a2;
    let x_bound = (c.k6 * a2 * gap + c.k7 * a2 * (c.k2 * alpha + c.k3 * a2)) / (c.k1 * alpha * gap);
    let phi_bound = c.k7 * a2 / gap;
    Ok(BoundReport {
        alpha,
        alpha_max,
        rho: spectral_radius(alpha, c),
        x_bound,
        phi_bound,
    })
}

/// `F_0(x)`: coalition-averaged analytic subgradients stacked in coordinate order.
pub fn game_mapping(game: &GameSpec, x: &[f64]) -> Result<Vec<f64>> {
    game.check_profile(x)?;
    let mut out = vec![0.0; game.num_players()];
    for (i, coalition) in game.coalitions().iter().enumerate() {
        let block = game.block(i);
        let n_i = coalition.size() as f64;
        for p in coalition.players() {
            let g = game.subgradient(p.id, x)?;
            for (slot, v) in out[block.clone()].iter_mut().zip(&g) {
                *slot += v / n_i;
            }
        }
    }
    Ok(out)
}

/// Natural-map residual `||x - P[x - F_0(x)]||`, zero exactly at an equilibrium.
pub fn vi_residual(game: &GameSpec, x: &[f64]) -> Result<f64> {
    let f = game_mapping(game, x)?;
    Ok(game
        .players()
        .zip(x.iter().zip(&f))
        .map(|(p, (v, g))| (v - p.bounds.project(v - g)).powi(2))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashOracleOptions {
    pub gamma0: f64,
    pub max_iters: usize,
    /// starting profile; the box midpoint when absent
    pub start: Option<Vec<f64>>,
}

impl Default for NashOracleOptions {
    fn default() -> Self {
        Self {
            gamma0: 0.1,
            max_iters: 5_000_000,
            start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashReference {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Reference equilibrium by projected subgradient iteration on `F_0` with
/// steps `gamma0 / sqrt(t + 1)`.
///
/// Iteration stops once a step moves less than `tol` and the VI residual is
/// at most `10 tol`.
pub fn nash_oracle(game: &GameSpec, tol: f64, opts: &NashOracleOptions) -> Result<NashReference> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol must be > 0, got {tol}")));
    }
    if !game.has_subgradients() {
        let p = game.players().find(|p| p.subgradient.is_none()).expect("some player lacks a subgradient");
        return Err(Error::NoAnalyticGradient {
            coalition: p.id.coalition,
            player: p.id.player,
        });
    }
    let bounds = game.bounds();
    let mut x = match &opts.start {
        Some(s) => {
            game.check_profile(s)?;
            let mut v = s.clone();
            project(&bounds, &mut v);
            v
        }
        None => bounds.iter().map(|b| 0.5 * (b.lower() + b.upper())).collect(),
    };
    let mut residual = f64::INFINITY;
    for t in 0..opts.max_iters {
        let f = game_mapping(game, &x)?;
        let gamma = opts.gamma0 / ((t + 1) as f64).sqrt();
        let mut moved = 0.0;
        for ((v, g), b) in x.iter_mut().zip(&f).zip(&bounds) {
            let next = b.project(*v - gamma * g);
            moved += (next - *v).powi(2);
            *v = next;
        }
        if !moved.is_finite() {
            return Err(Error::NonConvergence(format!("non-finite iterate at step {t}")));
        }
        if moved.sqrt() <= tol {
            residual = vi_residual(game, &x)?;
            if residual <= 10.0 * tol {
                return Ok(NashReference {
                    x,
                    residual,
                    iterations: t + 1,
                });
            }
        }
    }
    Err(Error::NonConvergence(format!(
        "{} iterations without reaching tol {tol} (last residual {residual:e})",
        opts.max_iters
    )))
}

/// One Gauss-Seidel pass in which every player replaces its action by the
/// minimiser of its coalition's cost, found by golden-section search on the
/// black-box oracle. Returns the new profile and the largest move.
pub fn best_response_sweep(game: &GameSpec, x: &[f64], tol: f64) -> Result<(Vec<f64>, f64)> {
    game.check_profile(x)?;
    let mut cur = x.to_vec();
    let mut largest: f64 = 0.0;
    for c in 0..game.num_players() {
        let id = game.owner(c);
        let b = game.player(id).bounds;
        let mut probe = cur.clone();
        let mut cost = |v: f64| {
            probe[c] = v;
            game.coalition_cost(id.coalition, &probe)
        };
        let best = golden_section(&mut cost, b.lower(), b.upper(), tol)?;
        largest = largest.max((best - cur[c]).abs());
        cur[c] = best;
    }
    Ok((cur, largest))
}

fn golden_section<F>(f: &mut F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    while hi - lo > tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b)?;
        }
    }
    // the endpoints are candidates too when the minimum sits on the boundary
    let mid = 0.5 * (lo + hi);
    let mut best = (mid, f(mid)?);
    for v in [lo, hi] {
        let fv = f(v)?;
        if fv < best.1 {
            best = (v, fv);
        }
    }
    Ok(best.0)
}

/// Sampled estimate of the strong monotonicity constant:
/// the smallest `<F_0(x) - F_0(y), x - y> / ||x - y||^2` over random pairs.
pub fn estimate_chi<R: Rng + ?Sized>(game: &GameSpec, samples: usize, rng: &mut R) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidInput("estimate_chi needs at least one sample".into()));
    }
    let bounds = game.bounds();
    let mut best = f64::INFINITY;
    let mut used = 0;
    while used < samples {
        let x = uniform_point(&bounds, rng);
        let y = uniform_point(&bounds, rng);
        let d = distance(&x, &y);
        if d < 1e-3 {
            continue;
        }
        let fx = game_mapping(game, &x)?;
        let fy = game_mapping(game, &y)?;
        let inner: f64 = fx.iter().zip(&fy).zip(x.iter().zip(&y)).map(|((a, b), (u, v))| (a - b) * (u - v)).sum();
        best = best.min(inner / (d * d));
        used += 1;
    }
    Ok(best)
}

/// Euclidean distance `||x - x*||`.
pub fn nash_gap(x: &[f64], x_star: &[f64]) -> Result<f64> {
    if x.len() != x_star.len() {
        return Err(Error::DimensionMismatch(format!(
            "profile of length {} vs reference of length {}",
            x.len(),
            x_star.len()
        )));
    }
    Ok(distance(x, x_star))
}
