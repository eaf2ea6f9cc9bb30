//! Step-size by seed grids of independent seeker runs.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::seeker::{run, AlgorithmParams, RunRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaResult {
    pub alpha: f64,
    /// `None` when no `alpha_max` was supplied.
    pub admissible: Option<bool>,
    pub runs: Vec<RunRecord>,
    /// `(t, mean over seeds of ||x_t - x*||)`
    pub mean_gap: Vec<(usize, f64)>,
    pub initial_gap: f64,
    /// Mean gap over the last 10% of iterations.
    pub steady_state_gap: f64,
    /// First recorded `t` at which the mean gap is below half its initial value.
    pub half_time: Option<usize>,
}

/// Mean of the series over `t > iters - iters / 10`; the initial value when `iters == 0`.
pub fn steady_state_mean(series: &[(usize, f64)], iters: usize) -> f64 {
    let from = iters - iters / 10;
    let tail: Vec<f64> = series
        .iter()
        .filter(|(t, _)| iters == 0 || *t > from)
        .map(|(_, g)| *g)
        .collect();
    if tail.is_empty() {
        return f64::NAN;
    }
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// Pointwise mean of the gap series of several runs, truncated to the shortest.
pub fn mean_gap_series(runs: &[RunRecord]) -> Vec<(usize, f64)> {
    let series: Vec<Vec<(usize, f64)>> = runs.iter().map(RunRecord::gap_series).collect();
    let len = series.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|k| {
            let t = series[0][k].0;
            let mean = series.iter().map(|s| s[k].1).sum::<f64>() / series.len() as f64;
            (t, mean)
        })
        .collect()
}

/// Mean of `values` over consecutive windows of `width` entries (a trailing
/// partial window is dropped).
pub fn window_means(values: &[f64], width: usize) -> Vec<f64> {
    assert!(width > 0, "window width must be positive");
    values
        .chunks_exact(width)
        .map(|w| w.iter().sum::<f64>() / width as f64)
        .collect()
}

/// Run every `(alpha, seed)` pair with `base` as the template for all other
/// parameters. Pairs run in parallel; each run is sequential, so the output
/// does not depend on scheduling.
pub fn run_sweep(
    game: &GameSpec,
    base: &AlgorithmParams,
    alphas: &[f64],
    seeds: &[u64],
    reference: Option<&[f64]>,
    alpha_max: Option<f64>,
) -> Result<Vec<AlphaResult>> {
    if alphas.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidInput("need at least one step size and one seed".into()));
    }
    let grid: Vec<(f64, u64)> = alphas.iter().flat_map(|&a| seeds.iter().map(move |&s| (a, s))).collect();
    let records = grid
        .par_iter()
        .map(|&(alpha, seed)| {
            let params = AlgorithmParams {
                alpha,
                seed,
                workers: 1,
                ..base.clone()
            };
            params.validate()?;
            run(game, &params, None, reference)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = records.into_iter();
    Ok(alphas
        .iter()
        .map(|&alpha| {
            let runs: Vec<RunRecord> = records.by_ref().take(seeds.len()).collect();
            let mean_gap = mean_gap_series(&runs);
            let initial_gap = mean_gap.first().map_or(f64::NAN, |p| p.1);
            let half_time = mean_gap.iter().find(|(_, g)| *g < 0.5 * initial_gap).map(|p| p.0);
            AlphaResult {
                alpha,
                admissible: alpha_max.map(|m| alpha < m),
                steady_state_gap: steady_state_mean(&mean_gap, base.max_iters),
                initial_gap,
                half_time,
                mean_gap,
                runs,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn steady_state_window() {
        let s: Vec<(usize, f64)> = (0..=10).map(|t| (t, t as f64)).collect();
        assert_eq!(steady_state_mean(&s, 10), 10.0);
        let s: Vec<(usize, f64)> = (0..=100).map(|t| (t, t as f64)).collect();
        assert_abs_diff_eq!(steady_state_mean(&s, 100), 95.5);
        assert_eq!(steady_state_mean(&[(0, 3.0)], 0), 3.0);
    }

    #[test]
    fn windows() {
        assert_eq!(window_means(&[1.0, 3.0, 5.0, 7.0, 9.0], 2), vec![2.0, 6.0]);
        assert!(window_means(&[1.0], 2).is_empty());
    }
}
