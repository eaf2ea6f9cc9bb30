//! Steady-state gap against step size on a small two-coalition game.
//!
//! cargo run --release --example step_size_sweep -- [iters]

use coalition_ne::analysis::{nash_oracle, NashOracleOptions};
use coalition_ne::config::{build_custom, CustomCoalition};
use coalition_ne::graph::GraphKind;
use coalition_ne::seeker::AlgorithmParams;
use coalition_ne::smoothing::SmoothingSchedule;
use coalition_ne::sweep::run_sweep;

fn coalition(target: Vec<f64>, curvature: f64, coupling: f64) -> CustomCoalition {
    CustomCoalition {
        size: target.len(),
        bounds: [-3.0, 3.0],
        curvature,
        target,
        abs_weight: 0.0,
        kink: 0.0,
        coupling,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let iters: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2000);
    let game = build_custom(
        &[coalition(vec![1.0, -1.0, 0.5], 2.0, 0.1), coalition(vec![0.0, 2.0], 1.0, -0.05)],
        &GraphKind::Ring { self_weight: 0.5 },
    )?;
    let reference = nash_oracle(&game, 1e-9, &NashOracleOptions::default())?;
    let base = AlgorithmParams::new(0.01, SmoothingSchedule::harmonic(0.1)?, iters, 0)?;
    let alphas = [0.005, 0.01, 0.02, 0.05, 0.1, 0.2];
    let seeds: Vec<u64> = (0..8).collect();
    let results = run_sweep(&game, &base, &alphas, &seeds, Some(&reference.x), None)?;
    println!("{:>6} {:>12} {:>14} {:>10}", "alpha", "initial gap", "steady gap", "half time");
    for r in &results {
        let half = r.half_time.map_or("-".to_string(), |t| t.to_string());
        println!("{:>6} {:>12.4} {:>14.4e} {:>10}", r.alpha, r.initial_gap, r.steady_state_gap, half);
    }
    Ok(())
}
