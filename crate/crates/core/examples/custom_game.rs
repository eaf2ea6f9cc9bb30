//! A game written directly against the library types: two coalitions
//! sharing a congestion term, seeded and run without any config file.
//!
//! cargo run --release --example custom_game

use coalition_ne::analysis::{nash_oracle, NashOracleOptions};
use coalition_ne::game::{assemble_game, BoxConstraint, CostOracle, PlayerSpec, Subgradient};
use coalition_ne::graph::{build_ring, CoalitionGraph};
use coalition_ne::seeker::{run, AlgorithmParams};
use coalition_ne::smoothing::SmoothingSchedule;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sizes = [3usize, 2];
    let bounds = BoxConstraint::new(0.0, 10.0)?;
    let mut players = Vec::new();
    let mut offset = 0;
    for (i, &n) in sizes.iter().enumerate() {
        for j in 0..n {
            let me = offset + j;
            let demand = 4.0 + j as f64;
            // own quadratic loss plus a share of total congestion
            let cost = CostOracle::new(move |x: &[f64]| {
                let load: f64 = x.iter().sum();
                (x[me] - demand).powi(2) + 0.1 * x[me] * load
            });
            // the reference solver needs the gradient over the coalition's own block
            let block = offset..offset + n;
            let grad = Subgradient::new(move |x: &[f64]| {
                let load: f64 = x.iter().sum();
                block
                    .clone()
                    .map(|k| 0.1 * x[me] + if k == me { 2.0 * (x[me] - demand) + 0.1 * load } else { 0.0 })
                    .collect()
            });
            players.push(PlayerSpec::new(i, j, bounds, cost).with_subgradient(grad));
        }
        offset += n;
    }
    let graphs: Vec<CoalitionGraph> = vec![build_ring(3, 0.5)?, CoalitionGraph::complete(2)];
    let game = assemble_game(players, graphs)?;

    let reference = nash_oracle(&game, 1e-9, &NashOracleOptions::default())?;
    let params = AlgorithmParams::new(0.02, SmoothingSchedule::harmonic(0.1)?, 3000, 11)?;
    let record = run(&game, &params, None, Some(&reference.x))?;

    println!("equilibrium {:?}", reference.x.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    println!("final x     {:?}", record.summary.final_x.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
    println!(
        "gap {:.3e} -> {:.3e}, {} oracle evaluations",
        record.summary.initial_gap.unwrap_or(f64::NAN),
        record.summary.final_gap.unwrap_or(f64::NAN),
        record.summary.oracle_evals
    );
    Ok(())
}
