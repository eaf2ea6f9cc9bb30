//! Reference equilibrium of the Cournot benchmark, checked by a round of
//! exact best responses.
//!
//! cargo run --release --example nash_reference

use coalition_ne::analysis::{best_response_sweep, nash_oracle, vi_residual, NashOracleOptions};
use coalition_ne::cournot::{build_cournot, default_box, default_graph, COALITION_SIZE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let game = build_cournot(default_box(), &default_graph())?;
    let tol = 1e-8;
    let reference = nash_oracle(&game, tol, &NashOracleOptions::default())?;
    println!("{} subgradient iterations, VI residual {:.2e}", reference.iterations, reference.residual);
    for i in 0..game.num_coalitions() {
        let block = &reference.x[i * COALITION_SIZE..(i + 1) * COALITION_SIZE];
        let shown: Vec<String> = block.iter().map(|v| format!("{v:.6}")).collect();
        println!("coalition {}: {}", i + 1, shown.join(" "));
    }
    let (moved, max_move) = best_response_sweep(&game, &reference.x, tol)?;
    println!("largest best-response move {max_move:.2e}, residual after sweep {:.2e}", vi_residual(&game, &moved)?);
    Ok(())
}
