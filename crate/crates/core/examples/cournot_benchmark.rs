//! Seeker on the Cournot benchmark: mean gap to the reference equilibrium
//! for several step sizes and seeds.
//!
//! cargo run --release --example cournot_benchmark -- [iters] [seeds] [ring:W | complete]

use coalition_ne::cournot::{run_benchmark, BenchmarkOptions};
use coalition_ne::graph::GraphKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let iters: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3000);
    let n_seeds: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);
    let seeds: Vec<u64> = (0..n_seeds).collect();
    let graph = match args.next().as_deref() {
        None => GraphKind::Ring { self_weight: 0.5 },
        Some("complete") => GraphKind::Complete,
        Some(s) => match s.strip_prefix("ring:") {
            Some(w) => GraphKind::Ring { self_weight: w.parse()? },
            None => return Err(format!("unknown graph {s}").into()),
        },
    };
    let alphas = [0.02, 0.03, 0.05, 0.1];

    let report = run_benchmark(&BenchmarkOptions { graph, ..Default::default() }, &alphas, iters, &seeds)?;
    println!("reference equilibrium (VI residual {:.2e}):", report.reference.residual);
    for i in 0..4 {
        println!("  coalition {}: {:.6}", i + 1, report.reference.x[i * 6]);
    }
    println!("{:>6} {:>12} {:>14} {:>10}", "alpha", "initial gap", "steady gap", "half time");
    for r in &report.results {
        let half = r.half_time.map_or("-".to_string(), |t| t.to_string());
        println!("{:>6} {:>12.4} {:>14.6} {:>10}", r.alpha, r.initial_gap, r.steady_state_gap, half);
    }
    let step = (iters / 10).max(1);
    for r in &report.results {
        let pts: Vec<String> = r.mean_gap.iter().step_by(step).map(|(t, g)| format!("{t}:{g:.4}")).collect();
        println!("alpha {}: {}", r.alpha, pts.join(" "));
    }
    Ok(())
}
