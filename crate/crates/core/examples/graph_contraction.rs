//! Contraction factor of ring and complete graphs, and how fast powers of
//! the mixing matrix reach the average.
//!
//! cargo run --example graph_contraction -- [n]

use coalition_ne::graph::{build_ring, coalition_kappa, spectral_norm, validate_graph, CoalitionGraph};
use nalgebra::DMatrix;

fn report(name: &str, g: &CoalitionGraph) -> Result<(), Box<dyn std::error::Error>> {
    let checks = validate_graph(&g.rows())?;
    let kappa = coalition_kappa(g)?;
    let n = g.size();
    let avg = DMatrix::from_element(n, n, 1.0 / n as f64);
    let mut power = DMatrix::identity(n, n);
    let mut dist = Vec::new();
    for _ in 0..20 {
        power = g.matrix() * power;
        dist.push(spectral_norm(&(&power - &avg)));
    }
    println!(
        "{name:<14} doubly stochastic {}, sigma {:.4}, varsigma {:.3}, ||A^10 - J|| {:.2e}, ||A^20 - J|| {:.2e}",
        checks.passed(),
        kappa.sigma,
        kappa.varsigma,
        dist[9],
        dist[19]
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(6);
    for w in [0.2, 0.5, 0.9] {
        report(&format!("ring w={w}"), &build_ring(n, w)?)?;
    }
    report("complete", &CoalitionGraph::complete(n))?;
    Ok(())
}
