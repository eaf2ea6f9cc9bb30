//! Convergence constants, admissible step size and steady-state bounds for
//! the Cournot benchmark.
//!
//! cargo run --release --example convergence_bounds

use coalition_ne::analysis::{
    build_constants, estimate_chi, estimate_game_lipschitz, max_step_size, spectral_radius, steady_state_bounds,
};
use coalition_ne::cournot::{build_cournot, default_box, default_graph};
use coalition_ne::smoothing::stream_rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let game = build_cournot(default_box(), &default_graph())?;
    let mut rng = stream_rng(0, 0);
    let lipschitz = estimate_game_lipschitz(&game, 1000, &mut rng)?;
    let chi = estimate_chi(&game, 1000, &mut rng)?;
    let c = build_constants(&game, chi, &lipschitz, 0.05)?;
    let step = max_step_size(&c);

    println!("chi {:.4}, L {:.4e}, B {:.4e}, sigma_bar {:.4}, varsigma {:.4}", c.chi, c.l, c.b, c.sigma_bar, c.varsigma);
    println!("k1..k7: {:.3e} {:.3e} {:.3e} {:.3e} {:.3e} {:.3e} {:.3e}", c.k1, c.k2, c.k3, c.k4, c.k5, c.k6, c.k7);
    println!("alpha_max {:.4e}", step.alpha_max);
    println!("{:>8} {:>12} {:>10} {:>12} {:>12}", "alpha", "alpha", "rho", "x bound", "phi bound");
    for frac in [0.01, 0.1, 0.5, 0.9, 1.2] {
        let alpha = frac * step.alpha_max;
        let rho = spectral_radius(alpha, &c);
        match steady_state_bounds(alpha, &c) {
            Ok(b) => println!("{frac:>8} {alpha:>12.4e} {rho:>10.6} {:>12.4e} {:>12.4e}", b.x_bound, b.phi_bound),
            Err(_) => println!("{frac:>8} {alpha:>12.4e} {rho:>10.6} {:>12} {:>12}", "-", "-"),
        }
    }
    Ok(())
}
