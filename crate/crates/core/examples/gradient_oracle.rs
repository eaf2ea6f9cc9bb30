//! Averages the two-point oracle over many directions and compares it with
//! the analytic subgradient of one Cournot firm.
//!
//! cargo run --release --example gradient_oracle -- [samples] [mu]

use coalition_ne::cournot::{build_cournot, default_box, default_graph};
use coalition_ne::game::PlayerId;
use coalition_ne::smoothing::{draw_direction, oracle_pi, stream_rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let samples: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200_000);
    let mu: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.01);

    let game = build_cournot(default_box(), &default_graph())?;
    let x: Vec<f64> = (0..game.num_players()).map(|c| 2.0 + (c % 7) as f64).collect();
    let id = PlayerId::new(2, 1);
    let n = game.coalition_size(id.coalition);

    let mut rng = stream_rng(7, 0);
    let mut mean = vec![0.0; n];
    for s in 0..samples {
        let xi = draw_direction(&mut rng, n);
        let pi = oracle_pi(&game, id, &x, mu, &xi)?;
        for (m, v) in mean.iter_mut().zip(&pi.values) {
            *m += (v - *m) / (s + 1) as f64;
        }
    }
    let exact = game.subgradient(id, &x)?;
    println!("player {id}, mu {mu}, {samples} directions");
    println!("{:>3} {:>12} {:>12}", "k", "oracle mean", "subgradient");
    for k in 0..n {
        println!("{:>3} {:>12.4} {:>12.4}", k + 1, mean[k], exact[k]);
    }
    Ok(())
}
