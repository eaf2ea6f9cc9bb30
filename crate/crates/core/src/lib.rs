//! Gradient-free Nash equilibrium seeking for N-coalition games.
//!
//! Every coalition is a group of players on a directed, doubly-stochastic
//! communication graph. Players only evaluate their own cost; partial
//! gradients are replaced by a Gaussian-smoothing oracle, and each player
//! tracks the coalition-average gradient through consensus.
//!
//! The main pieces:
//!
//! - [`game`]: boxes, cost oracles and the coalition layout of a game
//! - [`graph`]: weight-matrix validation and the contraction factor `sigma`
//! - [`smoothing`]: the randomized oracle, smoothing schedules and checks
//! - [`seeker`]: the synchronous action and tracker updates
//! - [`analysis`]: convergence constants, step-size bounds, a reference equilibrium
//! - [`cournot`]: the four-coalition Cournot benchmark
//! - [`config`] and [`commands`]: TOML experiments and their CSV/TOML outputs
//!
//! Runnable walkthroughs live in `examples/`.
//!
//! ```
//! use coalition_ne::cournot::{build_cournot, default_box, default_graph};
//! use coalition_ne::seeker::{run, AlgorithmParams};
//! use coalition_ne::smoothing::SmoothingSchedule;
//!
//! let game = build_cournot(default_box(), &default_graph()).unwrap();
//! let params = AlgorithmParams::new(0.02, SmoothingSchedule::harmonic(0.1).unwrap(), 50, 7).unwrap();
//! let record = run(&game, &params, None, None).unwrap();
//! assert_eq!(record.summary.iterations, 50);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod commands;
pub mod config;
pub mod cournot;
pub mod error;
pub mod game;
pub mod graph;
pub mod seeker;
pub mod smoothing;
pub mod sweep;

pub use error::{Error, Result};
pub use game::{assemble_game, ActionProfile, BoxConstraint, CostOracle, GameSpec, PlayerId, PlayerSpec, Subgradient};
pub use graph::{build_ring, CoalitionGraph, GraphKind};
pub use seeker::{run, AlgorithmParams, RunRecord};
pub use smoothing::{SmoothingMode, SmoothingSchedule};
