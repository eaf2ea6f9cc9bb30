//! Loads a TOML config and runs it the way the `run` command does, writing
//! CSVs and metadata into a directory.
//!
//! cargo run --release --example run_config -- [config] [output dir]

use std::path::PathBuf;

use coalition_ne::commands::{cmd_run, cmd_validate};
use coalition_ne::config::load_config;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/custom_quadratic.toml")));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("coalition-ne-run"));

    let cfg = load_config(&config)?;
    let checks = cmd_validate(&cfg);
    println!("{checks}");
    if !checks.passed {
        return Err("config failed validation".into());
    }
    let outcome = cmd_run(&cfg, &out)?;
    print!("{}", outcome.summary());
    Ok(())
}
