use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coalition_ne::commands::{
    apply_overrides, cmd_analyze, cmd_bench, cmd_run, cmd_sweep, cmd_validate, resolve_output_dir, CommandError,
    Overrides,
};
use coalition_ne::config::load_config;

#[derive(Parser)]
#[command(version, about = "Gradient-free Nash equilibrium seeking for coalition games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check graphs and game assembly
    Validate(Args),
    /// One seeker run per seed
    Run(Args),
    /// Step-size grid times seeds
    Sweep(Args),
    /// Convergence constants and step-size bounds
    Analyze(Args),
    /// Cournot benchmark
    Bench(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Defaults to <config output.directory, $COALITION_NE_OUTPUT or ./output>/<command>
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    quiet: bool,
}

fn execute(command: Command) -> Result<(), CommandError> {
    let (name, args) = match &command {
        Command::Validate(a) => ("validate", a),
        Command::Run(a) => ("run", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Analyze(a) => ("analyze", a),
        Command::Bench(a) => ("bench", a),
    };
    let overrides = Overrides {
        seed: args.seed,
        alpha: args.alpha,
        iters: args.iters,
    };
    let cfg = apply_overrides(load_config(&args.config)?, &overrides)?;
    let out = match &args.output_dir {
        Some(dir) => dir.clone(),
        None => resolve_output_dir(None, &cfg).join(name),
    };
    let quiet = args.quiet;
    let summary = match command {
        Command::Validate(_) => {
            let v = cmd_validate(&cfg);
            if !v.passed {
                return Err(CommandError::Validation(v.to_string()));
            }
            v.to_string() + "\n"
        }
        Command::Run(_) => cmd_run(&cfg, &out)?.summary(),
        Command::Sweep(_) => cmd_sweep(&cfg, &out)?.summary(),
        Command::Analyze(_) => cmd_analyze(&cfg, &out)?.summary(),
        Command::Bench(_) => cmd_bench(&cfg, &out)?.summary(),
    };
    if !quiet {
        print!("{summary}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
