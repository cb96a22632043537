use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hmimo::experiments::{execute, Command, RunConfig};
use hmimo::Error;

/// Holographic MIMO rate and energy-efficiency experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sum rate against SNR, closed form and Monte-Carlo.
    RateSweep(RunArgs),
    /// Energy efficiency against the BS antenna count.
    EeSweep(RunArgs),
    /// Energy efficiency over a grid of antenna counts.
    EeSurface(RunArgs),
    /// Energy-efficiency-optimal antenna counts.
    Optimize(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run config or a previous run's manifest.json.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's `out`, else `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::RateSweep(a) => (Command::RateSweep, a),
        Cmd::EeSweep(a) => (Command::EeSweep, a),
        Cmd::EeSurface(a) => (Command::EeSurface, a),
        Cmd::Optimize(a) => (Command::Optimize, a),
    };
    let result = RunConfig::load(&args.config).and_then(|mut cfg| {
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        let out = args
            .out
            .clone()
            .or_else(|| cfg.out.as_ref().map(|o| cfg.base_dir.join(o)))
            .unwrap_or_else(|| PathBuf::from("out"));
        execute(command, &cfg, &out, args.threads)
    });
    match result {
        Ok(output) => {
            if let Some(text) = output.stdout {
                print!("{text}");
            }
            for f in output.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
