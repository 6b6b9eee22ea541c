use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use metasnell::cli::{exit_code, run, RunOptions};

/// Generalized Snell law, interface jump audits and admissibility checks.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// One of trace, audit, weakcheck, admit, design.
    command: String,
    /// TOML configuration file; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.json and CSV tables.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized suites and sample points.
    #[arg(long)]
    seed: Option<u64>,
    /// Primary tolerance of the chosen subcommand.
    #[arg(long)]
    tol: Option<f64>,
    /// Override any config key, e.g. `--set surface.kind=paraboloid`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, short)]
    verbose: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = if args.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let name = args.command;
    let opts = RunOptions {
        config: args.config,
        out: args.out,
        seed: args.seed,
        tol: args.tol,
        overrides: args.overrides,
    };
    let result = run(&name, &opts);
    match &result {
        Ok(o) => {
            for f in &o.files {
                println!("{}", f.display());
            }
            println!("{name}: {}", if o.passed { "pass" } else { "FAIL" });
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
