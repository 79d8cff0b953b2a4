//! `supercoeff`: supercoefficient tables, Kerr-cat and beam-splitter
//! parameters, eigenbasis tables, self-verification and design sweeps.
//!
//! Exit codes: 0 success, 1 invalid input or no feasible design,
//! 2 verification failure.

mod commands;
mod config;
mod examples;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

/// Worker threads for sweeps and verification; unset means one per core.
pub const THREADS_ENV: &str = "SUPERCOEFF_THREADS";

#[derive(Parser, Debug)]
#[command(name = "supercoeff", version, about = "Supercoefficients and effective Hamiltonians of driven Josephson circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Io {
    /// run configuration (.toml, or .json as written by --json)
    #[arg(short, long)]
    config: PathBuf,
    /// CSV destination; stdout when omitted
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON destination
    #[arg(long)]
    json: Option<PathBuf>,
    /// override the highest series shell
    #[arg(long)]
    s_max: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Supercoefficient table over 2n + l <= nmax, p <= pmax
    Sc {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 4)]
        nmax: u32,
        #[arg(long, default_value_t = 2)]
        pmax: u32,
    },
    /// Kerr-cat parameters of a two-photon-driven circuit
    Kerrcat {
        #[command(flatten)]
        io: Io,
    },
    /// Beam-splitter rate between two cavities through a driven coupler
    Beamsplitter {
        #[command(flatten)]
        io: Io,
    },
    /// Supercoefficients between eigenstates of the static Hamiltonian
    Eigen {
        #[command(flatten)]
        io: Io,
    },
    /// Cross-check the computation paths; exit 2 on any mismatch
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        suite: verify::Suite,
        /// check this circuit instead of the built-in matrix
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Constrained grid scan
    Sweep {
        #[command(flatten)]
        io: Io,
    },
    /// Print a built-in configuration, or list them
    Examples {
        name: Option<String>,
        /// write to a file instead of stdout
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn load(io: &Io) -> Result<RunConfig> {
    let mut cfg = config::load(&io.config)?;
    if let Some(s) = io.s_max {
        cfg.numerics.s_max = s;
    }
    Ok(cfg)
}

fn finish(io: &Io, cfg: &RunConfig, report: commands::Report) -> Result<()> {
    let out = cfg.output.clone().unwrap_or_default();
    output::emit(&report.csv, io.csv.as_deref().or(out.csv.as_deref()))?;
    if let (Some(json), Some(path)) = (&report.json, io.json.as_deref().or(out.json.as_deref())) {
        output::emit(json, Some(path))?;
    }
    eprintln!("{}", report.summary);
    Ok(())
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().with_context(|| format!("{THREADS_ENV} must be a thread count (got {v:?})"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    init_threads()?;
    match cli.command {
        Command::Sc { io, nmax, pmax } => {
            let cfg = load(&io)?;
            finish(&io, &cfg, commands::sc(&cfg, nmax, pmax)?)?;
        }
        Command::Kerrcat { io } => {
            let cfg = load(&io)?;
            finish(&io, &cfg, commands::kerrcat(&cfg)?)?;
        }
        Command::Beamsplitter { io } => {
            let cfg = load(&io)?;
            finish(&io, &cfg, commands::beamsplitter(&cfg)?)?;
        }
        Command::Eigen { io } => {
            let cfg = load(&io)?;
            finish(&io, &cfg, commands::eigen(&cfg)?)?;
        }
        Command::Sweep { io } => {
            let cfg = load(&io)?;
            let (report, found) = commands::sweep(&cfg)?;
            finish(&io, &cfg, report)?;
            if !found {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Verify { suite, config, csv } => {
            let cfg = config.as_deref().map(config::load).transpose()?;
            let checks = verify::run(suite, cfg.as_ref())?;
            let (table, text) = verify::render(&checks)?;
            print!("{text}");
            if let Some(p) = csv {
                output::emit(&table, Some(&p))?;
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                eprintln!("{failed} of {} checks failed", checks.len());
                return Ok(ExitCode::from(2));
            }
            eprintln!("all {} checks passed", checks.len());
        }
        Command::Examples { name: None, .. } => {
            for n in examples::NAMES {
                println!("{n}");
            }
        }
        Command::Examples { name: Some(name), out } => {
            let cfg = examples::get(&name)
                .ok_or_else(|| anyhow!("unknown example `{name}`; available: {}", examples::NAMES.join(", ")))?;
            output::emit(&config::to_toml(&cfg)?, out.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // per-coefficient convergence warnings flood sweeps; RUST_LOG=warn shows them
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn,supercoeff_core::sc=error")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
