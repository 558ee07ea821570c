mod config;
mod run;
mod sweep;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use nctorus::oracle::DEFAULT_ORACLE_Q;

use crate::config::ConfigError;
use crate::run::RunOptions;
use crate::sweep::Param;

const EXIT_TOLERANCE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// Gauss-Bonnet and connection-space experiments on the noncommutative two-torus.
#[derive(Parser)]
#[command(name = "nct", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Minimum dimension of the matrix oracle.
    #[arg(long)]
    oracle_q: Option<usize>,
    /// Largest truncation radius allowed.
    #[arg(long)]
    max_n: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment and write a JSON report.
    Run {
        #[command(flatten)]
        common: Common,
        /// Stop after the first failing experiment.
        #[arg(long)]
        fail_fast: bool,
    },
    /// Sweep one Gauss-Bonnet experiment and write a CSV table.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// N, theta or tol.
        #[arg(long)]
        param: Param,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Name of the experiment to sweep; defaults to the first gauss_bonnet one.
        #[arg(long)]
        experiment: Option<String>,
        /// Stop after the first value whose result misses the bound.
        #[arg(long)]
        fail_fast: bool,
    },
}

fn output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn configure_threads() -> Result<(), ConfigError> {
    if let Ok(v) = std::env::var("NCT_THREADS") {
        let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            ConfigError(format!("NCT_THREADS must be a positive integer, got {v:?}"))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError(e.to_string()))?;
    }
    Ok(())
}

fn load(common: &Common) -> Result<(config::Config, usize), ConfigError> {
    configure_threads()?;
    let cfg = config::load(&common.config)?;
    if let Some(n) = common.max_n {
        cfg.check_max_n(n)?;
    }
    let q = common.oracle_q.or(cfg.oracle_q).unwrap_or(DEFAULT_ORACLE_Q);
    if q < 2 {
        return Err(ConfigError(format!(
            "--oracle-q must be at least 2, got {q}"
        )));
    }
    Ok((cfg, q))
}

fn execute(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Run { common, fail_fast } => {
            let (cfg, oracle_q) = load(&common)?;
            let opts = RunOptions {
                seed: common.seed.unwrap_or(cfg.seed),
                oracle_q,
                max_n: common.max_n,
                fail_fast,
            };
            let report = run::run(&cfg, &opts);
            let mut out = output(&common.out)?;
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
            for e in &report.experiments {
                eprintln!("{:<8} {}", format!("{:?}", e.status).to_lowercase(), e.name);
            }
            Ok(if report.passed() { 0 } else { EXIT_TOLERANCE })
        }
        Command::Sweep {
            common,
            param,
            values,
            experiment,
            fail_fast,
        } => {
            let (cfg, oracle_q) = load(&common)?;
            if let (Some(max), Param::N, Some(vs)) = (common.max_n, param, values.as_ref()) {
                if let Some(v) = vs.iter().find(|&&v| v > max as f64) {
                    return Err(
                        ConfigError(format!("--values: N = {v} exceeds --max-n {max}")).into(),
                    );
                }
            }
            let rows = sweep::sweep(
                &cfg,
                experiment.as_deref(),
                param,
                values.as_deref(),
                oracle_q,
                fail_fast,
            )?;
            sweep::write_csv(&rows, output(&common.out)?)?;
            for r in &rows {
                if let Err(e) = &r.point {
                    eprintln!("{param} = {}: {e}", r.param);
                }
            }
            Ok(if rows.iter().all(|r| r.within_bound) {
                0
            } else {
                EXIT_TOLERANCE
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::from(EXIT_TOLERANCE)
            }
        }
    }
}
