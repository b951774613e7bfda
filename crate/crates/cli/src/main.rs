use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qcache::experiment::{
    decode_rows, fidelity_rows, figure_files, optimize, queue_wait_rows, reproduce_figures,
    ExperimentConfig, OptimizeStatus,
};
use qcache::output::{write_table, Format, Record};

/// Exit status when the optimizer finds no feasible configuration.
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "qcache", version, about = "Repeater-chain caching simulator and optimizer")]
struct Cli {
    #[command(flatten)]
    opts: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean waiting time per (lambda, gamma, I) for every queue backend.
    QueueWait,
    /// End-to-end path fidelity per (L, M, I).
    FidelitySweep,
    /// Logical error of the repetition code per (K, M, I), both decoders.
    DecodeError,
    /// Grid search for the best (M, K, I); exits with 3 if nothing is feasible.
    Optimize,
    /// Runs everything and writes every table into the --out directory.
    ReproduceFigures,
    /// Prints the effective configuration as TOML.
    Config,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Mwm,
    Lut,
}

#[derive(Clone, Copy, ValueEnum)]
enum MappingArg {
    Werner,
    Bitflip,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Markov,
    Analytic,
    Des,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per decoding estimate.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Output file (directory for reproduce-figures). Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<FormatArg>,
    #[arg(long, value_enum, global = true)]
    decoder: Option<DecoderArg>,
    #[arg(long, value_enum, global = true)]
    mapping: Option<MappingArg>,
    #[arg(long, value_enum, global = true)]
    queue_backend: Option<BackendArg>,
    /// Feasibility threshold on path fidelity.
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Swap time with the 2^j hop exponent, twice the doubling form.
    #[arg(long, global = true)]
    compat_eq13b_exponent: bool,
    /// Feasible when path cost (not fidelity) is at least the threshold.
    #[arg(long, global = true)]
    compat_literal_constraint: bool,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(f) = self.format {
            cfg.format = match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
        }
        if let Some(d) = self.decoder {
            cfg.decoder = match d {
                DecoderArg::Mwm => "mwm",
                DecoderArg::Lut => "lut",
            }
            .into();
        }
        if let Some(m) = self.mapping {
            cfg.mapping = match m {
                MappingArg::Werner => "werner",
                MappingArg::Bitflip => "bitflip",
            }
            .into();
        }
        if let Some(b) = self.queue_backend {
            cfg.queue_backend = match b {
                BackendArg::Markov => "markov",
                BackendArg::Analytic => "analytic",
                BackendArg::Des => "des",
            }
            .into();
        }
        if let Some(t) = self.threshold {
            cfg.threshold = t;
        }
        cfg.compat_swap_exponent |= self.compat_eq13b_exponent;
        cfg.literal_constraint |= self.compat_literal_constraint;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit<R: Record>(cfg: &ExperimentConfig, rows: &[R]) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_table(rows, cfg.format, io::BufWriter::new(file))?;
        }
        None => write_table(rows, cfg.format, io::stdout().lock())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = cli.opts.config()?;
    match cli.command {
        Command::QueueWait => emit(&cfg, &queue_wait_rows(&cfg)?)?,
        Command::FidelitySweep => emit(&cfg, &fidelity_rows(&cfg)?)?,
        Command::DecodeError => emit(&cfg, &decode_rows(&cfg)?)?,
        Command::Optimize => {
            let run = optimize(&cfg, &cfg.decoder)?;
            emit(&cfg, &run.table)?;
            let summary = serde_json::to_string_pretty(&run.summary)?;
            writeln!(io::stderr(), "{summary}")?;
            if run.summary.status == OptimizeStatus::Infeasible {
                eprintln!(
                    "no configuration reaches the threshold {}; best overall is M={} K={} I={}",
                    cfg.threshold,
                    run.summary.best_overall.point.edge_count,
                    run.summary.best_overall.point.k,
                    run.summary.best_overall.point.memory_units,
                );
                return Ok(ExitCode::from(EXIT_INFEASIBLE));
            }
        }
        Command::ReproduceFigures => {
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
            let summaries = reproduce_figures(&cfg, &dir)?;
            for name in figure_files(cfg.format) {
                println!("{}", dir.join(name).display());
            }
            for s in &summaries {
                let status = match s.status {
                    OptimizeStatus::Optimal => "optimal",
                    OptimizeStatus::Infeasible => "infeasible",
                };
                eprintln!("{}: {status} ({} of {} feasible)", s.decoder, s.feasible_count, s.evaluated);
            }
        }
        Command::Config => print!("{}", cfg.to_toml()?),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
