//! `kerrlab`: certification sweeps, potential scans and wave experiments
//! driven by a JSON config. Exit status 0 means every check passed, 1 a
//! check failed (the report carries a `worst_point`), 2 a usage or config
//! error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use kerrlab::KerrError;

use commands::Context;
use config::RunConfig;
use output::{to_json, Envelope, ErrorInfo, Outcome};

const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    /// Errors that can only come from the inputs are config errors; the rest
    /// are failures of the run itself.
    pub fn from_kerr(e: KerrError) -> Self {
        match e {
            KerrError::ExtremalOrSuper { .. }
            | KerrError::NonpositiveMass(_)
            | KerrError::InvalidParameter(_)
            | KerrError::InadmissibleFrequency { .. } => CliError::Config(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "kerrlab", version, about = "Kerr multiplier certification and separated-mode wave experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run config ("schema": 1).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// a/m, overriding the config.
    #[arg(long, global = true, allow_negative_numbers = true)]
    spin: Option<f64>,
    /// Output directory for report.json and CSV files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for the grid kernels.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Seed for the sampled sweeps.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    /// Test hook: push t_mod' out of the spacelike interval in the inner blend.
    #[arg(long, global = true, value_name = "AMPLITUDE", num_args = 0..=1, default_missing_value = "1.0")]
    corrupt_blend: Option<f64>,
    /// Test hook: multiply h̃₁ by N in the final bulk certification.
    #[arg(long, global = true, value_name = "N")]
    corrupt_h: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Inverse, determinant and causal-character checks of the three charts.
    GeomCheck,
    /// V and ∂_rV on a radial grid for each Ξ, with critical points.
    PotentialScan,
    /// Sampled check that the five regimes cover admissible frequencies.
    RegimesCover,
    /// Closed-form symbol identities against the Poisson-bracket form.
    SymbolsVerify,
    /// Constant search and bulk/boundary certification of every regime.
    Certify,
    /// Time evolution of one mode from a packet list.
    WaveEvolve,
    /// Stationary scattering over an ω scan.
    WaveScatter,
    /// Energy and Morawetz ratios for a set of packets.
    WaveMorawetz,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::GeomCheck => "geom-check",
            Command::PotentialScan => "potential-scan",
            Command::RegimesCover => "regimes-cover",
            Command::SymbolsVerify => "symbols-verify",
            Command::Certify => "certify",
            Command::WaveEvolve => "wave-evolve",
            Command::WaveScatter => "wave-scatter",
            Command::WaveMorawetz => "wave-morawetz",
        }
    }
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::empty(),
    };
    if let Some(s) = cli.spin {
        cfg.spin = s;
    }
    cfg.validate()?;
    if let Some(a) = cli.corrupt_blend {
        if !a.is_finite() {
            return Err(CliError::Config("--corrupt-blend needs a finite amplitude".into()));
        }
    }
    if let Some(h) = cli.corrupt_h {
        if !h.is_finite() {
            return Err(CliError::Config("--corrupt-h needs a finite factor".into()));
        }
    }
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        kerrlab::par::set_workers(n);
    }
    Ok(Context {
        seed: cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
        out: cli.out.clone().or_else(|| cfg.out.clone()),
        corrupt_blend: cli.corrupt_blend,
        corrupt_h: cli.corrupt_h,
        cfg,
    })
}

fn dispatch(cmd: Command, ctx: &Context) -> Result<Outcome, CliError> {
    match cmd {
        Command::GeomCheck => commands::geom_check(ctx),
        Command::PotentialScan => commands::potential_scan(ctx),
        Command::RegimesCover => commands::regimes_cover(ctx),
        Command::SymbolsVerify => commands::symbols_verify(ctx),
        Command::Certify => commands::certify(ctx),
        Command::WaveEvolve => commands::wave_evolve(ctx),
        Command::WaveScatter => commands::wave_scatter(ctx),
        Command::WaveMorawetz => commands::wave_morawetz(ctx),
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let ctx = context(cli)?;
    let outcome = dispatch(cli.command, &ctx)?;
    let env = Envelope {
        schema: config::SCHEMA,
        command: cli.command.name(),
        spin: ctx.cfg.spin,
        mass: ctx.cfg.mass,
        seed: ctx.seed,
        pass: outcome.pass,
        worst_point: outcome.worst_point.as_ref(),
        error: outcome.error.as_ref().map(ErrorInfo::new),
        files: &outcome.files,
        report: &outcome.report,
    };
    let text = to_json(&env);
    if let Some(dir) = &ctx.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let f = dir.join("report.json");
        std::fs::write(&f, &text).map_err(|e| CliError::Io(format!("{}: {e}", f.display())))?;
    }
    print!("{text}");
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ CliError::Config(_)) => {
            eprintln!("kerrlab: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("kerrlab: {e}");
            ExitCode::from(1)
        }
    }
}
