//! `pauliblad` command-line front end.

mod analyze;
mod commands;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Format, Output, RunManifest};

/// Malformed input file; exits with status 2.
#[derive(Debug)]
pub struct Malformed(pub String);

impl std::fmt::Display for Malformed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "malformed input: {}", self.0)
    }
}

impl std::error::Error for Malformed {}

#[derive(Debug, Parser)]
#[command(name = "pauliblad", version, about = "Pauli channels, pseudo-Lindblad generators and their noise models")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; 0 or unset lets rayon decide.
    #[arg(long, global = true, env = "PAULIBLAD_THREADS")]
    pub threads: Option<usize>,
    /// Directory for output files and the run manifest; stdout otherwise.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a channel or generator file.
    Analyze(AnalyzeArgs),
    /// Negative-rate statistics of random Pauli channels.
    RandomScan(RandomScanArgs),
    /// Twirled fidelities and rates of a noisy gate over a parameter grid.
    GateScan(GateScanArgs),
    /// Quasi-probabilistic injection, inversion or amplification of a generator.
    Mitigate(MitigateArgs),
    /// Synthetic benchmarking and local model fitting.
    LearnDemo(LearnArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    /// Real rates above `-class_tol` count as non-negative.
    #[arg(long, default_value_t = 1e-12)]
    pub class_tol: f64,
}

#[derive(Debug, Args)]
pub struct RandomScanArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub n: Vec<usize>,
    /// Infidelities: a list or start:stop:step.
    #[arg(long, default_value = "0.01,0.05,0.09", allow_hyphen_values = true)]
    pub r: String,
    #[arg(long, default_value_t = 20000)]
    pub trials: usize,
    #[arg(long, default_value = "simplex")]
    pub sampler: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Hadamard,
    Xpi,
    ZzT1,
}

#[derive(Debug, Args)]
pub struct GateScanArgs {
    #[arg(long, value_enum)]
    pub variant: Variant,
    /// Hadamard over-rotation angles.
    #[arg(long, conflicts_with = "p", allow_hyphen_values = true)]
    pub omega_dt: Option<String>,
    /// Hadamard error probabilities, converted to angles.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub dx: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub dz: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub dkappa: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Inject,
    Invert,
    Amplify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackgroundArg {
    None,
    /// Apply the model's own channel after the program.
    Exact,
}

#[derive(Debug, Args)]
pub struct MitigateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Rate scale for `amplify`.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 10000)]
    pub shots: u64,
    /// Comma-separated Pauli labels; defaults to every Pauli of weight 1 or 2.
    #[arg(long, value_delimiter = ',')]
    pub observables: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "none")]
    pub background: BackgroundArg,
    /// Move `Im lambda = m pi/2` phases into a deterministic Pauli frame.
    #[arg(long)]
    pub factor_quarter_turns: bool,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Nearest-neighbour chain connectivity (the default).
    #[arg(long, conflicts_with = "edges")]
    pub chain: bool,
    /// Explicit coupling graph, e.g. `0-1,1-2,2-0`.
    #[arg(long)]
    pub edges: Option<String>,
    /// `builtin` or a generator file.
    #[arg(long, default_value = "builtin")]
    pub truth: String,
    #[arg(long, default_value_t = pauliblad::learning::DEFAULT_SHOTS)]
    pub shots: u64,
    #[arg(long, value_delimiter = ',', default_value = "0,2,4,8")]
    pub depths: Vec<u32>,
    /// Defaults to all strategies, without CP projection above its size limit.
    #[arg(long, value_delimiter = ',')]
    pub strategies: Option<Vec<String>>,
    #[arg(long, default_value_t = 1)]
    pub holdout_power: u32,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::RandomScan(_) => "random-scan",
            Command::GateScan(_) => "gate-scan",
            Command::Mitigate(_) => "mitigate",
            Command::LearnDemo(_) => "learn-demo",
            Command::Replay(_) => "replay",
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match dispatch(cli, argv) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Malformed>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(cli: Cli, argv: Vec<String>) -> Result<u8> {
    let (cli, argv) = match &cli.command {
        Command::Replay(r) => replay_cli(&cli, &r.manifest)?,
        _ => (cli, argv),
    };
    if let Some(t) = cli.threads.filter(|t| *t > 0) {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    run(cli, argv)
}

/// The recorded invocation with `--out` and `--threads` taken from the replay command line.
fn replay_cli(cli: &Cli, manifest: &std::path::Path) -> Result<(Cli, Vec<String>)> {
    let m = RunManifest::read(manifest)?;
    if m.command == "replay" {
        bail!("manifest records a replay");
    }
    if m.version != env!("CARGO_PKG_VERSION") {
        eprintln!("warning: manifest written by version {}, running {}", m.version, env!("CARGO_PKG_VERSION"));
    }
    let mut argv = output::strip_flags(&m.args, &["--out", "--threads"]);
    if let Some(out) = &cli.out {
        argv.push("--out".into());
        argv.push(out.display().to_string());
    }
    if let Some(t) = cli.threads {
        argv.push("--threads".into());
        argv.push(t.to_string());
    }
    let parsed = Cli::try_parse_from(std::iter::once("pauliblad".to_string()).chain(argv.iter().cloned()))?;
    Ok((parsed, argv))
}

fn run(cli: Cli, argv: Vec<String>) -> Result<u8> {
    let started = chrono::Utc::now().to_rfc3339();
    let mut out = Output::new(cli.out.clone())?;
    let code = match &cli.command {
        Command::Analyze(a) => commands::analyze(&cli, a, &mut out)?,
        Command::RandomScan(a) => commands::random_scan(&cli, a, &mut out)?,
        Command::GateScan(a) => commands::gate_scan(&cli, a, &mut out)?,
        Command::Mitigate(a) => commands::mitigate(&cli, a, &mut out)?,
        Command::LearnDemo(a) => commands::learn_demo(&cli, a, &mut out)?,
        Command::Replay(_) => bail!("nested replay"),
    };
    out.finish(RunManifest {
        format: pauliblad::io::FORMAT.to_string(),
        command: cli.command.name().to_string(),
        args: argv,
        seed: cli.seed,
        threads: rayon::current_num_threads(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        started,
        finished: chrono::Utc::now().to_rfc3339(),
        outputs: Vec::new(),
    })?;
    Ok(code)
}
