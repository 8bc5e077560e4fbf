use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nbswitch_core::Error;

mod bound;
mod certify;
mod config;
mod dwec;
mod simulate;

use config::Config;

/// Nonblocking conditions for switching networks: bounds, simulators and
/// certificate checks.
#[derive(Parser, Debug)]
#[command(name = "nbswitch", version)]
struct Cli {
    /// TOML file with one table per subcommand; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print sufficient middle-stage counts.
    Bound(bound::BoundArgs),
    /// Run adversarial traffic sweeps or replay a trace.
    Simulate(simulate::SimulateArgs),
    /// Dynamic weighted edge coloring: constants, traces, random and exhaustive checks.
    Dwec(dwec::DwecArgs),
    /// Audit dual certificates over a parameter grid.
    Certify(certify::CertifyArgs),
    /// Write the blocking LP of one instance.
    ExportLp(ExportLpArgs),
}

#[derive(Args, Debug)]
pub struct ExportLpArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    f: Option<usize>,
    /// Outputs in the blocking window, 1 <= k <= min(f, d^t).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    mode: Option<String>,
    /// Defaults to standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// Exit status 1 for a failed check, 2 for bad input.
#[derive(Debug)]
pub enum Failure {
    Verify(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let verify = match &e {
            Error::ColoringFailure(_) | Error::Infeasible { .. } => true,
            Error::Argument(m) => m.contains("audit failed") || m.contains("invariant broken"),
            _ => false,
        };
        if verify {
            Failure::Verify(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Usage(s)
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// What a command printed, and whether its checks passed.
pub struct Output {
    pub text: String,
    pub failed: Option<String>,
}

impl Output {
    pub fn ok(text: String) -> Self {
        Self { text, failed: None }
    }
}

pub fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> CliResult<T> {
    s.parse().map_err(Failure::from)
}

pub fn read_file(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn export_lp(args: ExportLpArgs, cfg: &Config) -> CliResult<Output> {
    let s = cfg.section("export-lp")?;
    s.check_keys(&["d", "n", "t", "f", "k", "mode", "out"])?;
    let d = s.pick(args.d, "d", 2)?;
    let n = s.pick(args.n, "n", 3)?;
    let t = s.pick(args.t, "t", 1)?;
    let f = s.pick(args.f, "f", 1)?;
    let k = s.pick(args.k, "k", 1)?;
    let mode = parse(&s.pick(args.mode, "mode", "link".to_string())?)?;
    let out: Option<PathBuf> = match args.out {
        Some(p) => Some(p),
        None => s.get("out")?,
    };
    let inst = nbswitch_core::lpcert::LpInstance::canonical(d, n, t, f, k, mode)?;
    let text = nbswitch_core::lpcert::export_lp(&inst);
    match out {
        Some(p) => {
            std::fs::write(&p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            Ok(Output::ok(String::new()))
        }
        None => Ok(Output::ok(text)),
    }
}

fn run(cli: Cli) -> CliResult<Output> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Bound(a) => bound::run(a, &cfg),
        Command::Simulate(a) => simulate::run(a, &cfg),
        Command::Dwec(a) => dwec::run(a, &cfg),
        Command::Certify(a) => certify::run(a, &cfg),
        Command::ExportLp(a) => export_lp(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            match out.failed {
                None => ExitCode::SUCCESS,
                Some(msg) => {
                    eprintln!("verification failed: {msg}");
                    ExitCode::from(1)
                }
            }
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
