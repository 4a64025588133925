use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dirac_lattice::report::{self, Suite, Verdicts};
use dirac_lattice::theory::{builtin, load_theory, TheorySpec};
use dirac_lattice::Error;

#[derive(Parser)]
#[command(name = "dirac-lattice", version, about = "Exact constraint analysis of first-order lattice field theories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the constraint algorithm, classification and counting.
    Analyze(Common),
    /// Run one property suite.
    Verify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Built-in theory name (paper_g0, maxwell1) or path to a theory file.
    #[arg(long, default_value = "paper_g0")]
    theory: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the JSON report; `-` prints it instead of the text view.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::InconsistentSystem(_)
            | Error::NonFirstOrderLagrangian(_)
            | Error::TheoryMismatch { .. }
            | Error::UnknownGenerator(_) => Failure::Input(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

fn resolve_theory(name: &str) -> Result<TheorySpec, Failure> {
    if let Some(t) = builtin(name) {
        return Ok(t);
    }
    let text = std::fs::read_to_string(name)
        .map_err(|e| Failure::Input(format!("`{name}` is neither a built-in theory nor a readable file: {e}")))?;
    Ok(load_theory(&text)?)
}

fn emit(json: String, text: String, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) if p.as_os_str() == "-" => print!("{json}"),
        Some(p) => {
            std::fs::write(p, json).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display())))?;
            print!("{text}");
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let common = match &cli.command {
        Command::Analyze(c) => c,
        Command::Verify { common, .. } => common,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| Failure::Input(e.to_string()))?;
    let spec = resolve_theory(&common.theory)?;
    let start = Instant::now();
    let passed = match &cli.command {
        Command::Analyze(c) => {
            let r = pool.install(|| report::analyze(&spec, c.n, c.t, c.seed))?;
            emit(report::to_json(&r), report::render_analysis(&r), &c.out)?;
            r.passed()
        }
        Command::Verify { suite, common: c } => {
            let r = pool.install(|| report::verify(&spec, *suite, c.n, c.t, c.seed))?;
            emit(report::to_json(&r), report::render_verify(&r), &c.out)?;
            r.passed()
        }
    };
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    Ok(passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
