use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ncgraph::cli::{self, Format, Input, RenderText, RunConfig};
use ncgraph::Error;

#[derive(Parser)]
#[command(name = "ncgraph", version, about = "Parameters, bounds and capacities of non-commutative graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Verification tolerance.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 8)]
    restarts: usize,
    /// Random channels added to each ensemble.
    #[arg(long, global = true, default_value_t = 4)]
    budget: usize,
    /// Largest power examined by `capacity`.
    #[arg(long, global = true, default_value_t = 2)]
    max_power: usize,
    /// Output-dimension cap for ensemble channels (default d²).
    #[arg(long, global = true)]
    max_output_dim: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Graph parameters of G next to the operator-system parameters of S_G.
    GraphParams { input: String },
    /// Parameters of an operator system (file or named input).
    SystemParams { input: String },
    /// Runs the verification suites over a corpus.
    Verify {
        /// JSON corpus; the built-in corpus when omitted.
        corpus: Option<PathBuf>,
    },
    /// Recomputes the reference values table.
    Reproduce,
    /// Brackets the zero-error capacity.
    Capacity { input: String },
}

fn emit<T: Serialize + RenderText>(value: &T, format: Format, out: &Option<PathBuf>) -> Result<(), Error> {
    let text = cli::render(value, format)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(args: Cli) -> Result<i32, Error> {
    let c = &args.common;
    let cfg = RunConfig {
        seed: c.seed,
        tol: c.tol,
        restarts: c.restarts,
        budget: c.budget,
        max_output: c.max_output_dim,
        max_power: c.max_power,
        format: match c.format {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        },
    };
    cfg.validate()?;
    let out = &c.out;
    match &args.command {
        Command::GraphParams { input } => {
            let Input::Graph(g) = cli::read_input(input)? else {
                return Err(Error::Invalid(format!("'{input}' is not a graph")));
            };
            emit(&cli::cmd_graph_params(&g, &cfg)?, cfg.format, out)?;
            Ok(cli::EXIT_OK)
        }
        Command::SystemParams { input } => {
            let s = cli::read_input(input)?.system();
            emit(&cli::cmd_system_params(&s, &cfg)?, cfg.format, out)?;
            Ok(cli::EXIT_OK)
        }
        Command::Verify { corpus } => {
            let corpus = match corpus {
                Some(p) => cli::read_corpus(p)?,
                None => cli::default_corpus(),
            };
            let ledger = cli::cmd_verify(&corpus, &cfg);
            emit(&ledger, cfg.format, out)?;
            Ok(ledger.exit_code())
        }
        Command::Reproduce => {
            let table = cli::cmd_reproduce(&cfg)?;
            emit(&table, cfg.format, out)?;
            Ok(if table.passed { cli::EXIT_OK } else { cli::EXIT_VERIFICATION })
        }
        Command::Capacity { input } => {
            let bracket = cli::cmd_capacity(&cli::read_input(input)?, &cfg)?;
            emit(&bracket, cfg.format, out)?;
            Ok(if bracket.is_consistent() { cli::EXIT_OK } else { cli::EXIT_VERIFICATION })
        }
    }
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            cli::exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
