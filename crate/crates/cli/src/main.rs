//! `opvp`: Floyd grammars, precedence matrices and visibly pushdown automata
//! from the command line.
//!
//! Exit status: 0 for an affirmative outcome (accept, equivalent,
//! conflict-free), 1 for a negative one, 2 for unreadable input.

mod artifact;
mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Output;

#[derive(Parser)]
#[command(
    name = "opvp",
    version,
    about = "Floyd grammars and visibly pushdown automata"
)]
struct Cli {
    /// Print a JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Whitespace-separated letters.
    #[arg(long, allow_hyphen_values = true)]
    input: String,
}

#[derive(Args)]
struct Bound {
    /// Longest string enumerated.
    #[arg(long, default_value_t = 8)]
    max_len: usize,
}

#[derive(Args)]
struct Out {
    /// Write the converted artifact here instead of stdout.
    #[arg(short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Relations, conflicts and the Floyd verdict of a grammar.
    Check {
        grammar: PathBuf,
        /// Also check the balanced-grammar restrictions.
        #[arg(long, requires = "pairing")]
        balanced: bool,
        /// Call/return pairs, `c1:r1,c2:r2`.
        #[arg(long)]
        pairing: Option<String>,
    },
    /// The precedence matrix of a grammar, automaton partition or matrix file.
    Opm { file: PathBuf },
    /// The call/return/internal partition the matrix fits, if any.
    Classify { file: PathBuf },
    /// Operator precedence parse of `--input`.
    Parse {
        grammar: PathBuf,
        #[command(flatten)]
        input: Input,
    },
    /// The relation chain between consecutive letters of `--input`.
    Trace {
        file: PathBuf,
        #[command(flatten)]
        input: Input,
    },
    /// The language of a grammar or automaton up to `--max-len`.
    Enum {
        file: PathBuf,
        #[command(flatten)]
        bound: Bound,
    },
    /// The configurations an automaton reaches on `--input`.
    Run {
        vpda: PathBuf,
        #[command(flatten)]
        input: Input,
    },
    /// The canonical factorization of `--input` under the file's partition.
    Factorize {
        file: PathBuf,
        #[command(flatten)]
        input: Input,
    },
    /// Grammar with a VP-matrix to automaton.
    ToVpda {
        grammar: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Automaton to grammar.
    FromVpda {
        vpda: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// The grammar of the mirror language.
    Reverse {
        grammar: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Compares two bounded languages.
    Equiv {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        bound: Bound,
    },
}

fn execute(command: &Command) -> Result<Output, artifact::InputError> {
    match command {
        Command::Check {
            grammar,
            balanced,
            pairing,
        } => commands::check(grammar, *balanced, pairing.as_deref()),
        Command::Opm { file } => commands::opm(file),
        Command::Classify { file } => commands::classify(file),
        Command::Parse { grammar, input } => commands::parse(grammar, &input.input),
        Command::Trace { file, input } => commands::trace(file, &input.input),
        Command::Enum { file, bound } => commands::enumerate(file, bound.max_len),
        Command::Run { vpda, input } => commands::run(vpda, &input.input),
        Command::Factorize { file, input } => commands::factorize_cmd(file, &input.input),
        Command::ToVpda { grammar, out } => commands::to_vpda(grammar, out.output.as_deref()),
        Command::FromVpda { vpda, out } => commands::from_vpda(vpda, out.output.as_deref()),
        Command::Reverse { grammar, out } => commands::reverse(grammar, out.output.as_deref()),
        Command::Equiv { left, right, bound } => commands::equiv(left, right, bound.max_len),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let printed = if cli.json {
                let mut json = out.json;
                json["status"] = out.verdict.code().into();
                writeln!(
                    stdout,
                    "{}",
                    serde_json::to_string_pretty(&json).expect("serializable")
                )
            } else {
                write!(stdout, "{}", out.text)
            };
            if printed.is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(out.verdict.code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
