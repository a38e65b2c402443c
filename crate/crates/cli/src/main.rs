use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vgimp_cli::repl::repl;
use vgimp_cli::{read_scenario, write_file, CliError, EXIT_HALTED, EXIT_INPUT};
use vgimp_core::scenario::{run, Session};
use vgimp_core::trace::emit_json;

#[derive(Parser)]
#[command(name = "vgimp", version, about = "Plan-based conversational implicature")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every turn of a scenario and print one summary line per turn.
    Run {
        file: PathBuf,
        /// Write the JSON trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the last recognized plan as DOT here.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Override the planner's step bound.
        #[arg(long)]
        bound: Option<usize>,
        /// Halt at the first utterance that cannot be explained.
        #[arg(long)]
        strict: bool,
    },
    /// Load a scenario's setup and read acts interactively.
    Repl { file: PathBuf },
    /// Parse and validate a scenario.
    Check { file: PathBuf },
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("vgimp: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Check { file } => {
            let s = read_scenario(&file)?;
            println!("ok: {} agents, {} turns", s.agents.len(), s.turns.len());
            Ok(0)
        }
        Command::Run { file, trace, dot, bound, strict } => {
            let mut s = read_scenario(&file)?;
            if let Some(b) = bound {
                s.config.bound = b;
            }
            s.config.strict |= strict;
            let out = run(&s).map_err(|source| CliError::Scenario { path: file.clone(), source })?;
            for (i, line) in out.summaries.iter().enumerate() {
                println!("turn {}: {line}", i + 1);
            }
            if let Some(path) = trace {
                write_file(&path, &emit_json(&out.trace))?;
            }
            match (dot, &out.dot) {
                (Some(path), Some(text)) => write_file(&path, text)?,
                (Some(_), None) => eprintln!("vgimp: no recognized plan, DOT file not written"),
                _ => {}
            }
            if out.halted {
                eprintln!("vgimp: halted");
                return Ok(EXIT_HALTED);
            }
            Ok(0)
        }
        Command::Repl { file } => {
            let s = read_scenario(&file)?;
            let mut session = Session::new(s).map_err(|source| CliError::Scenario { path: file.clone(), source })?;
            repl(&mut session, io::stdin().lock(), io::stdout().lock()).map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
            Ok(0)
        }
    }
}
