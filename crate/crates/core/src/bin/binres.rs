use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use binres::cli::{self, parse_input, Command, Format, RunFlags, EXIT_INPUT_ERROR};
use binres::oracle::ExhaustiveOptions;
use binres::{Criterion, Strategy};

/// Resolve binomial hypersurface pairs by coordinate blow-ups and certify
/// their singularities with exact discrepancies.
#[derive(Parser)]
#[command(name = "binres", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the chart tree and report it.
    Resolve(Common),
    /// Decide a singularity criterion (exit 0 holds, 1 fails).
    Check {
        #[arg(long, default_value = "lc", value_parser = parse_criterion)]
        criterion: Criterion,
        #[command(flatten)]
        common: Common,
    },
    /// Recompute every discrepancy independently and compare.
    Oracle {
        /// Also resolve under every valid center choice and compare lc verdicts.
        #[arg(long)]
        exhaustive: bool,
        /// Trace budget for --exhaustive.
        #[arg(long, default_value_t = ExhaustiveOptions::default().max_traces)]
        max_traces: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Input document, or `-` for standard input.
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, default_value = "greedy-lo", value_parser = parse_strategy)]
    strategy: Strategy,
    #[arg(long, default_value_t = binres::resolver::DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    /// Refuse trees with more nodes than this; 0 lifts the cap.
    #[arg(long, default_value_t = cli::DEFAULT_MAX_NODES)]
    max_nodes: usize,
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: Format,
    /// Expand the tree on a single thread.
    #[arg(long)]
    sequential: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_criterion(s: &str) -> Result<Criterion, String> {
    s.parse()
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn read_input(path: &str) -> io::Result<Vec<u8>> {
    if path == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        fs::read(path)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT_ERROR as u8 } else { 0 });
        }
    };
    let (command, common, max_traces) = match cli.command {
        Cmd::Resolve(common) => (Command::Resolve, common, None),
        Cmd::Check { criterion, common } => (Command::Check { criterion }, common, None),
        Cmd::Oracle { exhaustive, max_traces, common } => {
            (Command::Oracle { exhaustive }, common, Some(max_traces))
        }
    };

    let bytes = match read_input(&common.input) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", common.input);
            return ExitCode::from(EXIT_INPUT_ERROR as u8);
        }
    };
    let document = match parse_input(&bytes) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {}: {e}", common.input);
            return ExitCode::from(EXIT_INPUT_ERROR as u8);
        }
    };

    let mut flags = RunFlags {
        strategy: common.strategy,
        max_depth: common.max_depth,
        format: common.format,
        parallel: !common.sequential,
        max_nodes: (common.max_nodes > 0).then_some(common.max_nodes),
        ..RunFlags::default()
    };
    if let Some(max_traces) = max_traces {
        flags.exhaustive.max_traces = max_traces;
    }
    let outcome = cli::run(command, &document, &flags);

    if !outcome.report.is_empty() {
        let written = match &common.out {
            Some(path) => fs::write(path, outcome.report.as_bytes()),
            None => io::stdout().write_all(outcome.report.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(EXIT_INPUT_ERROR as u8);
        }
    }
    if let Some(error) = &outcome.error {
        eprintln!("error: {error}");
    }
    ExitCode::from(outcome.exit_code as u8)
}
