use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use treeprune_cli::{cmd_analyze, cmd_check, with_pool, AnalyzeArgs, CheckArgs, CliError};

/// Proves CSS selectors redundant by analysing tree rewriting systems.
#[derive(Parser)]
#[command(name = "treeprune", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide every query of a rewrite system file.
    Check {
        file: PathBuf,
        /// Only consider trees of height at most K.
        #[arg(long)]
        k: Option<usize>,
        /// Cross-check verdicts against brute-force enumeration.
        #[arg(long)]
        oracle: bool,
        /// Include witness traces for reachable queries.
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Print the simplified system.
        #[arg(long)]
        dump_simple: bool,
        /// Print the pushdown rules built from the simplified system.
        #[arg(long)]
        dump_spds: bool,
        /// Report wall-clock time per phase.
        #[arg(long)]
        timings: bool,
    },
    /// Find redundant selectors in HTML pages. Several pages are treated as
    /// one site.
    Analyze {
        #[arg(required = true)]
        pages: Vec<PathBuf>,
        /// Extra stylesheet applied to every page.
        #[arg(long)]
        css: Vec<PathBuf>,
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Print the rewrite system extracted from each page.
        #[arg(long)]
        dump_system: bool,
        #[arg(long)]
        timings: bool,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Check {
            file,
            k,
            oracle,
            witness,
            format,
            dump_simple,
            dump_spds,
            timings,
        } => {
            let args = CheckArgs {
                k,
                oracle,
                witness,
                dump_simple,
                dump_spds,
                timings,
            };
            let report = with_pool(|| cmd_check(&file, &args))?;
            Ok(match format {
                Format::Text => report.to_text(),
                Format::Json => {
                    serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
                }
            })
        }
        Command::Analyze {
            pages,
            css,
            witness,
            format,
            dump_system,
            timings,
        } => {
            let args = AnalyzeArgs {
                css,
                witness,
                dump_system,
                timings,
            };
            let out = with_pool(|| cmd_analyze(&pages, &args))?;
            Ok(match format {
                Format::Text => out.to_text(),
                Format::Json => out.to_json() + "\n",
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("treeprune: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
