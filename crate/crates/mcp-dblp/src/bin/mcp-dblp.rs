//! Entry point. Without a subcommand this speaks MCP over stdio; the
//! `evaluate` subcommand grades a generated bibliography against ground
//! truth without touching the network.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mcp_dblp::evaluator::{evaluate_files, render_json, render_text};
use mcp_dblp::tools::{prompts, Toolbox};
use mcp_dblp::transport::Server;

#[derive(Parser)]
#[command(name = "mcp-dblp", version, about = "DBLP bibliography server for MCP clients")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Grade candidate citations against a ground-truth .bib file
    Evaluate {
        /// Ground-truth .bib file; must parse cleanly
        #[arg(long)]
        truth: PathBuf,
        /// Generated .bib file to grade
        #[arg(long)]
        candidate: PathBuf,
        /// Also write the report to this file
        #[arg(long)]
        report: Option<PathBuf>,
        /// Report format
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    match Cli::parse().command {
        None => serve(),
        Some(Command::Evaluate {
            truth,
            candidate,
            report,
            format,
        }) => evaluate(&truth, &candidate, report.as_deref(), format),
    }
}

fn serve() -> ExitCode {
    let server = Server::new(Toolbox::from_env()).with_prompts(prompts());
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    match server.run(stdin.lock(), stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            log::error!("transport failed: {error}");
            ExitCode::FAILURE
        }
    }
}

fn evaluate(
    truth: &std::path::Path,
    candidate: &std::path::Path,
    report: Option<&std::path::Path>,
    format: ReportFormat,
) -> ExitCode {
    let outcome = match evaluate_files(truth, candidate) {
        Ok(outcome) => outcome,
        Err(error) => {
            eprintln!("error: {error}");
            return ExitCode::FAILURE;
        }
    };
    let rendered = match format {
        ReportFormat::Text => render_text(&outcome),
        ReportFormat::Json => {
            let value = render_json(&outcome);
            serde_json::to_string_pretty(&value).expect("report serializes")
        }
    };
    print!("{rendered}");
    if !rendered.ends_with('\n') {
        println!();
    }
    if let Some(path) = report {
        if let Err(error) = std::fs::write(path, rendered.as_bytes()) {
            eprintln!("error: cannot write report to {}: {error}", path.display());
            return ExitCode::FAILURE;
        }
        println!("report written to {}", path.display());
    }
    let _ = std::io::stdout().flush();
    ExitCode::SUCCESS
}
