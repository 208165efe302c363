//! Command-line entry point: `run` executes a script and writes the
//! outputs, `fmt` prints a script's canonical form.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use specglue::DEFAULT_CHAIN_CAP;
use specglue_cli::{driver, script};

#[derive(Parser)]
#[command(
    name = "specglue",
    about = "Glue designated primes in tower presentations and export the resulting spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a script and write shapes, DOT files and report.json.
    Run(RunArgs),
    /// Parse a script and print its canonical form.
    Fmt { script: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    script: PathBuf,
    /// Output directory for JSON, DOT and report files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also search for order-reflecting embeddings and report both modes.
    #[arg(long)]
    strict_embed: bool,
    /// Abort chain enumeration beyond this many chains.
    #[arg(long, default_value_t = DEFAULT_CHAIN_CAP)]
    chain_cap: usize,
    /// Run the brute-force oracles alongside the pipeline.
    #[arg(long, value_parser = ["on", "off"], default_value = "on")]
    oracle: String,
    /// Override a base-field hypothesis flag, e.g. `uncountable=true`.
    /// May be given multiple times.
    #[arg(long = "assert-flag", value_name = "NAME=VALUE")]
    assert_flag: Vec<String>,
}

fn parse_assert_flags(raw: &[String]) -> Result<Vec<(String, bool)>, String> {
    raw.iter()
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| format!("--assert-flag `{item}`: expected NAME=VALUE"))?;
            let value = match value {
                "true" => true,
                "false" => false,
                other => {
                    return Err(format!(
                        "--assert-flag `{name}`: expected true or false, got `{other}`"
                    ))
                }
            };
            Ok((name.to_string(), value))
        })
        .collect()
}

fn read_script(path: &PathBuf) -> Result<script::Script, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("read {}: {e}", path.display()))?;
    script::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(args: &RunArgs) -> Result<bool, String> {
    let parsed = read_script(&args.script)?;
    let script_dir = args
        .script
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let opts = driver::Options {
        out_dir: args.out.clone(),
        script_dir,
        strict_embed: args.strict_embed,
        chain_cap: args.chain_cap,
        oracle: args.oracle == "on",
        assert_flags: parse_assert_flags(&args.assert_flag)?,
    };
    let outcome = driver::run_script(&parsed, &opts).map_err(|e| e.to_string())?;
    for path in &outcome.written {
        println!("wrote {}", path.display());
    }
    if !outcome.pass {
        eprintln!("checks failed; see {}", opts.out_dir.join("report.json").display());
    }
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => match run(&args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(message) => {
                eprintln!("error: {message}");
                ExitCode::from(2)
            }
        },
        Command::Fmt { script } => match read_script(&script) {
            Ok(parsed) => {
                print!("{}", script::print(&parsed));
                ExitCode::SUCCESS
            }
            Err(message) => {
                eprintln!("error: {message}");
                ExitCode::from(2)
            }
        },
    }
}
