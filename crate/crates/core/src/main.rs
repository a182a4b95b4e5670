use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use csplab::cli::{parse_kl, run, Command, Flags};
use csplab::polyengine::IdentitySystem;
use csplab::temporal::TemporalOp;

/// Classify and solve constraint satisfaction problems over finite,
/// temporal, tournament and graph templates.
#[derive(Parser)]
#[command(name = "csplab", version)]
struct Args {
    /// classify | solve | freesets | afin | polysearch | consistency | oracle
    #[arg(value_parser = |s: &str| s.parse::<Command>().map_err(|e| e.to_string()))]
    command: Command,
    /// Template file.
    template: PathBuf,
    /// Instance file, for solve, freesets, consistency and oracle.
    instance: Option<PathBuf>,
    /// Local consistency parameters as K,L.
    #[arg(long, value_parser = |s: &str| parse_kl(s).map_err(|e| e.to_string()))]
    kl: Option<(usize, usize)>,
    /// Temporal master algorithm: pp, dual_pp, ll, dual_ll.
    #[arg(long, value_parser = |s: &str| s.parse::<TemporalOp>().map_err(|e| e.to_string()))]
    mode: Option<TemporalOp>,
    /// Cross-check solve with the brute-force oracle.
    #[arg(long)]
    oracle: bool,
    /// Identity system for polysearch, e.g. siggers, majority, wnu:3.
    #[arg(long, value_parser = |s: &str| s.parse::<IdentitySystem>().map_err(|e| e.to_string()))]
    identity: Option<IdentitySystem>,
    /// Arity for polysearch when the identities leave it open.
    #[arg(long)]
    arity: Option<usize>,
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("error: cannot read {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let template = match read(&args.template) {
        Ok(t) => t,
        Err(e) => {
            println!("{e}");
            return ExitCode::from(2);
        }
    };
    let instance = match args.instance.as_ref().map(read).transpose() {
        Ok(i) => i,
        Err(e) => {
            println!("{e}");
            return ExitCode::from(2);
        }
    };
    let flags = Flags {
        kl: args.kl,
        mode: args.mode,
        oracle: args.oracle,
        identity: args.identity,
        arity: args.arity,
    };
    let report = run(args.command, &template, instance.as_deref(), &flags);
    print!("{}", report.text);
    ExitCode::from(report.exit_code as u8)
}
