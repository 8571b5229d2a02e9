use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use monpres::{exit_code, process_all, render, Format, RunConfig, EXIT_INPUT};
use monpres_core::encoder::{check_equiv, encode_with, parse_poly, EquivReport, DEFAULT_CHAIN};
use monpres_core::power_solver::{Options, DEFAULT_BOUND, DEFAULT_SCAN_CAP};

/// Decide single-variable Presburger sentences with perfect-power and
/// polynomial-image predicates.
#[derive(Parser, Debug)]
#[command(name = "monpres", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Input files.
    inputs: Vec<PathBuf>,

    /// Bound H on auxiliary unknowns in bounded enumerations.
    #[arg(long, env = "MONPRES_BOUND", default_value_t = DEFAULT_BOUND, value_parser = clap::value_parser!(u64).range(1..))]
    bound: u64,

    /// Candidates tried by a witness search before answering unknown.
    #[arg(long, env = "MONPRES_SCAN_CAP", default_value_t = DEFAULT_SCAN_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    scan_cap: u64,

    #[arg(long, env = "MONPRES_FORMAT", value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Print the coalescing log and the case taken by every disjunct.
    #[arg(long, env = "MONPRES_TRACE")]
    trace: bool,

    /// Allow several sentences per file.
    #[arg(long, env = "MONPRES_MULTI")]
    multi: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode `h = 0` over the perfect-square predicate.
    Encode {
        /// File holding the polynomial, `-` for stdin.
        input: PathBuf,
        /// Length M of the square chain.
        #[arg(long, default_value_t = DEFAULT_CHAIN, value_parser = clap::value_parser!(u32).range(2..))]
        chain: u32,
        /// Also compare against `h = 0` on `[-G, G]^n`.
        #[arg(long, value_name = "G")]
        check: Option<u32>,
    },
}

fn encode_cmd(input: PathBuf, chain: u32, check: Option<u32>) -> i32 {
    let mut text = String::new();
    let read = if input.as_os_str() == "-" { std::io::stdin().read_to_string(&mut text).map(|_| ()) } else { std::fs::read_to_string(&input).map(|t| text = t) };
    let name = input.display().to_string();
    if let Err(e) = read {
        eprintln!("error: {name}: {e}");
        return EXIT_INPUT;
    }
    let h = match parse_poly(&text) {
        Ok(h) => h,
        Err(e) => {
            eprintln!("error: {}", monpres::describe(&name, &text, &e));
            return EXIT_INPUT;
        }
    };
    let f = encode_with(&h, chain);
    println!("{f}");
    let Some(grid) = check else { return 0 };
    match check_equiv(&h, &f, grid) {
        EquivReport::Pass { checked } => {
            eprintln!("equivalent on {checked} points");
            0
        }
        other => {
            eprintln!("check failed: {other:?}");
            1
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(Command::Encode { input, chain, check }) = cli.command {
        return ExitCode::from(encode_cmd(input, chain, check) as u8);
    }
    if cli.inputs.is_empty() {
        eprintln!("error: no input files");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    let cfg = RunConfig {
        inputs: cli.inputs,
        options: Options { bound: cli.bound, scan_cap: cli.scan_cap, inspect_cap: cli.scan_cap },
        format: cli.format,
        trace: cli.trace,
        multi: cli.multi,
    };
    let records: Vec<_> = process_all(&cfg).into_iter().flatten().collect();
    let (out, err) = render(&cfg, &records);
    std::io::stdout().write_all(out.as_bytes()).ok();
    std::io::stderr().write_all(err.as_bytes()).ok();
    ExitCode::from(exit_code(&records) as u8)
}
