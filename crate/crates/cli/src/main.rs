use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use acp_core::commands::{self, Command, Options, ToleranceOverrides, EXIT_INPUT};
use clap::{Args, Parser, Subcommand};

/// Verify α-completely-positive maps on finite groups, build their minimal
/// Krein-space dilations and compute Radon–Nikodym derivatives.
#[derive(Parser, Debug)]
#[command(name = "acp", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check conditions (1)–(4) and the remark identities for `mats`.
    Verify(Common),
    /// Build and certify the minimal dilation of `mats`.
    Dilate(Common),
    /// Radon–Nikodym derivative of `psi` with respect to `mats`.
    Rn(Common),
    /// Unitary equivalence of two triples, or of the dilations of `mats` and `psi`.
    Equiv(Common),
    /// Evaluate the integer-group quadruple that compresses to a non-α-CP map.
    Counterexample(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Instance file; reads stdin when absent or `-`.
    input: Option<PathBuf>,
    #[arg(long)]
    tol_psd: Option<f64>,
    #[arg(long)]
    tol_eq: Option<f64>,
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Include matrices (Gram, triple operators, T, S, U) in the report.
    #[arg(long)]
    emit_matrices: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Add `wall_time_ms` to the report.
    #[arg(long)]
    timing: bool,
}

fn read_input(path: Option<&PathBuf>) -> io::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, c) = match &cli.command {
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Dilate(c) => (Command::Dilate, c),
        Cmd::Rn(c) => (Command::Rn, c),
        Cmd::Equiv(c) => (Command::Equiv, c),
        Cmd::Counterexample(c) => (Command::Counterexample, c),
    };
    let opts = Options {
        tolerances: ToleranceOverrides {
            eps_psd: c.tol_psd,
            eps_eq: c.tol_eq,
            eps_rank: c.tol_rank,
        },
        seed: c.seed,
        emit_matrices: c.emit_matrices,
    };
    let input = if command == Command::Counterexample {
        String::new()
    } else {
        match read_input(c.input.as_ref()) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("acp: cannot read input: {e}");
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
    };

    let start = Instant::now();
    let mut outcome = commands::run(command, &input, &opts);
    if c.timing {
        if let Some(obj) = outcome.report.as_object_mut() {
            obj.insert(
                "wall_time_ms".into(),
                serde_json::json!(start.elapsed().as_secs_f64() * 1e3),
            );
        }
    }
    let text = outcome.to_json_string();
    let written = match &c.output {
        Some(p) => fs::write(p, &text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("acp: cannot write report: {e}");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    ExitCode::from(outcome.exit_code as u8)
}
