//! Command-line front end: verify identities, run enumeration oracles, and
//! list combinatorial structures.
//!
//! Exit codes follow the usual CI convention: 0 when the check passes, 1
//! when a verification or oracle comparison fails, 2 for usage errors and
//! exceeded enumeration budgets. One report per run goes to standard
//! output; diagnostics go to standard error.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use charlier::budget::EnumerationBudget;
use charlier::configs::{count_configs, count_h, enumerate_configs, enumerate_h};
use charlier::identities::{
    self, Identity, OracleKind, VerificationReport, VerifyMode,
};
use charlier::Result;

#[derive(Parser)]
#[command(
    name = "charlier",
    about = "Exact verification and enumeration for Charlier polynomial identities",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one generating-function identity up to a truncation order.
    Verify {
        /// Identity key, e.g. `egf`, `bilinear`, `multilinear`.
        identity: String,
        /// Truncation order (total degree) for both sides.
        #[arg(long, default_value_t = 6)]
        order: u32,
        /// Exact coefficient comparison or seeded random-point evaluation.
        #[arg(long, value_enum, default_value_t = Mode::Symbolic)]
        mode: Mode,
        /// Number of random evaluation points (random mode only).
        #[arg(long, default_value_t = 20)]
        points: u32,
        /// Random generator seed; the default keeps runs reproducible.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of configurations for the multilinear identity.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        output: Output,
        /// Lift the soft enumeration and order caps.
        #[arg(long)]
        force: bool,
    },
    /// Compare a brute-force weighted enumeration against its closed form.
    Oracle {
        /// Which exhaustive comparison to run.
        kind: OracleArg,
        /// Number of configurations per tuple (for `h`).
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Ground-set size.
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[command(flatten)]
        output: Output,
        /// Lift the soft enumeration caps (a hard tuple cap still applies).
        #[arg(long)]
        force: bool,
    },
    /// List configurations or tuples in their canonical order.
    Enumerate {
        /// Which structures to list.
        what: EnumerateArg,
        /// Number of configurations per tuple (for `h`).
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Ground-set size.
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Print only how many structures there are (closed form).
        #[arg(long)]
        count_only: bool,
        /// Lift the soft enumeration caps (a hard tuple cap still applies).
        #[arg(long)]
        force: bool,
    },
}

#[derive(clap::Args)]
struct Output {
    /// Report format. `json` emits one document per run on standard
    /// output; identical runs emit identical bytes.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include wall-clock timing in `json` output (off by default so that
    /// repeated runs stay byte-identical).
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Symbolic,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    #[value(alias = "json-like")]
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    /// Configurations on `[n]` against the closed-form polynomial.
    Config,
    /// Tuples on `[n]` against the matching series coefficient.
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnumerateArg {
    Configs,
    H,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify {
            identity,
            order,
            mode,
            points,
            seed,
            k,
            output,
            force,
        } => {
            let id = Identity::lookup(&identity, Some(k))?;
            let mode = match mode {
                Mode::Symbolic => VerifyMode::Symbolic,
                Mode::Random => VerifyMode::Random { points, seed },
            };
            let report = identities::verify(id, order, mode, &budget(force))?;
            let ok = report.verified;
            emit(report, &output);
            Ok(exit_for(ok))
        }
        Command::Oracle {
            kind,
            k,
            n,
            output,
            force,
        } => {
            let kind = match kind {
                OracleArg::Config => OracleKind::Config,
                OracleArg::H => OracleKind::H,
            };
            let report = identities::oracle_compare(kind, k, n, &budget(force))?;
            let ok = report.verified;
            emit(report, &output);
            Ok(exit_for(ok))
        }
        Command::Enumerate {
            what,
            k,
            n,
            count_only,
            force,
        } => {
            let budget = budget(force);
            match what {
                EnumerateArg::Configs => {
                    if count_only {
                        println!("{}", count_configs(n));
                    } else {
                        let labels: Vec<u32> = (1..=n).collect();
                        for config in enumerate_configs(&labels, &budget)? {
                            println!("{config}");
                        }
                    }
                }
                EnumerateArg::H => {
                    if count_only {
                        println!("{}", count_h(k, n));
                    } else {
                        for tuple in enumerate_h(k, n, &budget)? {
                            println!("{tuple}");
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn budget(force: bool) -> EnumerationBudget {
    if force {
        EnumerationBudget::forced()
    } else {
        EnumerationBudget::default()
    }
}

fn exit_for(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn emit(mut report: VerificationReport, output: &Output) {
    match output.format {
        Format::Text => print!("{}", report.render_text()),
        Format::Json => {
            if !output.timings {
                report.elapsed_ms = None;
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
        }
    }
}
