use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use revbench_cli::commands::{self, Format, Output, UsageError, VerifyArgs};
use revbench_cli::{compare, run_scenario, Scenario};
use revbench_core::verify::{Budget, Mode};
use revbench_core::Operator;

#[derive(Parser)]
#[command(name = "revbench", version, about = "Belief revision workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario script and check its assertions.
    Run { file: PathBuf },
    /// Run a scenario under several operators side by side.
    Compare {
        /// Comma-separated operator names (at least two).
        #[arg(long)]
        ops: String,
        file: PathBuf,
    },
    /// Check postulates for an operator over all or sampled instances.
    Verify {
        #[arg(long)]
        atoms: usize,
        #[arg(long)]
        operator: String,
        /// Comma-separated postulate names, or `all`.
        #[arg(long)]
        postulates: Option<String>,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_seq_len: usize,
        /// Stop after this many instances per postulate.
        #[arg(long)]
        max_instances: Option<u64>,
        /// Also compare every single revision against this operator.
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// File of `NAME pass|fail` lines; exit status reports whether they match.
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    /// Ask whether two formulas counteract with respect to a state.
    Counteracts {
        /// Number of atoms (named p, q, r, ...) or a list of atom names.
        #[arg(long)]
        atoms: String,
        #[arg(long)]
        state: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
}

fn load(path: &PathBuf) -> Result<Scenario, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|source| UsageError::Io {
        path: path.clone(),
        source,
    })?;
    Scenario::parse(&text).map_err(|e| UsageError::Invalid(format!("{}: {e}", path.display())))
}

fn execute(command: Command) -> Result<Output, UsageError> {
    match command {
        Command::Run { file } => {
            let scenario = load(&file)?;
            let r =
                run_scenario(&scenario, None).map_err(|e| UsageError::Invalid(e.to_string()))?;
            Ok(Output {
                code: r.exit_code(),
                text: r.transcript,
            })
        }
        Command::Compare { ops, file } => {
            let ops = commands::parse_operators(&ops)?;
            if ops.len() < 2 {
                return Err(UsageError::Invalid(
                    "compare needs at least two operators".into(),
                ));
            }
            let scenario = load(&file)?;
            let c = compare(&ops, &scenario).map_err(|e| UsageError::Invalid(e.to_string()))?;
            Ok(Output {
                code: c.exit_code(),
                text: c.render(),
            })
        }
        Command::Verify {
            atoms,
            operator,
            postulates,
            mode,
            samples,
            seed,
            max_seq_len,
            max_instances,
            oracle,
            format,
            out,
            expect,
        } => {
            let args = VerifyArgs {
                atoms,
                operator: operator.parse::<Operator>()?,
                postulates: match postulates {
                    Some(list) => commands::parse_postulates(&list)?,
                    None => Vec::new(),
                },
                mode: match mode {
                    ModeArg::Exhaustive => Mode::Exhaustive,
                    ModeArg::Sample => Mode::Sample,
                },
                budget: Budget {
                    samples,
                    seed,
                    max_seq_len,
                    max_instances,
                },
                oracle: oracle.map(|o| o.parse::<Operator>()).transpose()?,
                format: match format {
                    FormatArg::Text => Format::Text,
                    FormatArg::Json => Format::Json,
                },
                out,
                expect,
            };
            commands::verify_command(&args)
        }
        Command::Counteracts {
            atoms,
            state,
            alpha,
            beta,
        } => commands::counteracts_command(&atoms, &state, &alpha, &beta),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
