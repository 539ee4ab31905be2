//! `vqm`: design, scan and simulate virtual-qubit thermal machines.

mod commands;
mod document;
mod error;
mod table;

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vqmachine::{DesignParams, DynamicsConfig, Mode, Placement};

use crate::document::{default_placement, MachineDocument};
use crate::error::CliError;
use crate::table::ResultTable;

#[derive(Parser, Debug)]
#[command(name = "vqm", version, about = "Virtual-qubit thermal machines: statics, design and dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal n-level cycle for the given resources.
    Design {
        #[command(flatten)]
        machine: MachineArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
        /// Print a machine document instead of a table.
        #[arg(long)]
        emit_doc: bool,
    },
    /// Virtual-qubit bias and norm along a family of machines.
    Scan {
        #[arg(value_enum)]
        family: Family,
        #[command(flatten)]
        machine: MachineArgs,
        /// Inclusive range of n, n' or k, written `a:b`.
        #[arg(long, value_parser = parse_range)]
        range: RangeInclusive<usize>,
        /// Virtual-qubit transition of concatenated machines.
        #[arg(long, value_enum)]
        placement: Option<PlacementArg>,
    },
    /// Steady state of optimal cycles driving an external qubit.
    Dynamics {
        #[command(flatten)]
        machine: MachineArgs,
        /// Inclusive range of cycle lengths, written `a:b`.
        #[arg(long, value_parser = parse_range, default_value = "3:40")]
        range: RangeInclusive<usize>,
        #[arg(long, default_value_t = 1.0)]
        tau_beta: f64,
        /// System-environment timescale; repeat for several curves.
        #[arg(long, default_values_t = [1.0])]
        tau_s: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        tau_swap: f64,
        /// Environment inverse temperature of the system, the cold bath by default.
        #[arg(long)]
        beta_env: Option<f64>,
        /// Report the best cycle length for each tau_s.
        #[arg(long)]
        optimal: bool,
    },
    /// Evaluate a machine document.
    Eval {
        path: PathBuf,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct MachineArgs {
    #[arg(long, value_enum, default_value = "fridge")]
    mode: ModeArg,
    /// Virtual-qubit gap.
    #[arg(long, default_value_t = 1.0)]
    ev: f64,
    /// Largest gap coupled to a bath.
    #[arg(long, default_value_t = 2.0)]
    emax: f64,
    /// Cold bath inverse temperature.
    #[arg(long, default_value_t = 0.2)]
    bc: f64,
    /// Hot bath inverse temperature.
    #[arg(long, default_value_t = 0.05)]
    bh: f64,
}

impl MachineArgs {
    fn params(&self, n: usize) -> Result<DesignParams, CliError> {
        Ok(DesignParams::new(n, self.ev, self.emax, self.bc, self.bh, self.mode.into())?)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    Fridge,
    Engine,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Fridge => Mode::Fridge,
            ModeArg::Engine => Mode::Engine,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum PlacementArg {
    Lower,
    Upper,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Family {
    Single,
    Multi,
    Concat,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `a:b`, got `{s}`"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("range start: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("range end: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok(a..=b)
}

enum Output {
    Table(ResultTable),
    Text(String),
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let table = match &cli.command {
        Command::Design { machine, n, emit_doc } => {
            let params = machine.params(*n as usize)?;
            if *emit_doc {
                return Ok(Output::Text(commands::design_document(&params)?));
            }
            commands::design(&params)?
        }
        Command::Scan {
            family,
            machine,
            range,
            placement,
        } => {
            // n only matters for validation here; each row sets its own
            let params = machine.params(3)?;
            match family {
                Family::Single => commands::scan_single(&params, range.clone())?,
                Family::Multi => commands::scan_multi(&params, range.clone())?,
                Family::Concat => {
                    let placement = match placement {
                        Some(PlacementArg::Lower) => Placement::Lower,
                        Some(PlacementArg::Upper) => Placement::Upper,
                        None => default_placement(params.mode),
                    };
                    commands::scan_concat(&params, range.clone(), placement)?
                }
            }
        }
        Command::Dynamics {
            machine,
            range,
            tau_beta,
            tau_s,
            tau_swap,
            beta_env,
            optimal,
        } => {
            let params = machine.params(4)?;
            let configs: Vec<DynamicsConfig> = tau_s
                .iter()
                .map(|&t| DynamicsConfig {
                    tau_beta: *tau_beta,
                    tau_s: t,
                    tau_swap: *tau_swap,
                    beta_env: beta_env.unwrap_or(params.beta_c),
                    e_s: params.e_v,
                })
                .collect();
            for c in &configs {
                c.check()?;
            }
            if *optimal {
                commands::dynamics_optimal(&params, *range.end(), &configs)?
            } else {
                commands::dynamics_scan(&params, range.clone(), &configs)?
            }
        }
        Command::Eval { path } => {
            let text = fs::read_to_string(path)?;
            let doc = MachineDocument::parse(&text).map_err(|e| match e {
                CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
                other => other,
            })?;
            commands::eval(&doc)?
        }
    };
    Ok(Output::Table(table))
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let text = match run(&cli) {
        Ok(Output::Table(t)) if cli.json => t.to_json(),
        Ok(Output::Table(t)) => t.to_csv(),
        Ok(Output::Text(s)) => s,
        Err(e) => {
            eprintln!("vqm: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let e = CliError::from(e);
            eprintln!("vqm: {e}");
            e.exit_code()
        }
    }
}
