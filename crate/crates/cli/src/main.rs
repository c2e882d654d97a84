use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use curvscan_cli::commands::{parse_params, Outcome};
use curvscan_cli::error::EXIT_OK;
use curvscan_cli::{
    cmd_catalog_export, cmd_catalog_list, cmd_classify, cmd_criterion, cmd_invariants, cmd_probe, load_metric_file, CliError,
};
use curvscan_core::probe::Ansatz;

#[derive(Parser)]
#[command(name = "curvscan", version, about = "Curvature scalars, null congruences and torsion probes for metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Emit the JSON report instead of text
    #[arg(long)]
    json: bool,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnsatzArg {
    Gradient,
    Levicivita,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the curvature scalars of a metric file
    Invariants {
        file: PathBuf,
        /// Highest covariant derivative order of the curvature
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Check or search for null, normal, non-diverging vector fields
    Criterion {
        file: PathBuf,
        /// Contravariant components, comma separated, e.g. "0,1,0,0"
        #[arg(long)]
        field: Option<String>,
        /// Also test annihilation of the invariants up to this order
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Candidate search followed by phantom detection
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Compare two geometries through torsional invariants
    Probe {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value = "gradient")]
        ansatz: AnsatzArg,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Reference geometries
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List the entries
    List {
        #[command(flatten)]
        output: Output,
    },
    /// Write an entry as a metric file
    Export {
        name: String,
        /// Entry parameter, e.g. --param n=5
        #[arg(long = "param")]
        params: Vec<String>,
        /// Export the entry's alternate chart
        #[arg(long)]
        alternate: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(outcome: &Outcome, output: &Output) -> Result<i32, CliError> {
    let body = if output.json {
        let mut s = serde_json::to_string_pretty(&outcome.json).expect("reports are plain JSON values");
        s.push('\n');
        s
    } else {
        outcome.text.clone()
    };
    write_out(&body, output.out.as_ref())?;
    Ok(outcome.exit)
}

fn write_out(body: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Invariants { file, order, output } => emit(&cmd_invariants(&load_metric_file(&file)?, order)?, &output),
        Command::Criterion {
            file,
            field,
            order,
            output,
        } => emit(&cmd_criterion(&load_metric_file(&file)?, field.as_deref(), order)?, &output),
        Command::Classify { file, order, output } => emit(&cmd_classify(&load_metric_file(&file)?, order)?, &output),
        Command::Probe {
            first,
            second,
            ansatz,
            order,
            output,
        } => {
            let ansatz = match ansatz {
                AnsatzArg::Gradient => Ansatz::Gradient,
                AnsatzArg::Levicivita => Ansatz::LeviCivita,
            };
            let a = load_metric_file(&first)?;
            let b = load_metric_file(&second)?;
            emit(&cmd_probe(&a, &b, ansatz, order)?, &output)
        }
        Command::Catalog { action } => match action {
            CatalogAction::List { output } => emit(&cmd_catalog_list()?, &output),
            CatalogAction::Export {
                name,
                params,
                alternate,
                out,
            } => {
                let text = cmd_catalog_export(&name, &parse_params(&params)?, alternate)?;
                write_out(&text, out.as_ref())?;
                Ok(EXIT_OK)
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
