//! Batch front-end: reads a problem description, aggregates the evidence
//! sources, propagates the product space with the requested methods, and
//! writes the result tables. Log verbosity follows the `RUST_LOG`
//! environment variable.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use evidprop::propagate::{map_ds, Method, PropagateError, PropagationResult};

use config::{ConfigError, Overrides};
use output::{OutputError, Writer};

#[derive(Parser)]
#[command(
    name = "evidprop",
    version,
    about = "Propagates Dempster-Shafer interval structures through nonlinear functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a problem configuration and write ds_table.csv, curves.csv and
    /// summary.json into the output directory
    Run {
        /// Problem configuration (TOML)
        config: PathBuf,
        /// Output directory (created if missing)
        #[arg(long)]
        out: PathBuf,
        /// Restrict to one method, or run all three
        #[arg(long)]
        method: Option<MethodArg>,
        /// Override the expansion order
        #[arg(long)]
        order: Option<usize>,
        /// Override the quadrature points per direction
        #[arg(long)]
        quad: Option<usize>,
        /// Override the subdivisions per direction
        #[arg(long)]
        subdiv: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    ChaosBernstein,
    IntervalBaseline,
    GridOracle,
    All,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::ChaosBernstein => vec![Method::ChaosBernstein],
            MethodArg::IntervalBaseline => vec![Method::IntervalBaseline],
            MethodArg::GridOracle => vec![Method::GridOracle],
            MethodArg::All => vec![
                Method::ChaosBernstein,
                Method::IntervalBaseline,
                Method::GridOracle,
            ],
        }
    }
}

#[derive(Debug, Error)]
enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("cannot create output directory `{path}`: {source}")]
    OutDir {
        path: String,
        source: std::io::Error,
    },
    #[error("propagation failed: {0}")]
    Numeric(#[from] PropagateError),
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Output(_) | RunError::OutDir { .. } => 1,
            RunError::Numeric(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let Command::Run {
        config,
        out,
        method,
        order,
        quad,
        subdiv,
    } = cli.command;
    let overrides = Overrides {
        methods: method.map(MethodArg::methods),
        order,
        quad_points: quad,
        subdivisions: subdiv,
    };
    match run(&config, &out, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}

fn run(
    config_path: &std::path::Path,
    out_dir: &std::path::Path,
    overrides: &Overrides,
) -> Result<(), RunError> {
    let problem = config::load(config_path, overrides)?;
    for (name, ds) in problem.variable_names.iter().zip(&problem.inputs) {
        log::info!("variable {name}: {} aggregated focal elements", ds.len());
    }

    let mut results: Vec<PropagationResult> = Vec::with_capacity(problem.methods.len());
    for &method in &problem.methods {
        log::info!("propagating with {method}");
        let result = map_ds(
            &problem.function,
            &problem.inputs,
            &problem.config.with_method(method),
        )?;
        results.push(result);
    }

    std::fs::create_dir_all(out_dir).map_err(|source| RunError::OutDir {
        path: out_dir.display().to_string(),
        source,
    })?;
    let writer = Writer {
        out_dir,
        problem: &problem,
    };
    let table_path = writer.ds_table(&results)?;
    let curves_path = writer.curves(&results)?;
    let summary_path = writer.summary(&results)?;

    println!(
        "wrote {}, {}, {}",
        table_path.display(),
        curves_path.display(),
        summary_path.display()
    );
    for result in &results {
        for &threshold in &problem.thresholds {
            let (lower, upper) = result.output.exceedance_bounds(threshold);
            println!(
                "{}: {} <= Prob(y > {}) <= {}",
                result.method,
                output::sig6(lower),
                output::sig6(threshold),
                output::sig6(upper)
            );
        }
    }
    Ok(())
}
