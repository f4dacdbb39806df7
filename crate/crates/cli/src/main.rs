//! `bosewalk`: build walk graphs and their many-boson duals, certify state
//! transfer, and run optical-lattice transfer simulations.
//!
//! Exit status: 0 success, 1 i/o failure, 2 usage error, 3 rejected input,
//! 4 numerical failure.

mod error;
mod graphs;
mod lattice;
mod output;
mod parse;
mod walk;

use std::path::PathBuf;
use std::process::ExitCode;

use bosewalk::fock::DEFAULT_BASIS_CAP;
use clap::{Parser, Subcommand};
use serde_json::Value;

use crate::error::CliError;
use crate::output::{Emitter, Format, Provenance};

#[derive(Debug, Parser)]
#[command(name = "bosewalk", version, about = "Many-boson quantum walk duals, state transfer and lattice simulation")]
struct Cli {
    /// Directory for all output files; created if missing.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Structured output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Recorded in every output header.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest Fock basis or hierarchy graph that may be built.
    #[arg(long, global = true, default_value_t = DEFAULT_BASIS_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a named graph family.
    Graph(graphs::GraphArgs),
    /// Fock-space dual of a graph file.
    Dual(graphs::DualArgs),
    /// Build a graph from a hierarchy expression such as "(2 on (2 on 2))^2".
    Hierarchy(graphs::HierarchyArgs),
    /// Hitting time, transfer certificate, spectrum checks and greedy baseline.
    Walk(walk::WalkArgs),
    /// One optical-lattice transfer experiment.
    Lattice(lattice::LatticeArgs),
    /// Lattice experiments over a grid of parameter values, run in parallel.
    Sweep(lattice::SweepArgs),
}

/// Shared state handed to each command.
pub struct Context {
    pub out_dir: PathBuf,
    pub format: Format,
    pub seed: u64,
    pub cap: usize,
    pub argv: Vec<String>,
}

impl Context {
    /// Emitter whose provenance hashes `config`, the command's resolved parameters.
    pub fn emitter(&self, config: &Value) -> Result<Emitter, CliError> {
        Emitter::new(
            self.out_dir.clone(),
            self.format,
            Provenance::new(&self.argv, self.seed, config),
        )
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let ctx = Context {
        out_dir: cli.out_dir,
        format: cli.format,
        seed: cli.seed,
        cap: cli.cap,
        // The program path varies between installs; record the plain name.
        argv: std::iter::once("bosewalk".to_string()).chain(std::env::args().skip(1)).collect(),
    };
    let result = match cli.command {
        Command::Graph(a) => graphs::graph(&ctx, a),
        Command::Dual(a) => graphs::dual(&ctx, a),
        Command::Hierarchy(a) => graphs::hierarchy(&ctx, a),
        Command::Walk(a) => walk::walk(&ctx, a),
        Command::Lattice(a) => lattice::lattice(&ctx, a),
        Command::Sweep(a) => lattice::sweep(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bosewalk: {e}");
            e.exit_code()
        }
    }
}
