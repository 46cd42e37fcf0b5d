mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Proof checking, decision procedures and finite model experiments.
#[derive(Debug, Parser)]
#[command(name = "logicbench", version)]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Args)]
pub struct Opts {
    /// Prover budget: tableau constants per branch, IPC search steps, or
    /// interpretation candidates, depending on the command.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget_terms: Option<u64>,
    /// Maximum number of structures enumerated.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget_structures: Option<u64>,
    /// Largest structure size, or the formula-size bound for `interp`.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_size: Option<u64>,
    /// Worker threads for batch work.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Append a JSON record of this run to PATH.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check proof scripts. Imports resolve next to the file, then to the shipped scripts.
    Check { files: Vec<PathBuf> },
    /// Check the derivation catalog.
    Catalog {
        /// Catalog manifest; defaults to the shipped catalog.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Directory to read scripts from before the shipped copies.
        #[arg(long)]
        proofs: Option<PathBuf>,
        /// Restrict to these entries.
        #[arg(long)]
        only: Vec<String>,
    },
    /// Prove a classical formula: truth-table synthesis for propositional
    /// input, the tableau otherwise.
    Prove {
        formula: String,
        /// Write a countermodel here when the formula is refuted.
        #[arg(long)]
        countermodel: Option<PathBuf>,
    },
    /// Decide intuitionistic propositional derivability.
    Ipc {
        formula: String,
        #[arg(long)]
        countermodel: Option<PathBuf>,
    },
    /// Evaluate a sentence in a structure file, or a Kripke model with `--kripke`.
    Eval {
        model: PathBuf,
        formula: String,
        /// Read the model as a Kripke model.
        #[arg(long)]
        kripke: bool,
        /// World to evaluate at, for Kripke models.
        #[arg(long, default_value_t = 0)]
        world: usize,
        /// Henkin family file for second-order quantifiers.
        #[arg(long)]
        henkin: Option<PathBuf>,
    },
    /// Count or list the structures of a signature such as `P/1,E/2`.
    Enumerate {
        signature: String,
        /// Keep one structure per isomorphism class.
        #[arg(long)]
        iso: bool,
        /// Print the structures, not just the counts.
        #[arg(long)]
        list: bool,
    },
    /// Run a squeeze manifest.
    Squeeze { manifest: PathBuf },
    /// Does a second-order theory decide a sentence on structures of size 1..=max-size?
    Decided { theory: String, phi: String },
    /// Are all models of a theory of size 1..=max-size isomorphic?
    Categorical { theory: String },
    /// Decide Fund(A, B) for two structure files.
    Interp { a: PathBuf, b: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.opts.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(commands::run(&cli))
}
