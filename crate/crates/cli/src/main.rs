//! `spin7lab`: verification suites, plane classification, L-frames,
//! deformation experiments and basis alignment for the Cayley 4-form.
//!
//! Exit codes: 0 pass (including pass up to a convention), 1 discrepancy
//! or alignment not found, 2 usage, parse or configuration error.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "spin7lab", version, about = "Cayley-form and L-submanifold verification")]
pub struct Cli {
    /// Base seed for every randomized check.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Override the number of random trials per check.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Override the grid size of deformation experiments.
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Leave timestamps out of the run manifest.
    #[arg(long, global = true)]
    pub no_timestamps: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a verification suite: forms, tables, lemma, expansion, embeddings or all.
    Verify {
        suite: String,
        /// Extra L-frame to check in the lemma suite: 8 rows u, v, w, z,
        /// R_uvw, R_uvz, R_uwz, R_vwz.
        #[arg(long)]
        fixture: Vec<PathBuf>,
    },
    /// Classify the 4-plane spanned by the rows of a plane file.
    Classify { file: PathBuf },
    /// Complete u, v, w (and optionally z) from a plane file to an L-frame.
    Frame {
        file: PathBuf,
        /// Write the eight frame vectors as a plane file.
        #[arg(long)]
        emit_fixture: Option<PathBuf>,
    },
    /// Run the deformation experiments described by a TOML config.
    Deform {
        config: PathBuf,
        /// Write the error-versus-t tables as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Search for a signed permutation carrying form A onto form B.
    Align {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = commands::run(&cli);
    ExitCode::from(code as u8)
}
