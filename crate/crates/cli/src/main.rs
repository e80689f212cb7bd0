mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use commands::CliError;

/// Search for vertices of the asymmetric subtour elimination polytope with
/// large integrality gap.
#[derive(Debug, Parser)]
#[command(name = "asep", version)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "ASEP_OUT", default_value = "asep-out")]
    out: PathBuf,
    /// Worker threads for gap solves.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Atsp,
    Stsp,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Enumerate every vertex for n = 4 or 5 by pivoting from a tour.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Pivot outward from start vertices, fewest zeros first.
    Explore {
        #[arg(long)]
        n: usize,
        /// Directory of vertex files, or a single file.
        #[arg(long)]
        starts: PathBuf,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Total wall-clock budget in seconds.
        #[arg(long)]
        t_total: Option<f64>,
        /// Wall-clock budget per pivoted vertex in seconds.
        #[arg(long)]
        t_iter: Option<f64>,
        /// Work budget per pivoted vertex, in cone tests.
        #[arg(long)]
        work: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip gap solves.
        #[arg(long)]
        no_gaps: bool,
    },
    /// Solve the gap LP at a vertex and write its certificate.
    Gap {
        #[arg(long)]
        vertex: PathBuf,
    },
    /// Break one loop, or all of them, adding a node.
    Break {
        #[arg(long)]
        vertex: PathBuf,
        /// The loop as `v1,v2`.
        #[arg(long = "loop")]
        pair: Option<String>,
    },
    /// Collapse a tight set to a single node.
    Collapse {
        #[arg(long)]
        vertex: PathBuf,
        /// Node set as a bitmask, decimal or with a 0x or 0b prefix.
        #[arg(long)]
        set: String,
        #[arg(long)]
        target: Option<usize>,
    },
    /// Print the canonical form and symmetry group of a vertex.
    Canon {
        #[arg(long)]
        vertex: PathBuf,
    },
    /// Write the certificate's cost matrix as a TSPLIB instance.
    Export {
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
    },
    /// Best gap per node count in an orbit index.
    Report {
        #[arg(long)]
        index: PathBuf,
    },
    /// Re-check every record in an orbit index.
    Verify {
        #[arg(long)]
        index: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli.command, &cli.out, cli.jobs) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Invalid(_) => 2,
                CliError::Failed(_) => 1,
            })
        }
    }
}
