//! Command-line front end for `mwxray`.

pub mod commands;
pub mod error;
pub mod output;
pub mod scene;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{exit, CliError};
pub use scene::{Overrides, Scene};

#[derive(Parser, Debug)]
#[command(
    name = "mwxray",
    version,
    about = "Matrix-weighted geodesic X-ray transform on the unit disk"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Scene file (TOML).
    #[arg(long)]
    pub scene: PathBuf,
    /// Output directory, overriding `[output] dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Geodesic integration step, overriding `step`.
    #[arg(long)]
    pub step: Option<f64>,
    /// Seed for random fields, plans and noise.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the transform on every chord of the plan.
    Forward(Common),
    /// Compare scaled fan integrals with their frozen limits.
    LimitCheck(Common),
    /// Recover the field layer by layer.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Recorded data (CSV as written by `forward`) instead of synthetic data.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Singular values of the discretized transform.
    Spectrum(Common),
    /// Recover tangent-function values at a boundary vertex from limit data.
    LocalRecover(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Forward(c)
            | Command::LimitCheck(c)
            | Command::Spectrum(c)
            | Command::LocalRecover(c) => c,
            Command::Reconstruct { common, .. } => common,
        }
    }
}

/// Runs one command and returns its summary line.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let common = cli.command.common();
    if let Some(n) = common.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let overrides = Overrides {
        step: common.step,
        seed: common.seed,
        out: common.out.clone(),
    };
    let scene = Scene::load(&common.scene, &overrides)?;
    match &cli.command {
        Command::Forward(_) => commands::forward(&scene),
        Command::LimitCheck(_) => commands::limit_check(&scene),
        Command::Reconstruct { data, .. } => commands::reconstruct_cmd(&scene, data.as_deref()),
        Command::Spectrum(_) => commands::spectrum(&scene),
        Command::LocalRecover(_) => commands::local_recover(&scene),
    }
}
